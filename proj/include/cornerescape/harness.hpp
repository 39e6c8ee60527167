// Copyright 2026 The cornerescape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Campaigns over whole families, single-instance solving and rendering.

#ifndef CORNERESCAPE_HARNESS_HPP
#define CORNERESCAPE_HARNESS_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cornerescape/clip_catalog.hpp"
#include "cornerescape/oracle.hpp"
#include "cornerescape/router.hpp"

namespace cornerescape {

enum class FailureKind { kInvalid, kOracle, kCaseGap };

inline std::string_view to_string(FailureKind k) {
  switch (k) {
    case FailureKind::kInvalid: return "invalid";
    case FailureKind::kOracle: return "oracle";
    case FailureKind::kCaseGap: return "case-gap";
  }
  return "?";
}

struct Failure {
  TerminalConfig cfg;
  FailureKind kind = FailureKind::kInvalid;
  Verdict verdict;      // empty unless kind == kInvalid
  std::string message;
};

struct CampaignReport {
  LemmaId lemma = LemmaId::HEAVY78;
  bool strict = false;
  std::size_t total = 0;
  std::size_t valid = 0;
  std::size_t fallbacks = 0;
  std::size_t patched = 0;           // configs whose trace has a patch label
  std::size_t oracle_confirmed = 0;
  std::size_t symmetry_applied = 0;
  std::map<std::string, std::size_t> case_histogram;
  std::vector<Failure> failures;
  std::vector<std::string> dead_cases;  // catalog labels never hit
  double wall_time = 0;                 // seconds

  bool has(FailureKind k) const {
    return std::any_of(failures.begin(), failures.end(),
                       [k](const Failure& f) { return f.kind == k; });
  }

  /// Merges a report over a disjoint slice. Counts add, histograms add,
  /// failures are kept in config order, so the result does not depend on
  /// how the enumeration was split.
  void merge(const CampaignReport& o) {
    total += o.total;
    valid += o.valid;
    fallbacks += o.fallbacks;
    patched += o.patched;
    oracle_confirmed += o.oracle_confirmed;
    symmetry_applied += o.symmetry_applied;
    for (const auto& [k, v] : o.case_histogram) case_histogram[k] += v;
    failures.insert(failures.end(), o.failures.begin(), o.failures.end());
    std::stable_sort(failures.begin(), failures.end(),
                     [](const Failure& a, const Failure& b) { return a.cfg < b.cfg; });
    wall_time = std::max(wall_time, o.wall_time);
  }
};

/// 0 all valid, 2 invalid plan, 3 oracle disagreement, 4 strict case gap.
inline int exit_status(const CampaignReport& r) {
  if (r.has(FailureKind::kInvalid)) return 2;
  if (r.has(FailureKind::kOracle)) return 3;
  if (r.has(FailureKind::kCaseGap)) return 4;
  return 0;
}

inline bool is_patch_label(const std::string& label) {
  return label.find("/patch/") != std::string::npos;
}

/// Catalog labels no trace in the histogram reaches.
inline std::vector<std::string> dead_cases(
    LemmaId lemma, const std::map<std::string, std::size_t>& hist) {
  std::vector<std::string> dead;
  for (const CaseInfo& c : case_catalog(lemma)) {
    bool hit = false;
    for (const auto& [label, n] : hist)
      if (n > 0 && label_matches(label, c.label)) hit = true;
    if (!hit) dead.push_back(c.label);
  }
  return dead;
}

namespace detail {

inline void check_one(const TerminalConfig& cfg, LemmaId lemma, bool strict,
                      bool cross_check, CampaignReport& r) {
  const GridGraph& g = corner_grid();
  const EscapeContract contract = contract_for(lemma);
  ++r.total;
  bool routed_ok = false;
  try {
    auto [plan, trace] = route_as(cfg, lemma, strict);
    for (const auto& l : trace.case_labels) ++r.case_histogram[l];
    if (trace.used_fallback) ++r.fallbacks;
    if (trace.symmetry_applied) ++r.symmetry_applied;
    if (std::any_of(trace.case_labels.begin(), trace.case_labels.end(),
                    is_patch_label))
      ++r.patched;
    Verdict v = validate_plan(g, cfg, plan, contract);
    if (!v.ok()) {
      r.failures.push_back({cfg, FailureKind::kInvalid, v, "plan rejected"});
      return;
    }
    routed_ok = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kCaseGap) throw;
    r.failures.push_back({cfg, FailureKind::kCaseGap, {}, e.what()});
    return;
  }
  if (cross_check) {
    OracleResult o = oracle_solve(g, cfg, contract);
    bool oracle_ok =
        o.found() && validate_plan(g, cfg, *o.plan, contract).ok();
    if (oracle_ok != routed_ok) {
      r.failures.push_back({cfg, FailureKind::kOracle, {},
                            "router and oracle disagree on existence"});
      return;
    }
    ++r.oracle_confirmed;
  }
  ++r.valid;
}

}  // namespace detail

struct CampaignOptions {
  bool strict = false;
  int jobs = 1;
  bool cross_check = true;
};

/// Routes, validates and (optionally) oracle-checks every configuration of
/// the family.
inline CampaignReport verify_all(LemmaId lemma, CampaignOptions opt = {}) {
  if (lemma == LemmaId::W2L)
    throw Error(ErrorCode::kInvalidArgument, "use verify_w2l for w2l");
  if (opt.jobs < 1) throw Error(ErrorCode::kInvalidArgument, "jobs must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<TerminalConfig> cfgs = enumerate_configs(lemma);
  const std::size_t n = cfgs.size();
  const std::size_t jobs =
      std::min<std::size_t>(static_cast<std::size_t>(opt.jobs), std::max<std::size_t>(n, 1));
  corner_grid();
  trail_index_for(corner_grid());  // build shared tables before fan-out

  std::vector<CampaignReport> parts(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t i = w; i < n; i += jobs)
        detail::check_one(cfgs[i], lemma, opt.strict, opt.cross_check, parts[w]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  CampaignReport r;
  r.lemma = lemma;
  r.strict = opt.strict;
  for (const auto& p : parts) r.merge(p);
  r.dead_cases = dead_cases(lemma, r.case_histogram);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

struct W2LReport {
  std::size_t tuples_full = 0;
  std::size_t tuples_punctured = 0;
  bool ok_full = false;
  bool ok_punctured = false;
  std::optional<std::array<Vertex, 4>> counterexample;
  double wall_time = 0;
  bool ok() const { return ok_full && ok_punctured; }
};

/// Weak 2-linkage of Q and of Q minus the corner.
inline W2LReport verify_w2l() {
  const auto t0 = std::chrono::steady_clock::now();
  W2LReport r;
  W2LResult a = check_weakly_2_linked(corner_grid());
  W2LResult b = check_weakly_2_linked(build_corner_grid({kCorner}));
  r.tuples_full = a.tuples;
  r.tuples_punctured = b.tuples;
  r.ok_full = a.ok;
  r.ok_punctured = b.ok;
  r.counterexample = a.counterexample ? a.counterexample : b.counterexample;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---- JSON ------------------------------------------------------------------

/// Report as JSON. With timing=false the output is a pure function of the
/// inputs.
inline nlohmann::json encode_report(const CampaignReport& r, bool timing = true) {
  nlohmann::json hist = nlohmann::json::object();
  std::map<std::string, std::size_t> patches;
  for (const auto& [k, v] : r.case_histogram) {
    hist[k] = v;
    if (is_patch_label(k)) patches[k] = v;
  }
  nlohmann::json fails = nlohmann::json::array();
  nlohmann::json gaps = nlohmann::json::array();
  for (const auto& f : r.failures) {
    nlohmann::json jf = {{"config", encode_config(f.cfg)},
                         {"kind", to_string(f.kind)},
                         {"message", f.message},
                         {"verdict", encode_verdict(f.verdict)}};
    fails.push_back(jf);
    if (f.kind == FailureKind::kCaseGap) gaps.push_back(encode_config(f.cfg));
  }
  nlohmann::json j;
  j["lemma"] = to_string(r.lemma);
  j["strict"] = r.strict;
  j["total"] = r.total;
  j["valid"] = r.valid;
  j["fallbacks"] = r.fallbacks;
  j["patched"] = r.patched;
  j["oracle_confirmed"] = r.oracle_confirmed;
  j["symmetry_applied"] = r.symmetry_applied;
  j["case_histogram"] = hist;
  j["patch_histogram"] = patches;
  j["dead_cases"] = r.dead_cases;
  j["case_gaps"] = gaps;
  j["failures"] = fails;
  if (timing) j["wall_time"] = r.wall_time;
  return j;
}

inline nlohmann::json encode_report(const W2LReport& r, bool timing = true) {
  nlohmann::json j;
  j["lemma"] = "w2l";
  j["tuples_full"] = r.tuples_full;
  j["tuples_punctured"] = r.tuples_punctured;
  j["ok_full"] = r.ok_full;
  j["ok_punctured"] = r.ok_punctured;
  if (r.counterexample) {
    nlohmann::json ce = nlohmann::json::array();
    for (Vertex v : *r.counterexample) ce.push_back(encode_vertex(v));
    j["counterexample"] = ce;
  }
  if (timing) j["wall_time"] = r.wall_time;
  return j;
}

// ---- rendering -------------------------------------------------------------

namespace detail {

struct PlanPath {
  std::string name;
  const Path* path;
};

inline std::vector<PlanPath> plan_paths(const EscapePlan& plan) {
  std::vector<PlanPath> out;
  for (const auto& l : plan.linkages)
    out.push_back({"link pair " + std::to_string(l.pair), &l.path});
  for (const auto& e : plan.escapes)
    out.push_back({"escape " + to_string(e.terminal) + " -> " + to_string(e.exit),
                   &e.path});
  return out;
}

inline const char* kGlyphs = "123456789abcdefghijklmnopqrstuvwxyz";

}  // namespace detail

/// 3x3 diagram. Vertices: '#' terminal, '@' exit, '+' otherwise. Each path
/// draws its edges with its own glyph (plan order: linkages, then escapes);
/// unused edges are '---' and '|'. A legend follows the grid.
inline std::string render_ascii(const EscapePlan& plan) {
  const auto paths = detail::plan_paths(plan);
  std::vector<std::string> rows(5, std::string(9, ' '));
  auto put_vertex = [&](Vertex v, char ch) {
    rows[2 * (v.row - 1)][4 * (v.col - 1)] = ch;
  };
  for (int r = 1; r <= 3; ++r)
    for (int c = 1; c <= 3; ++c) {
      put_vertex({r, c}, '+');
      if (c < 3)
        for (int k = 1; k <= 3; ++k) rows[2 * (r - 1)][4 * (c - 1) + k] = '-';
      if (r < 3) rows[2 * (r - 1) + 1][4 * (c - 1)] = '|';
    }
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const char glyph = detail::kGlyphs[i % 35];
    const Path& p = *paths[i].path;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
      Vertex a = std::min(p[k], p[k + 1]), b = std::max(p[k], p[k + 1]);
      if (a.row == b.row)
        for (int d = 1; d <= 3; ++d) rows[2 * (a.row - 1)][4 * (a.col - 1) + d] = glyph;
      else
        rows[2 * (a.row - 1) + 1][4 * (a.col - 1)] = glyph;
    }
  }
  for (const auto& l : plan.linkages)
    if (!l.path.empty()) {
      put_vertex(l.path.front(), '#');
      put_vertex(l.path.back(), '#');
    }
  for (const auto& e : plan.escapes) put_vertex(e.terminal, '#');
  for (const auto& e : plan.escapes) put_vertex(e.exit, '@');

  std::ostringstream os;
  for (auto& line : rows) {
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << '\n';
  }
  for (std::size_t i = 0; i < paths.size(); ++i)
    os << detail::kGlyphs[i % 35] << ": " << paths[i].name << ' '
       << to_string(*paths[i].path) << '\n';
  return os.str();
}

/// Graphviz rendering: one color per path, unused edges dashed grey.
inline std::string render_dot(const EscapePlan& plan) {
  static const char* colors[] = {"red", "blue", "darkgreen", "orange",
                                 "purple", "brown", "magenta", "cyan"};
  const GridGraph& g = corner_grid();
  const auto paths = detail::plan_paths(plan);
  std::map<std::pair<Vertex, Vertex>, std::size_t> owner;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const Path& p = *paths[i].path;
    for (std::size_t k = 0; k + 1 < p.size(); ++k)
      owner[{std::min(p[k], p[k + 1]), std::max(p[k], p[k + 1])}] = i;
  }
  std::set<Vertex> terms, exits;
  for (const auto& l : plan.linkages)
    if (!l.path.empty()) {
      terms.insert(l.path.front());
      terms.insert(l.path.back());
    }
  for (const auto& e : plan.escapes) {
    terms.insert(e.terminal);
    exits.insert(e.exit);
  }
  auto id = [](Vertex v) {
    return "\"" + std::to_string(v.row) + "," + std::to_string(v.col) + "\"";
  };
  std::ostringstream os;
  os << "graph plan {\n  node [shape=circle];\n";
  for (Vertex v : g.vertices()) {
    os << "  " << id(v) << " [pos=\"" << v.col << "," << -v.row << "!\"";
    if (terms.count(v)) os << ", style=filled, fillcolor=black, fontcolor=white";
    if (exits.count(v)) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (const Edge& e : g.edges()) {
    auto it = owner.find({std::min(e.a, e.b), std::max(e.a, e.b)});
    os << "  " << id(e.a) << " -- " << id(e.b);
    if (it == owner.end())
      os << " [style=dashed, color=grey];\n";
    else
      os << " [color=" << colors[it->second % 8] << ", penwidth=3, label=\""
         << detail::kGlyphs[it->second % 35] << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

// ---- single instance -------------------------------------------------------

struct SolveResult {
  EscapePlan plan;
  CaseTrace trace;
  Verdict verdict;
};

inline nlohmann::json encode_trace(const CaseTrace& t) {
  return {{"lemma", to_string(t.lemma)},
          {"case_labels", t.case_labels},
          {"used_fallback", t.used_fallback},
          {"symmetry_applied", t.symmetry_applied}};
}

/// Reads a config file (or a fixture holding one under "config"), routes
/// and validates it.
inline SolveResult solve_file(const std::string& path, bool strict = false) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  TerminalConfig cfg;
  try {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kMalformedConfig, e.what());
    }
    // a fixture wraps the config with its expected label
    cfg = decode_config(j.is_object() && j.contains("config") ? j.at("config") : j);
  } catch (const Error& e) {
    std::string msg = e.what();
    const std::string code = std::string(to_string(e.code())) + ": ";
    if (msg.rfind(code, 0) == 0) msg.erase(0, code.size());
    throw Error(e.code(), path + ": " + msg);
  }
  auto [plan, trace] = route(cfg, strict);
  Verdict v = validate_plan(corner_grid(), cfg, plan, contract_for(trace.lemma));
  return {plan, trace, v};
}

}  // namespace cornerescape

#endif  // CORNERESCAPE_HARNESS_HPP
