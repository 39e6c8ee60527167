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

// cornerescape: verify / solve / clips / enumerate.
//
// Exit codes: 0 ok, 1 usage or input error, 2 validation failure,
// 3 oracle disagreement, 4 strict-mode case gap.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cornerescape/harness.hpp"

namespace ce = cornerescape;

namespace {

int worst(int a, int b) {
  // lower nonzero codes are more serious
  if (a == 0) return b;
  if (b == 0) return a;
  return std::min(a, b);
}

void print_summary(const ce::CampaignReport& r) {
  std::cout << ce::to_string(r.lemma) << (r.strict ? " [strict]" : "")
            << ": total " << r.total << ", valid " << r.valid << ", failures "
            << r.failures.size() << ", fallbacks " << r.fallbacks
            << ", patched " << r.patched << ", oracle-confirmed "
            << r.oracle_confirmed << ", dead cases " << r.dead_cases.size()
            << ", " << r.wall_time << " s\n";
  for (const auto& f : r.failures)
    std::cout << "  " << ce::to_string(f.kind) << " "
              << ce::encode_config(f.cfg).dump() << " " << f.message << "\n";
  for (const auto& d : r.dead_cases) std::cout << "  dead case " << d << "\n";
}

int cmd_verify(const std::string& lemma, bool strict, int jobs,
               const std::string& report_path) {
  std::vector<ce::LemmaId> todo;
  if (lemma == "all") {
    todo = {ce::LemmaId::W2L, ce::LemmaId::HEAVY78, ce::LemmaId::HEAVY6,
            ce::LemmaId::HEAVY5};
  } else {
    auto l = ce::parse_lemma(lemma);
    if (!l) {
      std::cerr << "unknown lemma: " << lemma << "\n";
      return 1;
    }
    todo = {*l};
  }
  int status = 0;
  nlohmann::json reports = nlohmann::json::array();
  for (ce::LemmaId l : todo) {
    if (l == ce::LemmaId::W2L) {
      ce::W2LReport w = ce::verify_w2l();
      std::cout << "w2l: Q " << w.tuples_full << " tuples "
                << (w.ok_full ? "ok" : "FAIL") << ", Q-(3,3) "
                << w.tuples_punctured << " tuples "
                << (w.ok_punctured ? "ok" : "FAIL") << ", " << w.wall_time
                << " s\n";
      if (!w.ok()) status = worst(status, 2);
      reports.push_back(ce::encode_report(w));
      continue;
    }
    ce::CampaignReport r = ce::verify_all(l, {strict, jobs, true});
    print_summary(r);
    status = worst(status, ce::exit_status(r));
    reports.push_back(ce::encode_report(r));
  }
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) {
      std::cerr << "cannot write " << report_path << "\n";
      return 1;
    }
    out << (reports.size() == 1 ? reports[0] : reports).dump(2) << "\n";
  }
  return status;
}

int cmd_solve(const std::string& path, const std::string& render, bool strict) {
  ce::SolveResult s = ce::solve_file(path, strict);
  nlohmann::json out = ce::encode_plan(s.plan);
  out["trace"] = ce::encode_trace(s.trace);
  std::cout << out.dump() << "\n";
  if (render == "ascii") std::cout << ce::render_ascii(s.plan);
  if (render == "dot") std::cout << ce::render_dot(s.plan);
  if (!s.verdict.ok()) {
    std::cerr << ce::encode_verdict(s.verdict).dump(2) << "\n";
    return 2;
  }
  return 0;
}

int cmd_clips() {
  int bad = 0;
  for (const ce::ClipSpec& c : ce::clip_catalog()) {
    ce::ClipVerdict v = ce::verify_clip(ce::corner_grid(), c);
    std::cout << (v.ok ? "ok   " : "FAIL ") << c.name << "\n";
    for (const auto& p : v.problems) std::cout << "     " << p << "\n";
    if (!v.ok) ++bad;
  }
  std::cout << ce::clip_catalog().size() << " clips, " << bad << " failing\n";
  return bad ? 2 : 0;
}

int cmd_enumerate(const std::string& lemma, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return 1;
  }
  auto l = ce::parse_lemma(lemma);
  if (!l) {
    std::cerr << "unknown lemma: " << lemma << "\n";
    return 1;
  }
  if (*l == ce::LemmaId::W2L) {
    // one ordered 4-tuple per line, tagged with the graph it belongs to
    std::size_t n = 0;
    for (const char* name : {"Q", "Q-(3,3)"}) {
      ce::GridGraph g = std::string(name) == "Q"
                            ? ce::corner_grid()
                            : ce::build_corner_grid({ce::kCorner});
      for (ce::Vertex a : g.vertices())
        for (ce::Vertex b : g.vertices())
          for (ce::Vertex c : g.vertices())
            for (ce::Vertex d : g.vertices()) {
              out << nlohmann::json{{"graph", name},
                                    {"tuple",
                                     {ce::encode_vertex(a), ce::encode_vertex(b),
                                      ce::encode_vertex(c), ce::encode_vertex(d)}}}
                         .dump()
                  << "\n";
              ++n;
            }
    }
    std::cout << n << " tuples\n";
    return 0;
  }
  auto cfgs = ce::enumerate_configs(*l);
  ce::write_ndjson(out, cfgs);
  std::cout << cfgs.size() << " configs\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge-disjoint linkage and escape routing in the 3x3 corner grid"};
  app.require_subcommand(1);

  std::string lemma, report, config, render = "none", out;
  int jobs = 1;
  bool strict = false, verify_flag = false;

  auto* verify = app.add_subcommand("verify", "run a full campaign");
  verify->add_option("--lemma", lemma, "w2l|heavy78|heavy6|heavy5|all")
      ->required()
      ->check(CLI::IsMember({"w2l", "heavy78", "heavy6", "heavy5", "all"}));
  verify->add_flag("--strict", strict, "no oracle fallback; gaps fail");
  verify->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--report", report, "write the JSON report here");

  auto* solve = app.add_subcommand("solve", "route one configuration");
  solve->add_option("--config", config, "config JSON file")->required();
  solve->add_option("--render", render, "ascii|dot")
      ->check(CLI::IsMember({"none", "ascii", "dot"}));
  solve->add_flag("--strict", strict, "no oracle fallback");

  auto* clips = app.add_subcommand("clips", "clip catalog");
  clips->add_flag("--verify", verify_flag, "check every clip")->required();

  auto* enumerate = app.add_subcommand("enumerate", "dump a family as NDJSON");
  enumerate->add_option("--lemma", lemma, "w2l|heavy78|heavy6|heavy5")
      ->required()
      ->check(CLI::IsMember({"w2l", "heavy78", "heavy6", "heavy5"}));
  enumerate->add_option("--out", out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return cmd_verify(lemma, strict, jobs, report);
    if (*solve) return cmd_solve(config, render, strict);
    if (*clips) return cmd_clips();
    if (*enumerate) return cmd_enumerate(lemma, out);
  } catch (const ce::Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == ce::ErrorCode::kCaseGap ? 4 : 1;
  }
  return 1;
}
