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

#ifndef CORNERESCAPE_PATH_MODEL_HPP
#define CORNERESCAPE_PATH_MODEL_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cornerescape/grid.hpp"
#include "cornerescape/terminals.hpp"

namespace cornerescape {

struct EscapeContract {
  int min_linked_pairs = 0;
  std::vector<Vertex> exit_target;          // L for the corner lemmas
  std::optional<int> max_exits_in_B_minus_A;  // nullopt = unbounded
  std::optional<int> exact_escapes;
};

inline EscapeContract contract_for(LemmaId lemma) {
  std::vector<Vertex> L(kLOrder.begin(), kLOrder.end());
  std::sort(L.begin(), L.end());
  switch (lemma) {
    case LemmaId::HEAVY78: return {2, L, std::nullopt, std::nullopt};
    case LemmaId::HEAVY6: return {1, L, 1, std::nullopt};
    case LemmaId::HEAVY5: return {1, L, 1, 3};
    case LemmaId::W2L: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "w2l has no escape contract");
}

struct Linkage {
  int pair = 0;  // index into the canonical pair list
  Path path;
  friend bool operator==(const Linkage&, const Linkage&) = default;
};

struct Escape {
  Vertex terminal;
  Vertex exit;
  Path path;
  friend bool operator==(const Escape&, const Escape&) = default;
};

struct EscapePlan {
  std::vector<Linkage> linkages;
  std::vector<Escape> escapes;

  /// Linkages by pair, escapes by terminal.
  void sort() {
    std::sort(linkages.begin(), linkages.end(),
              [](const Linkage& a, const Linkage& b) { return a.pair < b.pair; });
    std::sort(escapes.begin(), escapes.end(),
              [](const Escape& a, const Escape& b) {
                return a.terminal < b.terminal;
              });
  }
  friend bool operator==(const EscapePlan&, const EscapePlan&) = default;
};

/// Maps a plan for cfg to the transposed plan for diagonal_reflect(cfg).
inline EscapePlan diagonal_reflect(const EscapePlan& plan,
                                   const TerminalConfig& cfg) {
  TerminalConfig c = cfg.canonical();
  TerminalConfig rc = diagonal_reflect(c);
  EscapePlan out;
  for (const Linkage& l : plan.linkages) {
    Path p = diagonal_reflect(l.path);
    int idx = -1;
    if (l.pair >= 0 && l.pair < static_cast<int>(c.pairs.size()))
      idx = rc.pair_of(diagonal_reflect(c.pairs[l.pair].first));
    out.linkages.push_back({idx, p});
  }
  for (const Escape& e : plan.escapes)
    out.escapes.push_back({diagonal_reflect(e.terminal),
                           diagonal_reflect(e.exit),
                           diagonal_reflect(e.path)});
  out.sort();
  return out;
}

// ---- validation ------------------------------------------------------------

enum class Violation {
  EDGE_REUSE,
  EXIT_COLLISION,
  B_EXIT_BOUND,
  BAD_ENDPOINT,
  NOT_A_PATH,
  UNRESOLVED_TERMINAL,
  LINK_COUNT,
};

inline std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::EDGE_REUSE: return "EDGE_REUSE";
    case Violation::EXIT_COLLISION: return "EXIT_COLLISION";
    case Violation::B_EXIT_BOUND: return "B_EXIT_BOUND";
    case Violation::BAD_ENDPOINT: return "BAD_ENDPOINT";
    case Violation::NOT_A_PATH: return "NOT_A_PATH";
    case Violation::UNRESOLVED_TERMINAL: return "UNRESOLVED_TERMINAL";
    case Violation::LINK_COUNT: return "LINK_COUNT";
  }
  return "?";
}

struct ViolationRecord {
  Violation code;
  std::string message;
  std::string element;
};

struct Verdict {
  std::vector<ViolationRecord> violations;
  bool ok() const { return violations.empty(); }
  bool has(Violation c) const {
    return std::any_of(violations.begin(), violations.end(),
                       [c](const ViolationRecord& r) { return r.code == c; });
  }
  void add(Violation c, std::string msg, std::string elem) {
    violations.push_back({c, std::move(msg), std::move(elem)});
  }
};

/// Checks a plan against the contract. Never throws on bad plans; every
/// problem found lands in the verdict.
inline Verdict validate_plan(const GridGraph& g, const TerminalConfig& cfg_in,
                             const EscapePlan& plan,
                             const EscapeContract& contract) {
  Verdict v;
  const TerminalConfig cfg = cfg_in.canonical();
  std::map<Edge, std::string> used;  // edge -> owner, for EDGE_REUSE

  auto walk = [&](const Path& p, const std::string& owner) {
    if (p.empty()) {
      v.add(Violation::NOT_A_PATH, "empty path", owner);
      return false;
    }
    bool fine = true;
    std::set<Edge> mine;
    for (Vertex x : p)
      if (!g.has_vertex(x)) {
        v.add(Violation::NOT_A_PATH, "vertex not in graph: " + to_string(x),
              owner);
        return false;
      }
    for (size_t i = 1; i < p.size(); ++i) {
      if (!g.has_edge(p[i - 1], p[i])) {
        v.add(Violation::NOT_A_PATH,
              "no edge " + to_string(p[i - 1]) + "-" + to_string(p[i]), owner);
        fine = false;
        continue;
      }
      Edge e = Edge::make(p[i - 1], p[i]);
      if (!mine.insert(e).second) {
        v.add(Violation::NOT_A_PATH, "edge repeated within path: " +
                                         to_string(e), owner);
        fine = false;
        continue;
      }
      auto [it, fresh] = used.emplace(e, owner);
      if (!fresh)
        v.add(Violation::EDGE_REUSE,
              to_string(e) + " also used by " + it->second, owner);
    }
    return fine;
  };

  // (1) linkages
  std::set<int> linked;
  for (const Linkage& l : plan.linkages) {
    std::string owner = "linkage[" + std::to_string(l.pair) + "]";
    if (l.pair < 0 || l.pair >= static_cast<int>(cfg.pairs.size())) {
      v.add(Violation::BAD_ENDPOINT, "no such pair", owner);
      continue;
    }
    if (!linked.insert(l.pair).second)
      v.add(Violation::BAD_ENDPOINT, "pair linked twice", owner);
    walk(l.path, owner);
    if (l.path.empty()) continue;
    auto [s, t] = cfg.pairs[l.pair];
    Vertex a = l.path.front(), b = l.path.back();
    if (!((a == s && b == t) || (a == t && b == s)))
      v.add(Violation::BAD_ENDPOINT,
            "linkage ends " + to_string(a) + "," + to_string(b) +
                " but pair is " + to_string(s) + "," + to_string(t),
            owner);
  }
  if (static_cast<int>(linked.size()) < contract.min_linked_pairs)
    v.add(Violation::LINK_COUNT,
          std::to_string(linked.size()) + " linked, need " +
              std::to_string(contract.min_linked_pairs),
          "plan");

  // (2) every other terminal escapes exactly once
  std::set<Vertex> must_escape;
  for (Vertex s : cfg.singletons) must_escape.insert(s);
  for (size_t i = 0; i < cfg.pairs.size(); ++i)
    if (!linked.count(static_cast<int>(i))) {
      must_escape.insert(cfg.pairs[i].first);
      must_escape.insert(cfg.pairs[i].second);
    }
  std::map<Vertex, int> escaped;
  std::set<Vertex> exits;
  int in_b = 0;
  for (const Escape& e : plan.escapes) {
    std::string owner = "escape" + to_string(e.terminal);
    if (!must_escape.count(e.terminal)) {
      v.add(Violation::BAD_ENDPOINT,
            cfg.has_terminal(e.terminal) ? "terminal is linked, not escaping"
                                         : "not a terminal",
            owner);
    }
    ++escaped[e.terminal];
    walk(e.path, owner);
    if (!e.path.empty() &&
        (e.path.front() != e.terminal || e.path.back() != e.exit))
      v.add(Violation::BAD_ENDPOINT,
            "path runs " + to_string(e.path.front()) + " to " +
                to_string(e.path.back()),
            owner);
    // (3) exits
    if (std::find(contract.exit_target.begin(), contract.exit_target.end(),
                  e.exit) == contract.exit_target.end())
      v.add(Violation::BAD_ENDPOINT, "exit outside target set", owner);
    if (!exits.insert(e.exit).second)
      v.add(Violation::EXIT_COLLISION, "exit " + to_string(e.exit) + " reused",
            owner);
    if (in_B_minus_A(e.exit)) ++in_b;
  }
  for (Vertex t : must_escape) {
    int n = escaped.count(t) ? escaped[t] : 0;
    if (n != 1)
      v.add(Violation::UNRESOLVED_TERMINAL,
            n == 0 ? "terminal neither linked nor escaped"
                   : "terminal escapes more than once",
            to_string(t));
  }
  if (contract.exact_escapes &&
      static_cast<int>(plan.escapes.size()) != *contract.exact_escapes)
    v.add(Violation::UNRESOLVED_TERMINAL,
          std::to_string(plan.escapes.size()) + " escapes, need " +
              std::to_string(*contract.exact_escapes),
          "plan");
  // (4)
  if (contract.max_exits_in_B_minus_A && in_b > *contract.max_exits_in_B_minus_A)
    v.add(Violation::B_EXIT_BOUND,
          std::to_string(in_b) + " exits in B\\A", "plan");
  return v;
}

// ---- JSON ------------------------------------------------------------------

inline nlohmann::json encode_plan(const EscapePlan& plan) {
  nlohmann::json ls = nlohmann::json::array(), es = nlohmann::json::array();
  for (const Linkage& l : plan.linkages)
    ls.push_back({{"pair", l.pair}, {"path", encode_path(l.path)}});
  for (const Escape& e : plan.escapes)
    es.push_back({{"terminal", encode_vertex(e.terminal)},
                  {"exit", encode_vertex(e.exit)},
                  {"path", encode_path(e.path)}});
  return {{"linkages", ls}, {"escapes", es}};
}

inline EscapePlan decode_plan(const nlohmann::json& j) {
  EscapePlan plan;
  try {
    for (size_t i = 0; i < j.at("linkages").size(); ++i) {
      const auto& l = j.at("linkages")[i];
      std::string at = "linkages[" + std::to_string(i) + "]";
      plan.linkages.push_back(
          {l.at("pair").get<int>(), decode_path(l.at("path"), at + ".path")});
    }
    for (size_t i = 0; i < j.at("escapes").size(); ++i) {
      const auto& e = j.at("escapes")[i];
      std::string at = "escapes[" + std::to_string(i) + "]";
      plan.escapes.push_back({decode_vertex(e.at("terminal"), at + ".terminal"),
                              decode_vertex(e.at("exit"), at + ".exit"),
                              decode_path(e.at("path"), at + ".path")});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedConfig, std::string("plan: ") + e.what());
  }
  return plan;
}

inline nlohmann::json encode_verdict(const Verdict& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : v.violations)
    out.push_back({{"code", to_string(r.code)},
                   {"message", r.message},
                   {"element", r.element}});
  return out;
}

}  // namespace cornerescape

#endif  // CORNERESCAPE_PATH_MODEL_HPP
