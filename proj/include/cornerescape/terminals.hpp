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

#ifndef CORNERESCAPE_TERMINALS_HPP
#define CORNERESCAPE_TERMINALS_HPP

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cornerescape/grid.hpp"

namespace cornerescape {

enum class LemmaId { W2L, HEAVY78, HEAVY6, HEAVY5 };

inline std::string_view to_string(LemmaId l) {
  switch (l) {
    case LemmaId::W2L: return "w2l";
    case LemmaId::HEAVY78: return "heavy78";
    case LemmaId::HEAVY6: return "heavy6";
    case LemmaId::HEAVY5: return "heavy5";
  }
  return "?";
}

inline std::optional<LemmaId> parse_lemma(std::string_view s) {
  for (LemmaId l : {LemmaId::W2L, LemmaId::HEAVY78, LemmaId::HEAVY6,
                    LemmaId::HEAVY5})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

using VertexPair = std::pair<Vertex, Vertex>;

/// Pairs to be linked plus singletons to be routed out. Use canonical() for
/// comparisons: pairs are unordered, and so are both lists.
struct TerminalConfig {
  std::vector<VertexPair> pairs;
  std::vector<Vertex> singletons;

  int terminal_count() const {
    return static_cast<int>(2 * pairs.size() + singletons.size());
  }

  /// Every terminal vertex, sorted.
  std::vector<Vertex> terminals() const {
    std::vector<Vertex> out(singletons);
    for (const auto& [s, t] : pairs) {
      out.push_back(s);
      out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool has_terminal(Vertex v) const {
    auto ts = terminals();
    return std::binary_search(ts.begin(), ts.end(), v);
  }

  /// Index of the pair containing v, or -1.
  int pair_of(Vertex v) const {
    for (size_t i = 0; i < pairs.size(); ++i)
      if (pairs[i].first == v || pairs[i].second == v)
        return static_cast<int>(i);
    return -1;
  }

  TerminalConfig canonical() const {
    TerminalConfig c = *this;
    for (auto& p : c.pairs)
      if (p.second < p.first) std::swap(p.first, p.second);
    std::sort(c.pairs.begin(), c.pairs.end());
    std::sort(c.singletons.begin(), c.singletons.end());
    return c;
  }

  friend auto operator<=>(const TerminalConfig&,
                          const TerminalConfig&) = default;
};

/// Throws MALFORMED_CONFIG unless cfg lives on Q with distinct terminals.
inline void check_config(const TerminalConfig& cfg) {
  if (cfg.pairs.size() > 4)
    throw Error(ErrorCode::kMalformedConfig, "more than 4 pairs");
  if (cfg.terminal_count() > 8)
    throw Error(ErrorCode::kMalformedConfig, "more than 8 terminals");
  std::set<Vertex> seen;
  for (Vertex v : cfg.terminals()) {
    if (!corner_grid().has_vertex(v))
      throw Error(ErrorCode::kMalformedConfig,
                  "vertex out of range: " + to_string(v));
    if (!seen.insert(v).second)
      throw Error(ErrorCode::kMalformedConfig,
                  "duplicate terminal vertex " + to_string(v));
  }
}

inline TerminalConfig diagonal_reflect(const TerminalConfig& cfg) {
  TerminalConfig out;
  for (const auto& [s, t] : cfg.pairs)
    out.pairs.push_back({diagonal_reflect(s), diagonal_reflect(t)});
  for (Vertex v : cfg.singletons) out.singletons.push_back(diagonal_reflect(v));
  return out.canonical();
}

inline TerminalConfig demote_pair_to_singletons(const TerminalConfig& cfg,
                                                int pair_index) {
  if (pair_index < 0 || pair_index >= static_cast<int>(cfg.pairs.size()))
    throw Error(ErrorCode::kInvalidArgument, "pair index out of range");
  TerminalConfig out = cfg;
  auto [s, t] = out.pairs[pair_index];
  out.pairs.erase(out.pairs.begin() + pair_index);
  out.singletons.push_back(s);
  out.singletons.push_back(t);
  return out.canonical();
}

// ---- enumeration -----------------------------------------------------------

struct EnumerationOptions {
  /// HEAVY6 only: also yield 1 pair + 4 singletons. Not covered by the
  /// router; the oracle still checks it.
  bool six_with_one_pair = false;
};

namespace detail {

inline void matchings(std::vector<Vertex> rest,
                      std::vector<VertexPair>& acc,
                      std::vector<std::vector<VertexPair>>& out) {
  if (rest.empty()) {
    out.push_back(acc);
    return;
  }
  Vertex first = rest.front();
  for (size_t i = 1; i < rest.size(); ++i) {
    std::vector<Vertex> next;
    for (size_t j = 1; j < rest.size(); ++j)
      if (j != i) next.push_back(rest[j]);
    acc.push_back({first, rest[i]});
    matchings(next, acc, out);
    acc.pop_back();
  }
}

/// Bitmask subsets of {0..n-1} with k elements, in increasing order.
inline std::vector<unsigned> subsets(int n, int k) {
  std::vector<unsigned> out;
  for (unsigned m = 0; m < (1u << n); ++m)
    if (std::popcount(m) == k) out.push_back(m);
  return out;
}

inline void configs_with(int npairs, int nsingle,
                         std::vector<TerminalConfig>& out) {
  const auto& vs = corner_grid().vertices();
  const int n = static_cast<int>(vs.size());
  for (unsigned m : subsets(n, 2 * npairs + nsingle)) {
    std::vector<Vertex> chosen;
    for (int i = 0; i < n; ++i)
      if (m & (1u << i)) chosen.push_back(vs[i]);
    const int c = static_cast<int>(chosen.size());
    for (unsigned sm : subsets(c, nsingle)) {
      TerminalConfig cfg;
      std::vector<Vertex> rest;
      for (int i = 0; i < c; ++i)
        (sm & (1u << i) ? cfg.singletons : rest).push_back(chosen[i]);
      std::vector<VertexPair> acc;
      std::vector<std::vector<VertexPair>> ms;
      matchings(rest, acc, ms);
      for (auto& mt : ms) {
        cfg.pairs = mt;
        out.push_back(cfg.canonical());
      }
    }
  }
}

}  // namespace detail

/// Every configuration of a lemma's family, canonical, sorted, no repeats.
inline std::vector<TerminalConfig> enumerate_configs(
    LemmaId lemma, EnumerationOptions opt = {}) {
  std::vector<TerminalConfig> out;
  switch (lemma) {
    case LemmaId::W2L:
      throw Error(ErrorCode::kInvalidArgument,
                  "w2l tuples are enumerated by check_weakly_2_linked");
    case LemmaId::HEAVY78:
      detail::configs_with(4, 0, out);
      detail::configs_with(3, 1, out);
      break;
    case LemmaId::HEAVY6:
      detail::configs_with(2, 2, out);
      if (opt.six_with_one_pair) detail::configs_with(1, 4, out);
      break;
    case LemmaId::HEAVY5:
      detail::configs_with(1, 3, out);
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Family of a config by shape, if it is one of the three.
inline std::optional<LemmaId> family_of(const TerminalConfig& cfg) {
  size_t p = cfg.pairs.size(), s = cfg.singletons.size();
  if ((p == 4 && s == 0) || (p == 3 && s == 1)) return LemmaId::HEAVY78;
  if (p == 2 && s == 2) return LemmaId::HEAVY6;
  if (p == 1 && s == 3) return LemmaId::HEAVY5;
  return std::nullopt;
}

// ---- JSON ------------------------------------------------------------------

inline nlohmann::json encode_vertex(Vertex v) {
  return nlohmann::json::array({v.row, v.col});
}

inline Vertex decode_vertex(const nlohmann::json& j, const std::string& at) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer())
    throw Error(ErrorCode::kMalformedConfig,
                at + ": expected [row, col], got " + j.dump());
  Vertex v{j[0].get<int>(), j[1].get<int>()};
  if (!corner_grid().has_vertex(v))
    throw Error(ErrorCode::kMalformedConfig,
                at + ": vertex out of range " + j.dump());
  return v;
}

inline nlohmann::json encode_path(const Path& p) {
  nlohmann::json j = nlohmann::json::array();
  for (Vertex v : p) j.push_back(encode_vertex(v));
  return j;
}

inline Path decode_path(const nlohmann::json& j, const std::string& at) {
  if (!j.is_array())
    throw Error(ErrorCode::kMalformedConfig, at + ": expected an array");
  Path p;
  for (size_t i = 0; i < j.size(); ++i)
    p.push_back(decode_vertex(j[i], at + "[" + std::to_string(i) + "]"));
  return p;
}

inline nlohmann::json encode_config(const TerminalConfig& cfg) {
  TerminalConfig c = cfg.canonical();
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [s, t] : c.pairs)
    pairs.push_back(nlohmann::json::array({encode_vertex(s), encode_vertex(t)}));
  nlohmann::json singles = nlohmann::json::array();
  for (Vertex v : c.singletons) singles.push_back(encode_vertex(v));
  return {{"pairs", pairs}, {"singletons", singles}};
}

inline TerminalConfig decode_config(const nlohmann::json& j) {
  if (!j.is_object())
    throw Error(ErrorCode::kMalformedConfig, "config must be a JSON object");
  TerminalConfig cfg;
  if (j.contains("pairs")) {
    const auto& ps = j.at("pairs");
    if (!ps.is_array())
      throw Error(ErrorCode::kMalformedConfig, "pairs: expected an array");
    for (size_t i = 0; i < ps.size(); ++i) {
      std::string at = "pairs[" + std::to_string(i) + "]";
      if (!ps[i].is_array() || ps[i].size() != 2)
        throw Error(ErrorCode::kMalformedConfig,
                    at + ": expected two vertices");
      cfg.pairs.push_back({decode_vertex(ps[i][0], at + "[0]"),
                           decode_vertex(ps[i][1], at + "[1]")});
    }
  }
  if (j.contains("singletons")) {
    const auto& ss = j.at("singletons");
    if (!ss.is_array())
      throw Error(ErrorCode::kMalformedConfig,
                  "singletons: expected an array");
    for (size_t i = 0; i < ss.size(); ++i)
      cfg.singletons.push_back(
          decode_vertex(ss[i], "singletons[" + std::to_string(i) + "]"));
  }
  check_config(cfg);
  return cfg.canonical();
}

inline TerminalConfig decode_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kMalformedConfig, e.what());
  }
  return decode_config(j);
}

inline TerminalConfig decode_config(const char* text) {
  return decode_config(std::string_view(text));
}

/// One compact encoded config per line.
inline void write_ndjson(std::ostream& os,
                         const std::vector<TerminalConfig>& cfgs) {
  for (const auto& c : cfgs) os << encode_config(c).dump() << '\n';
}

}  // namespace cornerescape

#endif  // CORNERESCAPE_TERMINALS_HPP
