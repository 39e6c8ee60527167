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

// Brute-force existence search for edge-disjoint trail systems.
//
// Everything is tiny (Q has 12 edges), so trails are precomputed once per
// grid shape and packed depth-first, with failed (depth, free-edge-mask)
// states memoised. Trails are tried in shortlex order, which makes every
// witness the first one in a fixed total order.

#ifndef CORNERESCAPE_ORACLE_HPP
#define CORNERESCAPE_ORACLE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cornerescape/grid.hpp"
#include "cornerescape/path_model.hpp"
#include "cornerescape/terminals.hpp"

namespace cornerescape {

struct Trail {
  Path path;
  EdgeMask mask = 0;
};

/// All edge-simple trails of a full rows x cols grid, bucketed by endpoints
/// and sorted shortlex. Trails of a subgraph are the ones whose mask fits.
class TrailIndex {
 public:
  explicit TrailIndex(const GridGraph& full) : g_(full) {
    const int n = g_.vertex_slots();
    buckets_.resize(static_cast<size_t>(n) * n);
    for (int s = 0; s < n; ++s) {
      Path p{g_.vertex_at(s)};
      grow(p, 0);
    }
    for (auto& b : buckets_)
      std::sort(b.begin(), b.end(), [](const Trail& x, const Trail& y) {
        if (x.path.size() != y.path.size())
          return x.path.size() < y.path.size();
        return x.path < y.path;
      });
  }

  const std::vector<Trail>& between(Vertex s, Vertex t) const {
    return buckets_[static_cast<size_t>(g_.vertex_id(s)) * g_.vertex_slots() +
                    g_.vertex_id(t)];
  }

  size_t size() const {
    size_t n = 0;
    for (const auto& b : buckets_) n += b.size();
    return n;
  }

 private:
  void grow(Path& p, EdgeMask used) {
    Vertex s = p.front(), t = p.back();
    buckets_[static_cast<size_t>(g_.vertex_id(s)) * g_.vertex_slots() +
             g_.vertex_id(t)]
        .push_back({p, used});
    for (Vertex w : g_.neighbors(t)) {
      EdgeMask b = GridGraph::bit(g_.edge_index(t, w));
      if (used & b) continue;
      p.push_back(w);
      grow(p, used | b);
      p.pop_back();
    }
  }

  GridGraph g_;
  std::vector<std::vector<Trail>> buckets_;
};

/// Shared index for the full grid of g's shape.
inline const TrailIndex& trail_index_for(const GridGraph& g) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<TrailIndex>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{g.rows(), g.cols()}];
  if (!slot) slot = std::make_unique<TrailIndex>(GridGraph(g.rows(), g.cols(), {}));
  return *slot;
}

struct SearchBudget {
  std::uint64_t max_nodes = 0;
  bool unlimited = true;

  static SearchBudget unbounded() { return {}; }
  static SearchBudget nodes(std::uint64_t n) { return {n, false}; }
};

/// One trail to route: from -> to, using only edges in `region`.
struct Demand {
  Vertex from;
  Vertex to;
  EdgeMask region = ~EdgeMask{0};
};

namespace detail {
struct BudgetHit {};
}  // namespace detail

/// Depth-first packing of edge-disjoint trails, one per demand.
class Packer {
 public:
  Packer(const GridGraph& g, SearchBudget budget = {})
      : g_(g), idx_(trail_index_for(g)), budget_(budget) {}

  /// Calls visit with every solution in order until it returns true.
  /// Returns whether visit stopped the search. Throws
  /// Error(BUDGET_EXHAUSTED) when the node cap is hit.
  bool for_each(const std::vector<Demand>& ds, EdgeMask free,
                const std::function<bool(const std::vector<const Trail*>&)>&
                    visit) {
    demands_ = ds;
    for (auto& d : demands_) d.region &= g_.edge_mask();
    failed_.clear();
    chosen_.assign(ds.size(), nullptr);
    visit_ = &visit;
    try {
      return dfs(0, free & g_.edge_mask()) == Outcome::kStopped;
    } catch (const detail::BudgetHit&) {
      throw Error(ErrorCode::kBudgetExhausted,
                  "node cap " + std::to_string(budget_.max_nodes) + " reached");
    }
  }

  /// First solution, if any.
  std::optional<std::vector<Path>> first(const std::vector<Demand>& ds,
                                         EdgeMask free) {
    std::optional<std::vector<Path>> out;
    for_each(ds, free, [&](const std::vector<const Trail*>& ts) {
      out.emplace();
      for (const Trail* t : ts) out->push_back(t->path);
      return true;
    });
    return out;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  enum class Outcome { kExhausted, kStopped, kSomeFound };

  // BFS distance from a to b over mask, or -1.
  int distance(Vertex a, Vertex b, EdgeMask mask) const {
    if (a == b) return 0;
    const int n = g_.vertex_slots();
    std::array<int, 64> dist;
    dist.fill(-1);
    std::array<int, 64> queue;
    int head = 0, tail = 0;
    dist[g_.vertex_id(a)] = 0;
    queue[tail++] = g_.vertex_id(a);
    while (head < tail) {
      int u = queue[head++];
      Vertex uv = g_.vertex_at(u);
      for (Vertex w : g_.neighbors(uv)) {
        int wi = g_.vertex_id(w);
        if (dist[wi] >= 0) continue;
        if (!(mask & GridGraph::bit(g_.edge_index(uv, w)))) continue;
        dist[wi] = dist[u] + 1;
        if (w == b) return dist[wi];
        queue[tail++] = wi;
      }
    }
    (void)n;
    return -1;
  }

  bool feasible(size_t k, EdgeMask free) const {
    int need = 0;
    for (size_t j = k; j < demands_.size(); ++j) {
      int d = distance(demands_[j].from, demands_[j].to,
                       free & demands_[j].region);
      if (d < 0) return false;
      need += d;
    }
    return need <= popcount(free);
  }

  Outcome dfs(size_t k, EdgeMask free) {
    if (k == demands_.size()) {
      return (*visit_)(chosen_) ? Outcome::kStopped : Outcome::kSomeFound;
    }
    auto memo = failed_.find(free);
    if (memo != failed_.end() && (memo->second >> k & 1u))
      return Outcome::kExhausted;
    if (!feasible(k, free)) {
      failed_[free] |= 1ull << k;
      return Outcome::kExhausted;
    }
    const Demand& d = demands_[k];
    const EdgeMask allowed = free & d.region;
    bool any = false;
    for (const Trail& t : idx_.between(d.from, d.to)) {
      if (t.mask & ~allowed) continue;
      if (!budget_.unlimited && ++nodes_ > budget_.max_nodes)
        throw detail::BudgetHit{};
      if (budget_.unlimited) ++nodes_;
      chosen_[k] = &t;
      Outcome o = dfs(k + 1, free & ~t.mask);
      if (o == Outcome::kStopped) return o;
      if (o == Outcome::kSomeFound) any = true;
    }
    chosen_[k] = nullptr;
    if (!any) failed_[free] |= 1ull << k;
    return any ? Outcome::kSomeFound : Outcome::kExhausted;
  }

  const GridGraph& g_;
  const TrailIndex& idx_;
  SearchBudget budget_;
  std::uint64_t nodes_ = 0;
  std::vector<Demand> demands_;
  std::vector<const Trail*> chosen_;
  std::unordered_map<EdgeMask, std::uint64_t> failed_;
  const std::function<bool(const std::vector<const Trail*>&)>* visit_ = nullptr;
};

/// Shortlex trails from s to t inside mask.
inline std::vector<Path> trails_within(const GridGraph& g, Vertex s, Vertex t,
                                       EdgeMask mask) {
  std::vector<Path> out;
  if (!g.has_vertex(s) || !g.has_vertex(t)) return out;
  mask &= g.edge_mask();
  for (const Trail& tr : trail_index_for(g).between(s, t))
    if (!(tr.mask & ~mask)) out.push_back(tr.path);
  return out;
}

// ---- oracle ----------------------------------------------------------------

enum class OracleStatus { kFound, kNone, kBudgetExhausted };

struct OracleResult {
  OracleStatus status = OracleStatus::kNone;
  std::optional<EscapePlan> plan;
  std::uint64_t nodes = 0;
  bool found() const { return status == OracleStatus::kFound; }
};

namespace detail {

inline void combinations(int n, int k, std::vector<int>& cur, int start,
                         std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, cur, i + 1, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Lexicographically first plan satisfying the contract, or kNone after the
/// whole space was searched.
inline OracleResult oracle_solve(const GridGraph& g, const TerminalConfig& cfg_in,
                                 const EscapeContract& contract,
                                 SearchBudget budget = {}) {
  const TerminalConfig cfg = cfg_in.canonical();
  for (Vertex v : cfg.terminals())
    if (!g.has_vertex(v))
      throw Error(ErrorCode::kMalformedConfig,
                  "terminal not in graph: " + to_string(v));
  std::vector<Vertex> exits;
  for (Vertex v : contract.exit_target)
    if (g.has_vertex(v)) exits.push_back(v);
  std::sort(exits.begin(), exits.end());

  Packer packer(g, budget);
  OracleResult res;
  const int np = static_cast<int>(cfg.pairs.size());
  try {
    for (int k = np; k >= std::max(0, contract.min_linked_pairs); --k) {
      std::vector<std::vector<int>> subsets;
      std::vector<int> cur;
      detail::combinations(np, k, cur, 0, subsets);
      for (const auto& sub : subsets) {
        std::vector<Vertex> escapees(cfg.singletons);
        for (int i = 0; i < np; ++i)
          if (std::find(sub.begin(), sub.end(), i) == sub.end()) {
            escapees.push_back(cfg.pairs[i].first);
            escapees.push_back(cfg.pairs[i].second);
          }
        std::sort(escapees.begin(), escapees.end());
        if (contract.exact_escapes &&
            static_cast<int>(escapees.size()) != *contract.exact_escapes)
          continue;
        if (escapees.size() > exits.size()) continue;

        std::vector<Vertex> assign(escapees.size());
        std::vector<bool> taken(exits.size(), false);
        std::optional<EscapePlan> found;
        std::function<void(size_t, int)> rec = [&](size_t i, int in_b) {
          if (found) return;
          if (i == escapees.size()) {
            std::vector<Demand> ds;
            for (int p : sub)
              ds.push_back({cfg.pairs[p].first, cfg.pairs[p].second});
            for (size_t e = 0; e < escapees.size(); ++e)
              ds.push_back({escapees[e], assign[e]});
            auto sol = packer.first(ds, g.edge_mask());
            if (!sol) return;
            EscapePlan plan;
            for (size_t j = 0; j < sub.size(); ++j)
              plan.linkages.push_back({sub[j], (*sol)[j]});
            for (size_t e = 0; e < escapees.size(); ++e)
              plan.escapes.push_back(
                  {escapees[e], assign[e], (*sol)[sub.size() + e]});
            found = plan;
            return;
          }
          for (size_t x = 0; x < exits.size(); ++x) {
            if (taken[x]) continue;
            int nb = in_b + (in_B_minus_A(exits[x]) ? 1 : 0);
            if (contract.max_exits_in_B_minus_A &&
                nb > *contract.max_exits_in_B_minus_A)
              continue;
            taken[x] = true;
            assign[i] = exits[x];
            rec(i + 1, nb);
            taken[x] = false;
            if (found) return;
          }
        };
        rec(0, 0);
        if (found) {
          Verdict v = validate_plan(g, cfg, *found, contract);
          if (!v.ok())
            throw std::logic_error("oracle produced an invalid plan: " +
                                   v.violations.front().message);
          res.status = OracleStatus::kFound;
          res.plan = *found;
          res.nodes = packer.nodes();
          return res;
        }
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBudgetExhausted) throw;
    res.status = OracleStatus::kBudgetExhausted;
    res.nodes = packer.nodes();
    return res;
  }
  res.status = OracleStatus::kNone;
  res.nodes = packer.nodes();
  return res;
}

// ---- weak 2-linkage --------------------------------------------------------

struct W2LResult {
  bool ok = true;
  std::uint64_t tuples = 0;
  std::optional<std::array<Vertex, 4>> counterexample;
};

/// Exhaustive over ordered 4-tuples (u1, v1, u2, v2) of g's vertices.
inline W2LResult check_weakly_2_linked(const GridGraph& g) {
  W2LResult r;
  Packer packer(g);
  const auto& vs = g.vertices();
  for (Vertex u1 : vs)
    for (Vertex v1 : vs)
      for (Vertex u2 : vs)
        for (Vertex v2 : vs) {
          ++r.tuples;
          if (r.ok && !packer.first({{u1, v1}, {u2, v2}}, g.edge_mask())) {
            r.ok = false;
            r.counterexample = std::array<Vertex, 4>{u1, v1, u2, v2};
          }
        }
  return r;
}

}  // namespace cornerescape

#endif  // CORNERESCAPE_ORACLE_HPP
