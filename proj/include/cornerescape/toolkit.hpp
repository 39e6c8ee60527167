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

// Construction primitives: a mutable routing context that tracks consumed
// edges and where each terminal currently sits, plus linking in a
// weakly 2-linked graph, shifting along L, clips and frames.

#ifndef CORNERESCAPE_TOOLKIT_HPP
#define CORNERESCAPE_TOOLKIT_HPP

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cornerescape/grid.hpp"
#include "cornerescape/oracle.hpp"
#include "cornerescape/path_model.hpp"
#include "cornerescape/terminals.hpp"

namespace cornerescape {

class RoutingContext {
 public:
  enum class State { kOpen, kLinked, kEscaped };

  struct Terminal {
    Vertex origin;
    Vertex pos;
    int pair = -1;     // canonical pair index, -1 for a singleton
    int partner = -1;  // terminal id of the other member
    std::vector<Path> fragments;
    State state = State::kOpen;
  };

  RoutingContext(const GridGraph& g, const TerminalConfig& cfg)
      : g_(&g), cfg_(cfg.canonical()), free_(g.edge_mask()) {
    for (Vertex v : cfg_.terminals()) {
      Terminal t;
      t.origin = t.pos = v;
      t.pair = cfg_.pair_of(v);
      terms_.push_back(t);
    }
    for (auto& t : terms_)
      if (t.pair >= 0) {
        const auto& [s, u] = cfg_.pairs[t.pair];
        t.partner = id_of(t.origin == s ? u : s);
      }
  }

  const GridGraph& graph() const { return *g_; }
  const TerminalConfig& config() const { return cfg_; }
  EdgeMask free_edges() const { return free_; }
  const std::set<Vertex>& reserved_exits() const { return reserved_; }
  int size() const { return static_cast<int>(terms_.size()); }
  const Terminal& terminal(int id) const { return terms_.at(id); }
  Vertex pos(int id) const { return terms_.at(id).pos; }
  bool open(int id) const { return terms_.at(id).state == State::kOpen; }

  /// Terminal whose origin is v, or -1.
  int id_of(Vertex origin) const {
    for (size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].origin == origin) return static_cast<int>(i);
    return -1;
  }

  /// The first unresolved terminal currently at v, or -1. A shifted
  /// terminal may share a vertex with one that is about to be linked.
  int at(Vertex v) const {
    for (size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].state == State::kOpen && terms_[i].pos == v)
        return static_cast<int>(i);
    return -1;
  }

  std::vector<int> unresolved() const {
    std::vector<int> out;
    for (size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].state == State::kOpen) out.push_back(static_cast<int>(i));
    return out;
  }

  /// A vertex of L hosting no unresolved terminal and not taken as an exit.
  bool is_free(Vertex v) const {
    if (!in_L(v) || reserved_.count(v)) return false;
    for (const auto& t : terms_)
      if (t.state == State::kOpen && t.pos == v) return false;
    return true;
  }

  bool edges_free(const Path& p) const {
    return !(g_->mask_of(p) & ~free_) && edge_simple(p);
  }

  /// Walks terminal id along p (which must start at its position).
  void move(int id, const Path& p) {
    Terminal& t = terms_.at(id);
    if (t.state != State::kOpen)
      throw Error(ErrorCode::kInvalidArgument, "terminal already resolved");
    if (p.empty() || p.front() != t.pos)
      throw Error(ErrorCode::kInvalidArgument,
                  "path " + to_string(p) + " does not start at " +
                      to_string(t.pos));
    consume(p);
    if (p.size() > 1) t.fragments.push_back(p);
    t.pos = p.back();
  }

  /// Links pair with a path joining its members' current positions.
  Path link(int pair, Path middle) {
    int a = id_of(cfg_.pairs.at(pair).first), b = terms_[a].partner;
    if (!open(a) || !open(b))
      throw Error(ErrorCode::kInvalidArgument, "pair already resolved");
    if (!middle.empty() && middle.front() == pos(b) && middle.back() == pos(a) &&
        pos(a) != pos(b))
      middle = reversed(middle);
    if (middle.empty() || middle.front() != pos(a) || middle.back() != pos(b))
      throw Error(ErrorCode::kInvalidArgument,
                  "linking path " + to_string(middle) + " misses the pair");
    consume(middle);
    Path trail = trail_of(a);
    trail = concat(trail, middle);
    trail = concat(trail, reversed(trail_of(b)));
    terms_[a].state = terms_[b].state = State::kLinked;
    linkages_.push_back({pair, trail});
    return trail;
  }

  /// Terminal id stops at its current position, which becomes its exit.
  void escape(int id) {
    Terminal& t = terms_.at(id);
    if (t.state != State::kOpen)
      throw Error(ErrorCode::kInvalidArgument, "terminal already resolved");
    if (!in_L(t.pos))
      throw Error(ErrorCode::kNotOnL,
                  "cannot exit at " + to_string(t.pos));
    if (exits_.count(t.pos))
      throw Error(ErrorCode::kInvalidArgument,
                  "exit " + to_string(t.pos) + " already used");
    exits_.insert(t.pos);
    reserved_.insert(t.pos);
    t.state = State::kEscaped;
  }

  void reserve(Vertex v) { reserved_.insert(v); }

  int exits_in_B_minus_A() const {
    int n = 0;
    for (Vertex v : exits_) n += in_B_minus_A(v) ? 1 : 0;
    return n;
  }

  /// Walk from origin to current position.
  Path trail_of(int id) const {
    const Terminal& t = terms_.at(id);
    Path p{t.origin};
    for (const Path& f : t.fragments) p = concat(p, f);
    return p;
  }

  bool resolved() const { return unresolved().empty(); }

  EscapePlan to_plan() const {
    if (!resolved())
      throw Error(ErrorCode::kCaseGap, "unresolved terminals remain");
    EscapePlan plan;
    plan.linkages = linkages_;
    for (size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].state == State::kEscaped)
        plan.escapes.push_back({terms_[i].origin, terms_[i].pos,
                                trail_of(static_cast<int>(i))});
    plan.sort();
    return plan;
  }

  /// Fragments edge-simple and pairwise disjoint, and they account for every
  /// consumed edge.
  void self_check() const {
    EdgeMask seen = 0;
    auto take = [&](const Path& p) {
      EdgeMask m = g_->mask_of(p);
      if ((m & seen) || !edge_simple(p))
        throw std::logic_error("routing context reuses an edge");
      seen |= m;
    };
    for (size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].state != State::kLinked) take(trail_of(static_cast<int>(i)));
    for (const auto& l : linkages_) take(l.path);
    if ((seen | free_) != g_->edge_mask() || (seen & free_))
      throw std::logic_error("routing context lost track of an edge");
  }

 private:
  bool edge_simple(const Path& p) const {
    std::set<Edge> es;
    for (size_t i = 1; i < p.size(); ++i)
      if (!es.insert(Edge::make(p[i - 1], p[i])).second) return false;
    return true;
  }

  void consume(const Path& p) {
    EdgeMask m = g_->mask_of(p);
    if ((m & ~free_) || !edge_simple(p))
      throw Error(ErrorCode::kInvalidArgument,
                  "edges not free for " + to_string(p));
    free_ &= ~m;
  }

  const GridGraph* g_;
  TerminalConfig cfg_;
  EdgeMask free_;
  std::vector<Terminal> terms_;
  std::vector<Linkage> linkages_;
  std::set<Vertex> exits_;
  std::set<Vertex> reserved_;
};

// ---- weak 2-linkage --------------------------------------------------------

/// Edge-disjoint u1-v1 and u2-v2 trails in g, first in shortlex order.
/// `free` restricts the edges (defaults to all of g).
inline std::pair<Path, Path> link_pairs_in_subgraph(
    const GridGraph& g, Vertex u1, Vertex v1, Vertex u2, Vertex v2,
    std::optional<EdgeMask> free = std::nullopt) {
  Packer packer(g);
  auto sol = packer.first({{u1, v1}, {u2, v2}}, free.value_or(g.edge_mask()));
  if (!sol)
    throw Error(ErrorCode::kInvalidArgument,
                "no edge-disjoint linkage for " + to_string(u1) + "," +
                    to_string(v1) + " / " + to_string(u2) + "," + to_string(v2));
  return {(*sol)[0], (*sol)[1]};
}

// ---- shifting --------------------------------------------------------------

/// Moves the unresolved terminal at u to v along L.
inline RoutingContext& shift(RoutingContext& ctx, Vertex u, Vertex v) {
  if (!in_L(u) || !in_L(v))
    throw Error(ErrorCode::kNotOnL,
                "shift " + to_string(u) + "->" + to_string(v));
  int id = ctx.at(u);
  if (id < 0)
    throw Error(ErrorCode::kInvalidArgument,
                "no terminal to shift at " + to_string(u));
  Path p = unique_L_path(u, v);
  if (!ctx.edges_free(p))
    throw Error(ErrorCode::kShiftBlocked, "L-path " + to_string(p) +
                                              " is partly consumed");
  ctx.move(id, p);
  return ctx;
}

// ---- clips -----------------------------------------------------------------

enum class ClipKind { AA, AB };

struct ClipSpec {
  std::string name;
  std::vector<Edge> edges;
  Vertex u;
  Vertex v;
  ClipKind kind = ClipKind::AA;
  // Where the two terminals may sit; empty = anywhere on the clip. Some
  // drawn clips only serve terminals inside S.
  std::vector<Vertex> domain;

  std::vector<Vertex> covered() const {
    std::set<Vertex> s;
    for (const Edge& e : edges) {
      s.insert(e.a);
      s.insert(e.b);
    }
    return {s.begin(), s.end()};
  }
};

inline nlohmann::json encode_clip(const ClipSpec& c) {
  nlohmann::json es = nlohmann::json::array();
  for (const Edge& e : c.edges)
    es.push_back(nlohmann::json::array({encode_vertex(e.a), encode_vertex(e.b)}));
  nlohmann::json j = {{"name", c.name},
          {"u", encode_vertex(c.u)},
          {"v", encode_vertex(c.v)},
          {"kind", c.kind == ClipKind::AA ? "AA" : "AB"},
          {"edges", es}};
  if (!c.domain.empty()) {
    nlohmann::json d = nlohmann::json::array();
    for (Vertex v : c.domain) d.push_back(encode_vertex(v));
    j["domain"] = d;
  }
  return j;
}

inline ClipSpec decode_clip(const nlohmann::json& j) {
  ClipSpec c;
  try {
    c.name = j.at("name").get<std::string>();
    c.u = decode_vertex(j.at("u"), c.name + ".u");
    c.v = decode_vertex(j.at("v"), c.name + ".v");
    std::string kind = j.at("kind").get<std::string>();
    if (kind != "AA" && kind != "AB")
      throw Error(ErrorCode::kMalformedConfig, c.name + ": kind must be AA or AB");
    c.kind = kind == "AA" ? ClipKind::AA : ClipKind::AB;
    for (size_t i = 0; i < j.at("edges").size(); ++i) {
      const auto& e = j.at("edges")[i];
      std::string at = c.name + ".edges[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() != 2)
        throw Error(ErrorCode::kMalformedConfig, at + ": expected two vertices");
      Vertex a = decode_vertex(e[0], at), b = decode_vertex(e[1], at);
      if (!adjacent(a, b))
        throw Error(ErrorCode::kMalformedConfig, at + ": not adjacent");
      c.edges.push_back(Edge::make(a, b));
    }
    if (j.contains("domain"))
      for (const auto& d : j.at("domain"))
        c.domain.push_back(decode_vertex(d, c.name + ".domain"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedConfig, std::string("clip: ") + e.what());
  }
  std::sort(c.edges.begin(), c.edges.end());
  std::sort(c.domain.begin(), c.domain.end());
  return c;
}

inline std::vector<ClipSpec> decode_clip_catalog(const nlohmann::json& j) {
  if (!j.is_array())
    throw Error(ErrorCode::kMalformedConfig, "clip catalog must be an array");
  std::vector<ClipSpec> out;
  for (const auto& e : j) out.push_back(decode_clip(e));
  return out;
}

struct ClipVerdict {
  bool ok = true;
  std::vector<std::string> problems;
  std::optional<std::pair<Vertex, Vertex>> witness;  // first pair that fails
};

/// Brute force: every two distinct covered vertices (within the domain, if
/// one is given) can be mated to u and v
/// edge-disjointly inside the clip, in one of the two assignments.
inline ClipVerdict verify_clip(const GridGraph& g, const ClipSpec& clip) {
  ClipVerdict r;
  auto fail = [&](std::string s) {
    r.ok = false;
    r.problems.push_back(clip.name + ": " + std::move(s));
  };
  EdgeMask mask = 0;
  for (const Edge& e : clip.edges) {
    if (!g.has_edge(e.a, e.b)) {
      fail("edge not in graph " + to_string(e));
      continue;
    }
    mask |= GridGraph::bit(g.edge_index(e));
  }
  if (!in_L(clip.u) || !in_L(clip.v)) fail("anchor off L");
  if (clip.u == clip.v) fail("anchors coincide");
  bool aa = in_A(clip.u) && in_A(clip.v);
  bool ab = in_B_minus_A(clip.u) != in_B_minus_A(clip.v);
  if (clip.kind == ClipKind::AA && !aa) fail("AA clip needs both anchors in A");
  if (clip.kind == ClipKind::AB && !ab)
    fail("AB clip needs exactly one anchor in B\\A");
  auto cov = clip.covered();
  if (!std::binary_search(cov.begin(), cov.end(), clip.u) ||
      !std::binary_search(cov.begin(), cov.end(), clip.v))
    fail("anchor not covered by the clip");
  if (!r.ok) return r;
  std::vector<Vertex> where;
  for (Vertex x : cov)
    if (clip.domain.empty() ||
        std::binary_search(clip.domain.begin(), clip.domain.end(), x))
      where.push_back(x);
  Packer packer(g);
  for (size_t i = 0; i < where.size(); ++i)
    for (size_t j = i + 1; j < where.size(); ++j) {
      Vertex x = where[i], y = where[j];
      if (!packer.first({{x, clip.u}, {y, clip.v}}, mask) &&
          !packer.first({{y, clip.u}, {x, clip.v}}, mask)) {
        fail("no mating for " + to_string(x) + "," + to_string(y));
        if (!r.witness) r.witness = {{x, y}};
      }
    }
  return r;
}

/// Mates the unresolved terminals `ids` into distinct exits inside `region`
/// (intersected with the free edges). Exit tuples are tried in the given
/// order, and for each tuple every assignment of terminals to exits in
/// lexicographic order. Exits must be free vertices, or the current
/// position of the terminal sent there. On success the terminals are moved
/// and escaped. Returns false and leaves ctx untouched otherwise.
inline bool mate_group(RoutingContext& ctx, const std::vector<int>& ids,
                       const std::vector<std::vector<Vertex>>& exit_options,
                       EdgeMask region) {
  const GridGraph& g = ctx.graph();
  const EdgeMask free = ctx.free_edges() & region;
  Packer packer(g);
  for (const auto& exits : exit_options) {
    if (exits.size() != ids.size()) continue;
    std::vector<int> perm(ids.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    do {
      bool usable = true;
      for (size_t i = 0; i < ids.size() && usable; ++i) {
        // an exit held by a terminal of the group is vacated by it
        Vertex x = exits[perm[i]];
        int occ = ctx.at(x);
        usable = in_L(x) && !ctx.reserved_exits().count(x) &&
                 (occ < 0 ||
                  std::find(ids.begin(), ids.end(), occ) != ids.end());
      }
      if (!usable) continue;
      std::vector<Demand> ds;
      for (size_t i = 0; i < ids.size(); ++i)
        ds.push_back({ctx.pos(ids[i]), exits[perm[i]]});
      auto sol = packer.first(ds, free);
      if (!sol) continue;
      for (size_t i = 0; i < ids.size(); ++i) ctx.move(ids[i], (*sol)[i]);
      for (int id : ids) ctx.escape(id);
      return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return false;
}

inline EdgeMask clip_mask(const GridGraph& g, const ClipSpec& clip) {
  return g.mask_of_edges(clip.edges);
}

/// Sends the unresolved terminals at x and y to the clip's anchors.
inline RoutingContext& mate_through_clip(RoutingContext& ctx,
                                         const ClipSpec& clip, Vertex x,
                                         Vertex y) {
  EdgeMask m = clip_mask(ctx.graph(), clip);
  if (m & ~ctx.free_edges())
    throw Error(ErrorCode::kClipFailed, clip.name + ": clip edges already used");
  int a = ctx.at(x), b = ctx.at(y);
  if (a < 0 || b < 0 || a == b)
    throw Error(ErrorCode::kClipFailed,
                clip.name + ": no two terminals at " + to_string(x) + "," +
                    to_string(y));
  auto cov = clip.covered();
  if (!std::binary_search(cov.begin(), cov.end(), x) ||
      !std::binary_search(cov.begin(), cov.end(), y))
    throw Error(ErrorCode::kClipFailed, clip.name + ": terminal outside clip");
  if (!mate_group(ctx, {a, b}, {{clip.u, clip.v}}, m))
    throw Error(ErrorCode::kClipFailed,
                clip.name + ": cannot mate " + to_string(x) + "," +
                    to_string(y));
  return ctx;
}

// ---- frames ----------------------------------------------------------------

struct FrameSpec {
  std::vector<Vertex> cycle;  // closed: last vertex adjacent to the first
  Vertex anchor;
  std::array<Path, 2> attach;  // pair member -> anchor
};

/// Links both pairs of a frame: attach_i, then an arc of the cycle, then the
/// reversed mate_i. The landing nearer clockwise goes clockwise.
inline std::pair<Path, Path> complete_frame(RoutingContext& ctx,
                                            const FrameSpec& frame,
                                            std::array<int, 2> pairs,
                                            const Path& mate1,
                                            const Path& mate2) {
  const GridGraph& g = ctx.graph();
  const int n = static_cast<int>(frame.cycle.size());
  auto idx = [&](Vertex v) {
    for (int i = 0; i < n; ++i)
      if (frame.cycle[i] == v) return i;
    return -1;
  };
  const int ax = idx(frame.anchor);
  if (n < 3 || ax < 0)
    throw Error(ErrorCode::kFrameConflict, "anchor not on cycle");
  EdgeMask cyc = 0;
  for (int i = 0; i < n; ++i) {
    Vertex a = frame.cycle[i], b = frame.cycle[(i + 1) % n];
    if (!g.has_edge(a, b))
      throw Error(ErrorCode::kFrameConflict, "cycle is not closed in the grid");
    cyc |= GridGraph::bit(g.edge_index(a, b));
  }
  std::array<Path, 2> mates{mate1, mate2};
  std::array<int, 2> d{};
  for (int i = 0; i < 2; ++i) {
    const Path& at = frame.attach[i];
    if (at.empty() || at.back() != frame.anchor)
      throw Error(ErrorCode::kFrameConflict, "attach path misses the anchor");
    if (g.mask_of(at) & cyc)
      throw Error(ErrorCode::kFrameConflict, "attach path uses cycle edges");
    if (mates[i].empty() || idx(mates[i].back()) < 0)
      throw Error(ErrorCode::kFrameConflict, "mate does not land on the cycle");
    if (g.mask_of(mates[i]) & cyc)
      throw Error(ErrorCode::kFrameConflict, "mate path uses cycle edges");
  }
  if (cyc & ~ctx.free_edges())
    throw Error(ErrorCode::kFrameConflict, "cycle edges already used");
  std::array<int, 2> member{}, other{};
  for (int i = 0; i < 2; ++i) {
    member[i] = ctx.at(frame.attach[i].front());
    if (member[i] < 0 || ctx.terminal(member[i]).pair != pairs[i])
      throw Error(ErrorCode::kFrameConflict, "attach path does not start at the pair");
    other[i] = ctx.terminal(member[i]).partner;
    if (ctx.pos(other[i]) != mates[i].front())
      throw Error(ErrorCode::kFrameConflict, "mate does not start at the partner");
  }
  for (int i = 0; i < 2; ++i) {
    ctx.move(member[i], frame.attach[i]);
    ctx.move(other[i], mates[i]);
    d[i] = ((idx(mates[i].back()) - ax) % n + n) % n;
  }
  auto arc = [&](int to, bool cw) {
    Path p{frame.cycle[ax]};
    int k = ax;
    while (k != to) {
      k = cw ? (k + 1) % n : (k - 1 + n) % n;
      p.push_back(frame.cycle[k]);
    }
    return p;
  };
  // nearer landing clockwise, the other counter-clockwise: arcs never meet
  bool first_cw = d[0] <= d[1];
  Path arc0 = arc(idx(mates[0].back()), first_cw);
  Path arc1 = arc(idx(mates[1].back()), !first_cw);
  if (g.mask_of(arc0) & g.mask_of(arc1))
    throw Error(ErrorCode::kFrameConflict, "arcs overlap");
  Path l0 = ctx.link(pairs[0], arc0);
  Path l1 = ctx.link(pairs[1], arc1);
  return {l0, l1};
}

}  // namespace cornerescape

#endif  // CORNERESCAPE_TOOLKIT_HPP
