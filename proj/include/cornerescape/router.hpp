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

// Constructive routers for the three escape families. Each follows a fixed
// case tree; every branch leaves a label in the trace. Details a case leaves
// open ("a path in S", "a free vertex") are filled by the first candidate in
// shortlex / (row, col) order inside the subgraph the case names.
//
// Branches labelled ".../patch/..." cover configurations no case of the
// argument reaches; they use the same tools and are reported separately.

#ifndef CORNERESCAPE_ROUTER_HPP
#define CORNERESCAPE_ROUTER_HPP

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cornerescape/clip_catalog.hpp"
#include "cornerescape/grid.hpp"
#include "cornerescape/oracle.hpp"
#include "cornerescape/path_model.hpp"
#include "cornerescape/terminals.hpp"
#include "cornerescape/toolkit.hpp"

namespace cornerescape {

struct CaseTrace {
  LemmaId lemma = LemmaId::HEAVY78;
  std::vector<std::string> case_labels;
  bool used_fallback = false;
  bool symmetry_applied = false;
  friend bool operator==(const CaseTrace&, const CaseTrace&) = default;
};

struct CaseInfo {
  std::string label;
  bool patch = false;  // outside the written argument
};

/// Every branch label a router can emit, per family. Labels in a trace may
/// carry a further "/<clip>" suffix.
inline const std::vector<CaseInfo>& case_catalog(LemmaId lemma) {
  static const std::vector<CaseInfo> h78 = {
      {"heavy78/case-a/pair-in-S"},
      {"heavy78/case-a/weak-linkage"},
      {"heavy78/case-a/singleton-in-S"},
      {"heavy78/case-b/pair-and-member"},
      {"heavy78/case-b/pair-and-singleton"},
      {"heavy78/case-b/frame-square"},
      {"heavy78/case-b/frame-square-singleton-corner"},
      {"heavy78/case-b/hexagon"},
      {"heavy78/case-c/two-pairs"},
      {"heavy78/case-c/pair-and-two"},
      {"heavy78/case-c/frame-square"},
      {"heavy78/case-c/hexagon-top"},
      {"heavy78/case-c/direct"},
  };
  static const std::vector<CaseInfo> h6 = {
      {"heavy6/case-a/L-linkage"},
      {"heavy6/case-a/pair-in-A"},
      {"heavy6/case-b/S2"},
      {"heavy6/case-b/pair-on-L"},
      {"heavy6/case-b/S3"},
      {"heavy6/case-b/S4"},
      {"heavy6/case-c/S2/w-in-A"},
      {"heavy6/case-c/S2/w-in-B"},
      {"heavy6/case-c/S3/t2-in-B"},
      {"heavy6/case-c/S3/t2-in-A"},
      {"heavy6/case-d/S2/ab-bent"},
      {"heavy6/case-d/S2/corner-pair"},
      {"heavy6/case-d/S3/t2-in-A"},
      {"heavy6/case-d/S3/t2-in-B"},
      {"heavy6/S2/singletons-in-S"},
      {"heavy6/S2/members-in-S"},
      {"heavy6/S2/member-singleton/w-in-A"},
      {"heavy6/S2/member-singleton/t1-in-A"},
      {"heavy6/S2/member-singleton/B-side"},
      {"heavy6/S3/two-members/no-B-terminal"},
      {"heavy6/S3/two-members/B-pair"},
      {"heavy6/S3/two-members/corner-free"},
      {"heavy6/S3/two-members/corner-taken"},
      {"heavy6/S3/two-members/B-full"},
      {"heavy6/S3/one-member/B-full"},
      {"heavy6/S3/one-member/corner-free"},
      {"heavy6/S3/one-member/corner-taken"},
      {"heavy6/S4/A-A"},
      {"heavy6/S4/B-B"},
      {"heavy6/S4/corner"},
      {"heavy6/S4/B-A"},
      {"heavy6/patch/b-S3-shift-blocks", true},
      {"heavy6/patch/d-S2-pair-off-corner", true},
      {"heavy6/patch/d-S3-partner-at-corner", true},
  };
  static const std::vector<CaseInfo> h5 = {
      {"heavy5/case-a/S2"},
      {"heavy5/case-a/S2/release-B"},
      {"heavy5/case-a/S3"},
      {"heavy5/case-a/S4/corner-free"},
      {"heavy5/case-a/S4/corner-linked"},
      {"heavy5/case-b/L-linkage"},
      {"heavy5/case-b/L-linkage/S-escape"},
      {"heavy5/case-b/member-in-S/t1-in-B"},
      {"heavy5/case-b/member-in-S/push"},
      {"heavy5/case-b/member-in-S/direct"},
      {"heavy5/case-c"},
      {"heavy5/case-d/S2"},
      {"heavy5/case-d/S3"},
      {"heavy5/case-e/L-pair/S3"},
      {"heavy5/case-e/L-pair/S2/aa"},
      {"heavy5/case-e/L-pair/S2/ab"},
      {"heavy5/case-e/member-in-S/S2"},
      {"heavy5/case-e/member-in-S/S3/t1-in-B"},
      {"heavy5/case-e/member-in-S/S3/t1-in-A"},
      {"heavy5/case-e/member-in-S/S3/t1-in-A/ab"},
      {"heavy5/patch/a-S3-no-free-A", true},
      {"heavy5/patch/e-S2-B-full", true},
      {"heavy5/patch/S4-partner-on-L", true},
  };
  static const std::vector<CaseInfo> none;
  switch (lemma) {
    case LemmaId::HEAVY78: return h78;
    case LemmaId::HEAVY6: return h6;
    case LemmaId::HEAVY5: return h5;
    case LemmaId::W2L: break;
  }
  return none;
}

/// True if `label` is `base` or `base` followed by a "/..." suffix.
inline bool label_matches(const std::string& label, const std::string& base) {
  return label == base ||
         (label.size() > base.size() && label.compare(0, base.size(), base) == 0 &&
          label[base.size()] == '/');
}

/// The catalog entry a trace label belongs to (longest match), or nullptr.
inline const CaseInfo* case_of(LemmaId lemma, const std::string& label) {
  const CaseInfo* best = nullptr;
  for (const CaseInfo& c : case_catalog(lemma))
    if (label_matches(label, c.label) &&
        (!best || c.label.size() > best->label.size()))
      best = &c;
  return best;
}

namespace detail {

/// Asks the caller to route the transposed configuration instead.
struct ReflectRequest {};

inline EdgeMask row_edges(const GridGraph& g, int i) {
  EdgeMask m = 0;
  for (int c = 1; c < g.cols(); ++c)
    m |= GridGraph::bit(g.edge_index(Vertex{i, c}, Vertex{i, c + 1}));
  return m & g.edge_mask();
}

inline EdgeMask col_edges(const GridGraph& g, int j) {
  EdgeMask m = 0;
  for (int r = 1; r < g.rows(); ++r)
    m |= GridGraph::bit(g.edge_index(Vertex{r, j}, Vertex{r + 1, j}));
  return m & g.edge_mask();
}

inline EdgeMask edge_bit(const GridGraph& g, Vertex a, Vertex b) {
  return GridGraph::bit(g.edge_index(a, b));
}

inline std::vector<Vertex> S_vertices() {
  return {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
}

inline int manhattan(Vertex a, Vertex b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

/// One routing job: a context plus the labels collected on the way.
class Job {
 public:
  Job(const GridGraph& g, const TerminalConfig& cfg, LemmaId lemma)
      : ctx(g, cfg), lemma_(lemma), contract_(contract_for(lemma)) {}

  RoutingContext ctx;

  const GridGraph& g() const { return ctx.graph(); }
  const TerminalConfig& cfg() const { return ctx.config(); }
  const std::vector<std::string>& labels() const { return labels_; }

  void label(const std::string& s) {
    labels_.push_back(std::string(to_string(lemma_)) + "/" + s);
  }
  /// Appends "/suffix" to the latest label.
  void refine(const std::string& suffix) {
    if (labels_.empty()) label(suffix);
    else labels_.back() += "/" + suffix;
  }

  [[noreturn]] void gap(const std::string& why) const {
    throw Error(ErrorCode::kCaseGap,
                (labels_.empty() ? std::string(to_string(lemma_))
                                 : labels_.back()) +
                    ": " + why);
  }

  // ---- regions ----
  EdgeMask all() const { return g().edge_mask(); }
  EdgeMask row(int i) const { return row_edges(g(), i); }
  EdgeMask col(int j) const { return col_edges(g(), j); }
  EdgeMask A() const { return row(3); }
  EdgeMask B() const { return col(3); }
  EdgeMask edge(Vertex a, Vertex b) const { return edge_bit(g(), a, b); }
  EdgeMask induced(const std::vector<Vertex>& vs) const {
    return g().induced(vs);
  }
  EdgeMask S() const { return induced(S_vertices()); }
  EdgeMask without(EdgeMask m, Vertex v) const {
    for (Vertex w : g().neighbors(v)) m &= ~edge(v, w);
    return m;
  }
  EdgeMask mask(const Path& p) const { return g().mask_of(p); }

  // ---- terminals ----
  /// Open terminal at v; a case gap if there is none.
  int at(Vertex v) const {
    int id = ctx.at(v);
    if (id < 0) gap("no open terminal at " + to_string(v));
    return id;
  }
  bool occupied(Vertex v) const { return ctx.at(v) >= 0; }
  bool is_free(Vertex v) const { return ctx.is_free(v); }
  int pair_of_id(int id) const { return ctx.terminal(id).pair; }
  int pair_at(Vertex v) const { return pair_of_id(at(v)); }
  bool is_member(Vertex origin) const { return cfg().pair_of(origin) >= 0; }
  Vertex partner(Vertex origin) const {
    int p = cfg().pair_of(origin);
    if (p < 0) gap(to_string(origin) + " is a singleton");
    const auto& [a, b] = cfg().pairs[p];
    return a == origin ? b : a;
  }
  Vertex pos_of(Vertex origin) const { return ctx.pos(ctx.id_of(origin)); }
  /// Current positions of both members of pair p.
  std::pair<Vertex, Vertex> ends(int p) const {
    const auto& [a, b] = cfg().pairs.at(p);
    return {pos_of(a), pos_of(b)};
  }
  std::vector<Vertex> origins_where(bool (*pred)(Vertex)) const {
    std::vector<Vertex> out;
    for (Vertex v : cfg().terminals())
      if (pred(v)) out.push_back(v);
    return out;
  }
  /// Open terminals currently in B\A.
  int open_in_B_minus_A() const {
    int n = 0;
    for (int id : ctx.unresolved()) n += in_B_minus_A(ctx.pos(id)) ? 1 : 0;
    return n;
  }
  std::vector<Vertex> free_in(bool (*pred)(Vertex)) const {
    std::vector<Vertex> out;
    for (Vertex v : g().vertices())
      if (pred(v) && is_free(v)) out.push_back(v);
    return out;
  }

  // ---- paths ----
  std::vector<Path> paths(Vertex a, Vertex b, EdgeMask region) const {
    return trails_within(g(), a, b, region & ctx.free_edges());
  }
  Path first_path(Vertex a, Vertex b, EdgeMask region) const {
    auto ps = paths(a, b, region);
    if (ps.empty())
      gap("no path " + to_string(a) + "->" + to_string(b) + " in region");
    return ps.front();
  }
  std::optional<std::vector<Path>> pack(const std::vector<Demand>& ds) const {
    Packer packer(g());
    return packer.first(ds, ctx.free_edges());
  }

  // ---- moves ----
  Path link_via(int pair, const Path& p) { return ctx.link(pair, p); }
  Path link_in(int pair, EdgeMask region) {
    auto [a, b] = ends(pair);
    return ctx.link(pair, first_path(a, b, region));
  }
  Path link_along_L(int pair) {
    auto [a, b] = ends(pair);
    return ctx.link(pair, unique_L_path(a, b));
  }
  void escape_via(int id, const Path& p) {
    ctx.move(id, p);
    ctx.escape(id);
  }
  void shift(Vertex u, Vertex v) { cornerescape::shift(ctx, u, v); }

  /// Pushes the terminals from L position `from` towards (3,1), each one
  /// step, up to the first vertex of A that hosts no open terminal.
  void push_into_A(Vertex from) {
    int k0 = l_position(from);
    int stop = -1;
    for (int k = std::max(k0 + 1, 2); k < 5; ++k)
      if (!occupied(kLOrder[k]) && !ctx.reserved_exits().count(kLOrder[k])) {
        stop = k;
        break;
      }
    if (stop < 0) gap("no free vertex in A to push into");
    for (int k = stop; k > k0; --k)
      if (occupied(kLOrder[k - 1])) shift(kLOrder[k - 1], kLOrder[k]);
  }

  /// Exit tuples of size k drawn from cands (in order), keeping the B\A
  /// bound given that every other open terminal stays where it is.
  std::vector<std::vector<Vertex>> exit_tuples(
      const std::vector<int>& ids, const std::vector<Vertex>& cands) const {
    const size_t k = ids.size();
    int base = ctx.exits_in_B_minus_A();
    for (int id : ctx.unresolved())
      if (std::find(ids.begin(), ids.end(), id) == ids.end() &&
          in_B_minus_A(ctx.pos(id)))
        ++base;
    std::vector<std::vector<Vertex>> out;
    std::vector<int> idx;
    std::function<void(size_t)> rec = [&](size_t start) {
      if (idx.size() == k) {
        std::vector<Vertex> t;
        int nb = base;
        for (int i : idx) {
          t.push_back(cands[i]);
          nb += in_B_minus_A(cands[i]) ? 1 : 0;
        }
        if (!contract_.max_exits_in_B_minus_A ||
            nb <= *contract_.max_exits_in_B_minus_A)
          out.push_back(t);
        return;
      }
      for (size_t i = start; i < cands.size(); ++i) {
        idx.push_back(static_cast<int>(i));
        rec(i + 1);
        idx.pop_back();
      }
    };
    rec(0);
    return out;
  }

  /// Mates ids into exits from cands inside region, or a case gap.
  void mate(const std::vector<int>& ids, const std::vector<Vertex>& cands,
            EdgeMask region) {
    if (!mate_group(ctx, ids, exit_tuples(ids, cands), region))
      gap("cannot mate the group");
  }

  /// Mates the terminals at x and y through the first catalog clip with the
  /// given anchors that fits; appends the clip name to the label.
  void via_clip(Vertex a, Vertex b, ClipKind kind, Vertex x, Vertex y) {
    for (const ClipSpec* c : clips_anchored(a, b, kind)) {
      if (attempt([&] { mate_through_clip(ctx, *c, x, y); })) {
        refine(c->name);
        return;
      }
    }
    if (via_complement(a, b, kind, x, y)) return;
    gap("no clip at " + to_string(a) + "," + to_string(b));
  }
  /// All unused edges as one clip for terminals in S, if it verifies as
  /// such: the "clip in the complement" several cases appeal to.
  bool via_complement(Vertex a, Vertex b, ClipKind kind, Vertex x, Vertex y) {
    ClipSpec c;
    c.name = "complement";
    c.u = a;
    c.v = b;
    c.kind = kind;
    c.edges = g().edges_of(ctx.free_edges());
    c.domain = S_vertices();
    std::sort(c.domain.begin(), c.domain.end());
    if (!verify_clip(g(), c).ok) return false;
    if (!attempt([&] { mate_through_clip(ctx, c, x, y); })) return false;
    refine(c.name);
    return true;
  }
  void via_named_clip(const std::string& name, Vertex x, Vertex y) {
    mate_through_clip(ctx, clip_named(name), x, y);
    refine(name);
  }

  // ---- control ----
  /// Runs f; on any routing error restores the state and returns false.
  template <class F>
  bool attempt(F&& f) {
    RoutingContext saved = ctx;
    auto saved_labels = labels_;
    try {
      f();
      return true;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kBudgetExhausted) throw;
      ctx = saved;
      labels_ = saved_labels;
      return false;
    }
  }
  /// Tries f on each region path a->b until one attempt succeeds.
  template <class F>
  bool each_path(Vertex a, Vertex b, EdgeMask region, F&& f) {
    for (const Path& p : paths(a, b, region))
      if (attempt([&] { f(p); })) return true;
    return false;
  }

  /// Remaining open terminals escape where they stand; then the plan must
  /// satisfy the contract.
  EscapePlan finish() {
    for (int id : ctx.unresolved()) {
      if (!in_L(ctx.pos(id)))
        gap("terminal left inside S at " + to_string(ctx.pos(id)));
      ctx.escape(id);
    }
    EscapePlan plan = ctx.to_plan();
    Verdict v = validate_plan(g(), cfg(), plan, contract_);
    if (!v.ok())
      gap("plan breaks the contract: " + std::string(to_string(
                                              v.violations.front().code)) +
          " " + v.violations.front().message);
    return plan;
  }

 private:
  LemmaId lemma_;
  EscapeContract contract_;
  std::vector<std::string> labels_;
};

/// Mate path for a partner on L onto one of the listed cycle vertices:
/// stay if already there, else one L step.
inline Path onto_cycle(const Job& j, Vertex t, const std::vector<Vertex>& cyc) {
  if (std::find(cyc.begin(), cyc.end(), t) != cyc.end()) return {t};
  if (!in_L(t)) j.gap("partner " + to_string(t) + " is not on L");
  int k = l_position(t);
  for (int d : {1, -1}) {
    int m = k + d;
    if (m >= 0 && m < 5 &&
        std::find(cyc.begin(), cyc.end(), kLOrder[m]) != cyc.end())
      return {t, kLOrder[m]};
  }
  j.gap("partner " + to_string(t) + " is not next to the cycle");
}

}  // namespace detail

// ---- 4 pairs, or 3 pairs and a singleton ------------------------------------

namespace detail {

inline void heavy78_tree(Job& j, bool reflected) {
  const TerminalConfig& cfg = j.cfg();
  const int np = static_cast<int>(cfg.pairs.size());
  const std::vector<Vertex> inS = j.origins_where(in_S);
  std::optional<Vertex> s0;
  if (!cfg.singletons.empty()) s0 = cfg.singletons.front();
  const bool s0_in_S = s0 && in_S(*s0);

  auto pair_inside = [&](bool (*pred)(Vertex)) {
    for (int p = 0; p < np; ++p)
      if (pred(cfg.pairs[p].first) && pred(cfg.pairs[p].second)) return p;
    return -1;
  };
  const int pS = pair_inside(in_S);
  // members in S whose partner is not in S
  std::vector<Vertex> lone;
  for (Vertex v : inS)
    if (j.is_member(v) && !in_S(j.partner(v))) lone.push_back(v);

  const Vertex x{2, 2};

  if (inS.size() == 2) {
    if (pS >= 0) {
      j.label("case-a/pair-in-S");
      j.link_in(pS, j.S());
      int q = pair_inside(in_L);
      if (q < 0) j.gap("no second pair on L");
      j.link_along_L(q);
      return;
    }
    if (!s0_in_S) {
      j.label("case-a/weak-linkage");
      int p1 = cfg.pair_of(inS[0]), p2 = cfg.pair_of(inS[1]);
      auto [a1, b1] = j.ends(p1);
      auto [a2, b2] = j.ends(p2);
      auto sol = j.pack({{a1, b1}, {a2, b2}});
      if (!sol) j.gap("no weak linkage");
      j.link_via(p1, (*sol)[0]);
      j.link_via(p2, (*sol)[1]);
      return;
    }
    // a member and the singleton in S: link the two L pairs inside
    // H = L + (2,2), then the complement serves as a clip for S
    j.label("case-a/singleton-in-S");
    Vertex s1 = lone.front();
    std::vector<int> lp;
    for (int p = 0; p < np; ++p)
      if (p != cfg.pair_of(s1)) lp.push_back(p);
    if (lp.size() != 2) j.gap("expected two pairs on L");
    std::vector<Vertex> hv(kLOrder.begin(), kLOrder.end());
    hv.push_back(x);
    const EdgeMask H = j.induced(hv);
    std::vector<Demand> ds;
    for (int p : lp) {
      auto [a, b] = j.ends(p);
      ds.push_back({a, b, H});
    }
    std::vector<Vertex> exits{{1, 3}, {3, 1}};
    for (Vertex v : kLOrder)
      if (v != Vertex{1, 3} && v != Vertex{3, 1}) exits.push_back(v);
    Packer packer(j.g());
    bool done = packer.for_each(
        ds, j.ctx.free_edges(), [&](const std::vector<const Trail*>& ts) {
          return j.attempt([&] {
            j.link_via(lp[0], ts[0]->path);
            j.link_via(lp[1], ts[1]->path);
            j.mate({j.at(s1), j.at(*s0)}, exits, j.all());
          });
        });
    if (!done) j.gap("no linkage in H leaves a clip for S");
    return;
  }

  if (inS.size() == 3) {
    if (pS >= 0) {
      Vertex o{};
      for (Vertex v : inS)
        if (cfg.pair_of(v) != pS) o = v;
      if (j.is_member(o)) {
        j.label("case-b/pair-and-member");
        int q = cfg.pair_of(o);
        auto [a1, b1] = j.ends(pS);
        auto [a2, b2] = j.ends(q);
        auto sol = j.pack({{a1, b1}, {a2, b2}});
        if (!sol) j.gap("no weak linkage");
        j.link_via(pS, (*sol)[0]);
        j.link_via(q, (*sol)[1]);
        return;
      }
      j.label("case-b/pair-and-singleton");
      j.link_in(pS, j.without(j.S(), o));
      Path down{o};
      for (int r = o.row + 1; r <= 3; ++r) down.push_back({r, o.col});
      j.ctx.move(j.at(o), down);
      Vertex foot = down.back();
      int id = -1;
      for (int t : j.ctx.unresolved())
        if (t != j.ctx.id_of(o) && j.ctx.pos(t) == foot) id = t;
      int q = id >= 0 ? j.pair_of_id(id) : pair_inside(in_L);
      if (q < 0) j.gap("no pair on L");
      j.link_along_L(q);
      return;
    }
    if (!s0_in_S || *s0 == Vertex{1, 1}) {
      j.label(s0_in_S ? "case-b/frame-square-singleton-corner"
                      : "case-b/frame-square");
      std::vector<Vertex> near = inS;
      std::sort(near.begin(), near.end(), [&](Vertex a, Vertex b) {
        int da = manhattan(a, x), db = manhattan(b, x);
        return da != db ? da < db : a < b;
      });
      Vertex a = near[0], b = near[1], third = near[2];
      if (!j.is_member(a) || !j.is_member(b)) j.gap("closest terminals unpaired");
      const std::vector<Vertex> cyc{{2, 2}, {2, 3}, {3, 3}, {3, 2}};
      FrameSpec f{cyc, x, {a == x ? Path{x} : Path{a, x}, b == x ? Path{x} : Path{b, x}}};
      complete_frame(j.ctx, f, {cfg.pair_of(a), cfg.pair_of(b)},
                     onto_cycle(j, j.pos_of(j.partner(a)), cyc),
                     onto_cycle(j, j.pos_of(j.partner(b)), cyc));
      const EdgeMask rim = j.row(1) | j.col(1);
      int id = j.at(third);
      for (auto [exit, extra] :
           std::vector<std::pair<Vertex, EdgeMask>>{
               {{1, 3}, 0},
               {{3, 1}, 0},
               {{2, 3}, j.edge({1, 3}, {2, 3})},
               {{3, 2}, j.edge({3, 1}, {3, 2})}})
        if (mate_group(j.ctx, {id}, {{exit}}, rim | extra)) return;
      j.gap("third terminal cannot leave along the rim");
    }
    // singleton in S off the corner: 6-cycle frame under row 1
    bool want_reflect =
        *s0 == Vertex{2, 1} || (*s0 == x && !cfg.has_terminal({2, 1}));
    if (want_reflect) {
      if (reflected) j.gap("hexagon needs a second reflection");
      throw ReflectRequest{};
    }
    j.label("case-b/hexagon");
    const Vertex z{1, 3}, v{2, 3};
    Path p0 = *s0 == x ? Path{x, {1, 2}, z} : Path{*s0, z};
    const std::vector<Vertex> cyc{{2, 1}, {2, 2}, {2, 3}, {3, 3}, {3, 2}, {3, 1}};
    const EdgeMask inner = j.S() & ~j.edge({2, 1}, {2, 2}) & ~j.mask(p0);
    std::vector<Vertex> ms;
    for (Vertex w : inS)
      if (w != *s0) ms.push_back(w);
    // clear z for s0
    int zid = j.ctx.at(z);
    if (zid >= 0) {
      int zp = j.pair_of_id(zid);
      bool in_frame = zp == cfg.pair_of(ms[0]) || zp == cfg.pair_of(ms[1]);
      if (!in_frame) {
        int vid = j.ctx.at(v);
        if (vid >= 0 && j.pair_of_id(vid) == zp) j.link_via(zp, {z, v});
        else j.shift(z, v);
      }
    }
    bool framed = false;
    for (Vertex y : ms) {
      if (std::find(cyc.begin(), cyc.end(), y) == cyc.end()) continue;
      Vertex o = y == ms[0] ? ms[1] : ms[0];
      framed = j.each_path(o, y, inner, [&](const Path& p12) {
        FrameSpec f{cyc, y, {p12, Path{y}}};
        complete_frame(j.ctx, f, {cfg.pair_of(o), cfg.pair_of(y)},
                       onto_cycle(j, j.pos_of(j.partner(o)), cyc),
                       onto_cycle(j, j.pos_of(j.partner(y)), cyc));
      });
      if (framed) break;
    }
    if (!framed) j.gap("no framing on the 6-cycle");
    j.escape_via(j.at(*s0), p0);
    return;
  }

  // ---- all of S holds terminals ----
  std::vector<int> pairsS;
  for (int p = 0; p < np; ++p)
    if (in_S(cfg.pairs[p].first) && in_S(cfg.pairs[p].second)) pairsS.push_back(p);
  if (pairsS.size() == 2) {
    j.label("case-c/two-pairs");
    auto [a1, b1] = j.ends(pairsS[0]);
    auto [a2, b2] = j.ends(pairsS[1]);
    auto sol = j.pack({{a1, b1}, {a2, b2}});
    if (!sol) j.gap("no weak linkage");
    j.link_via(pairsS[0], (*sol)[0]);
    j.link_via(pairsS[1], (*sol)[1]);
    return;
  }
  if (pS >= 0) {
    j.label("case-c/pair-and-two");
    auto [s1, t1] = j.ends(pS);
    std::vector<Vertex> rest;
    for (Vertex w : inS)
      if (cfg.pair_of(w) != pS) rest.push_back(w);
    bool ok = false;
    for (const Path& p1 : j.paths(s1, t1, j.S())) {
      if (std::find(p1.begin() + 1, p1.end() - 1, Vertex{1, 1}) != p1.end() - 1)
        continue;
      ok = j.attempt([&] {
        j.link_via(pS, p1);
        for (int k = 0; k < 2; ++k) {
          Vertex s2 = rest[k], s = rest[1 - k];
          if (!j.is_member(s2)) continue;
          Vertex t2 = j.pos_of(j.partner(s2));
          if (in_S(t2)) continue;
          auto sol = j.pack({{s2, t2}, {s, t2}});
          if (!sol) continue;
          j.link_via(cfg.pair_of(s2), (*sol)[0]);
          j.escape_via(j.at(s), (*sol)[1]);
          return;
        }
        j.gap("no path through a partner on L");
      });
      if (ok) break;
    }
    if (!ok) j.gap("no admissible path for the pair in S");
    return;
  }
  if (!(s0 && *s0 == x)) {
    if (s0 && *s0 == Vertex{2, 1}) {
      if (reflected) j.gap("frame needs a second reflection");
      throw ReflectRequest{};
    }
    j.label("case-c/frame-square");
    const Vertex w21{2, 1};
    const std::vector<Vertex> cyc{{2, 2}, {2, 3}, {3, 3}, {3, 2}};
    FrameSpec f{cyc, x, {Path{x}, Path{w21, x}}};
    complete_frame(j.ctx, f, {cfg.pair_of(x), cfg.pair_of(w21)},
                   onto_cycle(j, j.pos_of(j.partner(x)), cyc),
                   onto_cycle(j, j.pos_of(j.partner(w21)), cyc));
    struct Corner {
      Vertex from;
      Path out;    // S terminal -> corner
      Path slide;  // corner -> cycle
    };
    for (const Corner& c :
         {Corner{{1, 2}, {{1, 2}, {1, 3}}, {{1, 3}, {2, 3}}},
          Corner{{1, 1}, {{1, 1}, {2, 1}, {3, 1}}, {{3, 1}, {3, 2}}}}) {
      int a = j.at(c.from);
      Vertex corner = c.out.back(), landing = c.slide.back();
      int cid = j.ctx.at(corner);
      int ap = j.pair_of_id(a);
      if (cid >= 0) {
        if (ap >= 0 && j.pair_of_id(cid) == ap) {
          j.link_via(ap, c.out);
          continue;
        }
        int did = j.ctx.at(landing);
        if (did >= 0) {
          if (ap >= 0 && j.pair_of_id(did) == ap) {
            j.link_via(ap, concat(c.out, c.slide));
            continue;
          }
          j.gap("corner and landing both blocked");
        }
        j.shift(corner, landing);
      }
      j.escape_via(a, c.out);
    }
    return;
  }
  // singleton at (2,2): 6-cycle frame right of column 1
  const int p1 = cfg.pair_of({1, 1}), p2 = cfg.pair_of({1, 2}),
            p3 = cfg.pair_of({2, 1});
  const Vertex t1 = j.partner({1, 1}), t2 = j.partner({1, 2}),
               t3 = j.partner({2, 1});
  if (t3 != Vertex{2, 3}) {
    j.label("case-c/hexagon-top");
    const std::vector<Vertex> cyc{{1, 2}, {1, 3}, {2, 3}, {3, 3}, {3, 2}, {2, 2}};
    FrameSpec f{cyc, {1, 2}, {Path{{1, 1}, {1, 2}}, Path{{1, 2}}}};
    complete_frame(j.ctx, f, {p1, p2}, onto_cycle(j, t1, cyc),
                   onto_cycle(j, t2, cyc));
    if (t3 == Vertex{3, 1}) j.link_via(p3, {{2, 1}, {3, 1}});
    else j.escape_via(j.at({2, 1}), {{2, 1}, {3, 1}});
    j.escape_via(j.at(x), {x, {2, 3}});
    return;
  }
  if (t2 != Vertex{3, 2} || t1 == Vertex{1, 3}) {
    if (reflected) j.gap("top frame needs a second reflection");
    throw ReflectRequest{};
  }
  j.label("case-c/direct");
  j.link_via(p3, {{2, 1}, {3, 1}, {3, 2}, {3, 3}, {2, 3}});
  j.link_via(p2, {{1, 2}, {2, 2}, {3, 2}});
  j.escape_via(j.at({1, 1}), {{1, 1}, {1, 2}, {1, 3}});
  j.escape_via(j.at(x), {x, {2, 3}});
}

}  // namespace detail

// ---- two pairs and two singletons -------------------------------------------

namespace detail {

/// First pair with both origins satisfying pred, or -1.
inline int pair_within(const TerminalConfig& cfg, bool (*pred)(Vertex)) {
  for (size_t p = 0; p < cfg.pairs.size(); ++p)
    if (pred(cfg.pairs[p].first) && pred(cfg.pairs[p].second))
      return static_cast<int>(p);
  return -1;
}

/// `first`, then the rest of L in L order.
inline std::vector<Vertex> prefer(std::vector<Vertex> first) {
  for (Vertex v : kLOrder)
    if (std::find(first.begin(), first.end(), v) == first.end())
      first.push_back(v);
  return first;
}

/// a, then the vertices of b not in a.
inline std::vector<Vertex> operator+(std::vector<Vertex> a,
                                     const std::vector<Vertex>& b) {
  for (Vertex v : b)
    if (std::find(a.begin(), a.end(), v) == a.end()) a.push_back(v);
  return a;
}

/// The other vertex of v's diagonal in S.
inline Vertex diagonal_mate(Vertex v) { return {3 - v.row, 3 - v.col}; }

/// P runs from the S member `s` of `pair` to `m` inside region and passes the
/// partner at `cut`: the part s..cut (plus link_ext) links the pair, the rest
/// carries m back to cut (plus esc_ext), where it escapes.
inline void split_at(Job& j, int pair, Vertex s, Vertex m, EdgeMask region,
                     Vertex cut, const Path& link_ext = {},
                     const Path& esc_ext = {}) {
  Path p = j.first_path(s, m, region);
  auto it = std::find(p.begin(), p.end(), cut);
  if (it == p.end()) j.gap("split vertex " + to_string(cut) + " not on path");
  Path pre(p.begin(), it + 1), suf(it, p.end());
  int mid = j.ctx.id_of(m);
  j.link_via(pair, concat(pre, link_ext));
  j.escape_via(mid, concat(reversed(suf), esc_ext));
}

inline std::vector<int> ids_of(const Job& j, const std::vector<Vertex>& vs) {
  std::vector<int> out;
  for (Vertex v : vs) out.push_back(j.ctx.id_of(v));
  return out;
}

inline void heavy6_tree(Job& j) {
  const TerminalConfig& cfg = j.cfg();
  const std::vector<Vertex> inS = j.origins_where(in_S);
  const int nS = static_cast<int>(inS.size());
  const Vertex u{3, 1}, v{3, 2}, c{3, 3}, z{1, 3}, b2{2, 3};
  const EdgeMask QminusB =
      j.induced({{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 1}, {3, 2}});

  auto S_others = [&](std::vector<Vertex> skip) {
    std::vector<Vertex> out;
    for (Vertex w : inS)
      if (std::find(skip.begin(), skip.end(), w) == skip.end())
        out.push_back(w);
    return out;
  };
  // S member and L partner of pair p (by origin)
  auto split_pair = [&](int p) {
    auto [a, b] = cfg.pairs[p];
    return in_S(a) ? std::pair{a, b} : std::pair{b, a};
  };

  if (nS == 1) {
    const int p1 = pair_within(cfg, in_L);
    auto [a, b] = j.ends(p1);
    const bool inA = in_A(a) && in_A(b);
    j.label(inA ? "case-a/pair-in-A" : "case-a/L-linkage");
    j.link_along_L(p1);
    Vertex nearv = l_position(a) > l_position(b) ? a : b;
    Vertex farv = nearv == a ? b : a;
    Path in = j.first_path(inS[0], u, j.S() | j.edge({2, 1}, u));
    j.escape_via(j.ctx.id_of(inS[0]), concat(in, unique_L_path(u, nearv)));
    if (inA) j.shift(b2, farv);
    return;
  }

  // ---- a pair inside S ----
  if (const int pS = pair_within(cfg, in_S); pS >= 0) {
    auto [s1, t1] = cfg.pairs[pS];
    if (nS == 2) {
      j.label("case-b/S2");
      std::vector<Vertex> w = j.free_in(in_L);
      j.link_in(pS, j.S());
      if (j.open_in_B_minus_A() == 2) j.shift(b2, w.front());
      return;
    }
    if (nS == 3) {
      const Vertex o = S_others({s1, t1}).front();
      if (!j.is_member(o)) {
        j.label("case-b/pair-on-L");
        const int q = pair_within(cfg, in_L);
        bool ok = j.each_path(s1, t1, j.S(), [&](const Path& p) {
          j.link_via(pS, p);
          j.link_along_L(q);
          j.mate({j.ctx.id_of(o)}, prefer({}), j.all());
        });
        if (!ok) j.gap("no exit for the singleton in S");
        return;
      }
      j.label("case-b/S3");
      const bool written = j.attempt([&] {
        if (j.occupied(u))
          for (int k = 3; k >= 0; --k)
            if (j.is_free(kLOrder[k])) {
              j.shift(u, kLOrder[k]);
              break;
            }
        if (j.open_in_B_minus_A() == 2) {
          Vertex w2{0, 0};
          for (Vertex w : j.free_in(in_A))
            if (w != u) w2 = w;
          if (w2.row == 0) j.gap("no free vertex in A for (2,3)");
          j.shift(b2, w2);
        }
        auto sol = j.pack({{s1, t1, j.S()}, {o, u, QminusB}});
        if (!sol) j.gap("no linkage in S with an escape to (3,1)");
        j.link_via(pS, (*sol)[0]);
        j.escape_via(j.ctx.id_of(o), (*sol)[1]);
      });
      if (!written) {
        // shifting a terminal can take the only edge out of S
        j.label("patch/b-S3-shift-blocks");
        const bool crowded = j.open_in_B_minus_A() == 2;
        bool ok = false;
        const std::vector<Vertex> targets =
            crowded ? j.free_in(in_A) : std::vector<Vertex>{u};
        for (Vertex w : targets) {
          ok = j.attempt([&] {
            if (crowded) j.shift(b2, w);
            bool found = j.each_path(s1, t1, j.S(), [&](const Path& p) {
              j.link_via(pS, p);
              j.mate({j.ctx.id_of(o)}, prefer({u}), j.all());
            });
            if (!found) j.gap("no escape for the S member");
          });
          if (ok) break;
        }
        if (!ok) j.gap("no escape for the S member");
      }
      return;
    }
    // all of S holds terminals
    j.label("case-b/S4");
    const int nB = j.open_in_B_minus_A();
    const bool aa = nB >= 1;
    if (nB == 2) {
      j.shift(b2, c);
    } else if (nB == 1) {
      for (Vertex y : {u, v})
        if (j.occupied(y)) j.shift(y, c);
    } else if (j.occupied(u)) {
      auto w = j.free_in(in_A);
      if (w.empty()) j.gap("no free vertex in A");
      j.shift(u, w.front());
    }
    const std::vector<Vertex> pq = S_others({s1, t1});
    const bool corner = s1 == Vertex{1, 1} || t1 == Vertex{1, 1};
    const bool centre = s1 == Vertex{2, 2} || t1 == Vertex{2, 2};
    if (corner && centre) {
      j.refine("direct");
      j.link_via(pS, {{1, 1}, {2, 1}, {2, 2}});
      j.escape_via(j.ctx.id_of({2, 1}), {{2, 1}, u});
      j.escape_via(j.ctx.id_of({1, 2}),
                   aa ? Path{{1, 2}, {2, 2}, v} : Path{{1, 2}, z});
      return;
    }
    const std::string name = !corner ? (aa ? "aa-outer-path" : "ab-outer-path")
                                     : (aa ? "aa-fork" : "ab-inner-path");
    const EdgeMask cm = clip_mask(j.g(), clip_named(name));
    bool ok = j.each_path(s1, t1, j.S() & ~cm, [&](const Path& p) {
      j.link_via(pS, p);
      j.via_named_clip(name, pq[0], pq[1]);
    });
    if (!ok) j.gap("clip " + name + " does not fit");
    return;
  }

  // ---- a pair inside A ----
  if (const int pA = pair_within(cfg, in_A); pA >= 0) {
    if (nS == 2) {
      const Vertex w = j.free_in(in_L).front();
      j.link_along_L(pA);
      if (in_A(w)) {
        j.label("case-c/S2/w-in-A");
        j.shift(b2, c);
        j.via_named_clip("aa-column-hook", inS[0], inS[1]);
        return;
      }
      j.label("case-c/S2/w-in-B");
      auto [s1, t1] = j.ends(pA);
      for (const Path& p : trails_within(j.g(), s1, t1, j.ctx.free_edges())) {
        bool covers = true;
        for (Vertex x : S_vertices())
          covers = covers && std::find(p.begin(), p.end(), x) != p.end();
        if (covers &&
            mate_group(j.ctx, ids_of(j, inS), {{s1, t1}}, j.mask(p)))
          return;
      }
      j.gap("no path through S between the freed ends");
    }
    const int q = 1 - pA;
    auto [s2, t2] = split_pair(q);
    const std::vector<int> rest = ids_of(j, S_others({s2}));
    j.link_along_L(pA);
    if (in_B(t2)) {
      j.label("case-c/S3/t2-in-B");
      const EdgeMask ladder = j.col(1) | j.col(2) | j.edge({1, 1}, {1, 2}) |
                              j.edge({2, 1}, {2, 2});
      bool ok = j.each_path(s2, t2, j.row(s2.row) | j.B(), [&](const Path& p) {
        j.link_via(q, p);
        j.mate(rest, {u, v}, ladder);
      });
      if (!ok) j.gap("no ladder clip beside the second linkage");
      return;
    }
    j.label("case-c/S3/t2-in-A");
    bool ok = j.each_path(s2, t2, j.all(), [&](const Path& p) {
      j.link_via(q, p);
      j.mate(rest, prefer({u, z}), j.all());
    });
    if (!ok) j.gap("no AB escape beside the second linkage");
    return;
  }

  // ---- a pair inside B ----
  if (const int pB = pair_within(cfg, in_B); pB >= 0) {
    if (nS == 2) {
      const Vertex w = j.free_in(in_L).front();
      auto [s1, t1] = cfg.pairs[pB];
      j.link_along_L(pB);
      bool all_free = true;
      for (Vertex x : {z, b2, c}) all_free = all_free && j.is_free(x);
      if (all_free) {
        j.label("case-d/S2");
        j.via_named_clip("ab-bent", inS[0], inS[1]);
      } else if (s1 == c || t1 == c) {
        j.label("case-d/S2/corner-pair");
        j.via_clip(w, c, ClipKind::AA, inS[0], inS[1]);
      } else {
        j.label("patch/d-S2-pair-off-corner");
        j.mate(ids_of(j, inS), prefer({z, b2, w}), j.all());
      }
      return;
    }
    const int q = 1 - pB;
    auto [s2, t2] = split_pair(q);
    const std::vector<int> rest = ids_of(j, S_others({s2}));
    EdgeMask region;
    if (t2 == c) {
      j.label("patch/d-S3-partner-at-corner");
      region = j.col(s2.col) | j.A();
    } else if (in_A(t2)) {
      j.label("case-d/S3/t2-in-A");
      region = j.col(s2.col) | j.edge(u, v);
    } else {
      j.label("case-d/S3/t2-in-B");
      region = j.col(s2.col) | j.row(2) | j.B();
    }
    j.link_along_L(pB);
    bool ok = j.each_path(s2, t2, region, [&](const Path& p) {
      j.link_via(q, p);
      j.mate(rest, prefer({u, v, z}), j.all());
    });
    if (!ok) j.gap("no AB escape beside the linkages");
    return;
  }

  // ---- no pair inside S, A or B ----
  std::vector<Vertex> members, singles;
  for (Vertex x : inS) (j.is_member(x) ? members : singles).push_back(x);

  // links pair p from its S member inside region, then mates the given S
  // terminals into cands
  auto link_and_mate = [&](int p, EdgeMask region, const std::vector<Vertex>& movers,
                           const std::vector<Vertex>& cands) {
    auto [s, t] = split_pair(p);
    return j.each_path(s, j.pos_of(t), region, [&](const Path& path) {
      j.link_via(p, path);
      j.mate(ids_of(j, movers), cands, j.all());
    });
  };
  auto along_A = [&](Vertex s) { return j.A() | j.col(s.col); };
  auto along_B = [&](Vertex s) { return j.B() | j.row(s.row); };
  auto free_A = [&]() { return j.free_in(in_A); };
  auto free_AB = [&]() { return j.free_in(in_A_minus_B); };

  if (nS == 2) {
    if (members.empty()) {
      j.label("S2/singletons-in-S");
      const int p1 = j.pair_at(b2);
      const Vertex t1 = j.partner(b2);
      for (const ClipSpec* cl : clips_anchored(t1, c, ClipKind::AA)) {
        bool ok = j.each_path(b2, t1, j.all() & ~clip_mask(j.g(), *cl),
                              [&](const Path& p) {
                                j.link_via(p1, p);
                                mate_through_clip(j.ctx, *cl, inS[0], inS[1]);
                              });
        if (ok) {
          j.refine(cl->name);
          return;
        }
      }
      j.gap("no clip at the corner");
    }
    if (singles.empty()) {
      j.label("S2/members-in-S");
      const Vertex t1 = j.partner(members[0]), t2 = j.partner(members[1]);
      if (t1 == c || t2 == c) j.shift(c, v);
      std::vector<Vertex> qv;
      for (Vertex x : j.g().vertices())
        if (x != c) qv.push_back(x);
      const EdgeMask Qc = j.induced(qv);
      const int p1 = cfg.pair_of(members[0]), p2 = cfg.pair_of(members[1]);
      auto [a1, e1] = j.ends(p1);
      auto [a2, e2] = j.ends(p2);
      auto sol = j.pack({{a1, e1, Qc}, {a2, e2, Qc}});
      if (!sol) j.gap("no linkage off the corner");
      j.link_via(p1, (*sol)[0]);
      j.link_via(p2, (*sol)[1]);
      if (j.open_in_B_minus_A() == 2) j.shift(b2, c);
      return;
    }
    const Vertex s1 = members[0], s3 = singles[0];
    const int p1 = cfg.pair_of(s1), p2 = 1 - p1;
    const Vertex t1 = j.partner(s1);
    const Vertex w = j.free_in(in_L).front();
    if (in_A_minus_B(w)) {
      j.label("S2/member-singleton/w-in-A");
      auto [a, b] = cfg.pairs[p2];
      const Vertex s2 = in_A_minus_B(a) ? a : b;
      j.link_along_L(p2);
      j.via_clip(s2, w, ClipKind::AA, s1, s3);
      return;
    }
    if (in_A_minus_B(t1)) {
      j.label("S2/member-singleton/t1-in-A");
      if (j.open_in_B_minus_A() == 2) j.shift(b2, w);
      bool ok = j.each_path(s1, t1, along_A(s1), [&](const Path& p) {
        j.link_via(p1, p);
        j.mate({j.ctx.id_of(s3)}, {t1}, QminusB);
      });
      if (!ok) j.gap("no escape into the freed vertex");
      return;
    }
    j.label("S2/member-singleton/B-side");
    if (!link_and_mate(p1, along_B(s1), {s3}, {c}))
      j.gap("no escape into the corner");
    return;
  }

  if (nS == 3) {
    const int nB = j.open_in_B_minus_A();
    if (members.size() == 2) {
      const Vertex s3 = singles[0];
      auto others = [&](int p) {
        return std::vector<Vertex>{
            split_pair(1 - p).first, s3};
      };
      auto pair_with_t = [&](bool (*pred)(Vertex)) {
        for (int p = 0; p < 2; ++p)
          if (pred(split_pair(p).second)) return p;
        return -1;
      };
      if (nB == 0) {
        j.label("S3/two-members/no-B-terminal");
        for (int p = 0; p < 2; ++p)
          if (link_and_mate(p, along_A(split_pair(p).first), others(p),
                            prefer({split_pair(p).second, z})))
            return;
        j.gap("no AB clip beside the linkage");
      }
      if (nB == 2) {
        j.label("S3/two-members/B-full");
        for (int p = 0; p < 2; ++p)
          if (in_B_minus_A(split_pair(p).second) &&
              link_and_mate(p, along_B(split_pair(p).first), others(p),
                            free_A()))
            return;
        j.gap("no AA clip beside the linkage");
      }
      if (int p = pair_with_t(in_B_minus_A); p >= 0) {
        j.label("S3/two-members/B-pair");
        if (!link_and_mate(p, along_B(split_pair(p).first), others(p),
                           free_A() + prefer({split_pair(p).second})))
          j.gap("no AB clip beside the linkage");
        return;
      }
      if (j.is_free(c)) {
        j.label("S3/two-members/corner-free");
        for (int p = 0; p < 2; ++p)
          if (link_and_mate(p, along_A(split_pair(p).first), others(p),
                            prefer({c, split_pair(p).second})))
            return;
        j.gap("no AA clip at the corner");
      }
      j.label("S3/two-members/corner-taken");
      const int p = pair_with_t([](Vertex x) { return x == Vertex{3, 3}; });
      if (p < 0) j.gap("corner holds no partner");
      if (!link_and_mate(p, along_B(split_pair(p).first), others(p),
                         free_AB() + prefer({c})))
        j.gap("no AA clip at the corner");
      return;
    }
    const Vertex s1 = members.at(0);
    const int p1 = cfg.pair_of(s1);
    const Vertex t1 = j.partner(s1);
    if (in_B_minus_A(t1)) {
      j.label("S3/one-member/B-full");
      if (!link_and_mate(p1, along_B(s1), singles, free_A()))
        j.gap("no AA clip beside the linkage");
    } else if (t1 == c) {
      j.label("S3/one-member/corner-taken");
      if (!link_and_mate(p1, along_B(s1), singles, free_AB() + prefer({c})))
        j.gap("no AA clip at the corner");
    } else {
      j.label("S3/one-member/corner-free");
      if (!link_and_mate(p1, along_A(s1), singles, prefer({c, t1})))
        j.gap("no AA clip at the corner");
    }
    return;
  }

  // all of S holds terminals, both partners on L
  const EdgeMask U = j.col(1) | j.A() | j.col(2);
  const EdgeMask R = j.row(1) | j.B() | j.row(2);
  const Vertex t0 = split_pair(0).second, t1 = split_pair(1).second;
  auto other_diag = [&](Vertex s) {
    std::vector<Vertex> out;
    for (Vertex x : inS)
      if (x != s && x != diagonal_mate(s)) out.push_back(x);
    return out;
  };
  if (in_A_minus_B(t0) && in_A_minus_B(t1)) {
    j.label("S4/A-A");
    auto [s, t] = split_pair(0);
    split_at(j, 0, s, diagonal_mate(s), U, t);
    for (Vertex x : other_diag(s)) {
      if (x.row == 1) j.mate({j.ctx.id_of(x)}, {z}, j.row(1));
      else j.mate({j.ctx.id_of(x)}, {c}, j.row(2) | j.B());
    }
    return;
  }
  if (in_B_minus_A(t0) && in_B_minus_A(t1)) {
    j.label("S4/B-B");
    const int p = split_pair(0).second == b2 ? 0 : 1;
    const Vertex s = split_pair(p).first;
    split_at(j, p, s, diagonal_mate(s), R, b2, {}, {b2, c});
    j.mate(ids_of(j, other_diag(s)), {u, v}, U);
    return;
  }
  if (!in_B_minus_A(t0) && !in_B_minus_A(t1)) {
    j.label("S4/corner");
    const int p = t0 == c ? 0 : 1;
    if (split_pair(p).second != c) j.gap("corner holds no partner");
    const Vertex s = split_pair(p).first;
    split_at(j, p, s, diagonal_mate(s), R, b2, {b2, c});
    j.mate(ids_of(j, other_diag(s)), prefer({c}) , U);
    return;
  }
  j.label("S4/B-A");
  const int p = in_B_minus_A(t0) ? 0 : 1;
  auto [s, t] = split_pair(p);
  split_at(j, p, s, diagonal_mate(s), R, t);
  j.mate(ids_of(j, other_diag(s)), free_A(), U);
}

}  // namespace detail

// ---- one pair and three singletons ------------------------------------------

namespace detail {

inline void heavy5_tree(Job& j) {
  const TerminalConfig& cfg = j.cfg();
  const std::vector<Vertex> inS = j.origins_where(in_S);
  const int nS = static_cast<int>(inS.size());
  const Vertex u{3, 1}, v{3, 2}, c{3, 3}, z{1, 3}, b2{2, 3};
  auto [s1, t1] = cfg.pairs[0];
  // escape region for three terminals of S into u, v, z
  const EdgeMask H3 = j.edge(u, {2, 1}) | j.edge({2, 1}, {1, 1}) |
                      j.edge({1, 1}, {1, 2}) | j.edge({2, 1}, {2, 2}) |
                      j.edge({2, 2}, v) | j.edge({2, 2}, {1, 2}) |
                      j.edge({1, 2}, z);
  auto S_singles = [&] {
    std::vector<Vertex> out;
    for (Vertex x : inS)
      if (!j.is_member(x)) out.push_back(x);
    return out;
  };
  auto aa_free_A = [&](Vertex x, Vertex y) {
    const auto fa = j.free_in(in_A);
    for (size_t a = 0; a < fa.size(); ++a)
      for (size_t b = a + 1; b < fa.size(); ++b)
        if (j.attempt([&] { j.via_clip(fa[a], fa[b], ClipKind::AA, x, y); }))
          return;
    j.gap("no AA clip on the free vertices of A");
  };
  // links the pair by the first path in region from which the rest succeeds
  auto link_then = [&](Vertex from, Vertex to, EdgeMask region, auto&& rest) {
    if (!j.each_path(from, to, region, [&](const Path& p) {
          j.link_via(0, p);
          rest();
        }))
      j.gap("no linkage leaves room for the escapes");
  };

  if (in_S(s1) && in_S(t1)) {
    if (nS == 2) {
      if (j.open_in_B_minus_A() == 2) {
        j.label("case-a/S2/release-B");
        for (Vertex w : j.free_in(in_A))
          if (j.attempt([&] {
                auto sol = j.pack({{s1, t1}, {z, w}});
                if (!sol) j.gap("no linkage");
                j.link_via(0, (*sol)[0]);
                j.escape_via(j.at(z), (*sol)[1]);
              }))
            return;
        j.gap("cannot release B");
      }
      j.label("case-a/S2");
      j.link_in(0, j.S());
      return;
    }
    if (nS == 3) {
      Vertex s2{};
      for (Vertex x : inS)
        if (x != s1 && x != t1) s2 = x;
      if (j.open_in_B_minus_A() == 2) j.shift(b2, c);
      std::vector<Vertex> qv;
      for (Vertex x : j.g().vertices())
        if (x != c) qv.push_back(x);
      const EdgeMask Qc = j.induced(qv);
      const auto ws = j.free_in(in_A_minus_B);
      j.label(ws.empty() ? "patch/a-S3-no-free-A" : "case-a/S3");
      const EdgeMask region = ws.empty() ? j.all() : Qc;
      for (Vertex w : ws.empty() ? j.free_in(in_A) : ws)
        if (j.attempt([&] {
              auto sol = j.pack({{s1, t1, region}, {s2, w, region}});
              if (!sol) j.gap("no linkage");
              j.link_via(0, (*sol)[0]);
              j.escape_via(j.ctx.id_of(s2), (*sol)[1]);
            }))
          return;
      j.gap("no linkage with an escape into A");
    }
    const Vertex k11{1, 1};
    std::vector<int> movers;
    for (Vertex x : S_singles()) movers.push_back(j.ctx.id_of(x));
    if (s1 != k11 && t1 != k11) {
      j.label("case-a/S4/corner-free");
      const EdgeMask cyc8 = j.edge(k11, {1, 2}) | j.edge({1, 2}, z) |
                            j.edge(z, b2) | j.edge(b2, {2, 2}) |
                            j.edge({2, 2}, v) | j.edge(v, u) |
                            j.edge(u, {2, 1}) | j.edge({2, 1}, k11);
      link_then(s1, t1, j.without(j.S(), k11),
                [&] { j.mate(movers, {u, v, z}, cyc8); });
    } else {
      j.label("case-a/S4/corner-linked");
      link_then(s1, t1, j.S(),
                [&] { j.mate(movers, {u, v, z}, j.all() & ~j.S()); });
    }
    return;
  }

  if (nS <= 1) {
    if (in_L(s1) && in_L(t1)) {
      j.label(nS == 0 ? "case-b/L-linkage" : "case-b/L-linkage/S-escape");
      j.link_along_L(0);
      if (j.open_in_B_minus_A() == 2) j.push_into_A(b2);
      if (nS == 1) j.mate({j.ctx.id_of(inS[0])}, {s1, t1}, j.all());
      return;
    }
    const Vertex s = in_S(s1) ? s1 : t1, t = s == s1 ? t1 : s1;
    if (in_B_minus_A(t)) {
      j.label("case-b/member-in-S/t1-in-B");
      j.link_via(0, j.first_path(s, t, j.B() | j.row(s.row)));
    } else if (in_A(t) && j.open_in_B_minus_A() == 2) {
      j.label("case-b/member-in-S/push");
      j.push_into_A(b2);
      j.link_via(0, j.first_path(s, j.pos_of(t), j.all()));
    } else {
      j.label("case-b/member-in-S/direct");
      j.link_in(0, j.all());
    }
    return;
  }

  std::vector<int> sids;
  for (Vertex x : S_singles()) sids.push_back(j.ctx.id_of(x));

  if (in_A(s1) && in_A(t1)) {
    j.label("case-c");
    j.link_along_L(0);
    j.mate(sids, prefer({s1, t1, z}), j.all());
    return;
  }
  if (in_B(s1) && in_B(t1)) {
    j.link_along_L(0);
    if (nS == 2) {
      j.label("case-d/S2");
      for (Vertex x : {u, v})
        if (j.occupied(x)) j.shift(x, c);
      j.via_clip(u, v, ClipKind::AA, inS[0], inS[1]);
    } else {
      j.label("case-d/S3");
      j.mate(sids, {u, v, z}, H3);
    }
    return;
  }
  if (nS <= 3) {
    if (in_L(s1) && in_L(t1)) {
      j.link_along_L(0);
      if (nS == 3) {
        j.label("case-e/L-pair/S3");
        j.mate(sids, {u, v, z}, H3);
      } else if (j.is_free(u) && j.is_free(v)) {
        j.label("case-e/L-pair/S2/aa");
        j.via_clip(u, v, ClipKind::AA, inS[0], inS[1]);
      } else {
        j.label("case-e/L-pair/S2/ab");
        j.via_clip(s1, t1, ClipKind::AB, inS[0], inS[1]);
      }
      return;
    }
    const Vertex s = in_S(s1) ? s1 : t1, t = s == s1 ? t1 : s1;
    const std::vector<Vertex> rest = S_singles();
    if (nS == 2) {
      const bool b_full = !in_B_minus_A(t) && j.open_in_B_minus_A() == 2;
      j.label(b_full ? "patch/e-S2-B-full" : "case-e/member-in-S/S2");
      if (b_full) j.push_into_A(b2);
      for (Vertex w : j.free_in(in_A) + std::vector<Vertex>{j.pos_of(t)})
        if (j.attempt([&] {
              auto sol = j.pack({{s, j.pos_of(t)}, {rest[0], w}});
              if (!sol) j.gap("no weak linkage");
              j.link_via(0, (*sol)[0]);
              j.escape_via(j.ctx.id_of(rest[0]), (*sol)[1]);
            }))
          return;
      j.gap("no escape into A beside the linkage");
    }
    if (in_B(t)) {
      j.label("case-e/member-in-S/S3/t1-in-B");
      link_then(s, t, j.B() | j.row(s.row),
                [&] { aa_free_A(rest[0], rest[1]); });
    } else if (s.col == 1 && t == v && j.is_free(u) && j.occupied(c)) {
      j.label("case-e/member-in-S/S3/t1-in-A/ab");
      link_then(s, t, j.A() | j.col(s.col), [&] {
        j.via_clip(t, z, ClipKind::AB, rest[0], rest[1]);
      });
    } else {
      j.label("case-e/member-in-S/S3/t1-in-A");
      link_then(s, t, j.A() | j.col(s.col),
                [&] { aa_free_A(rest[0], rest[1]); });
    }
    return;
  }
  j.label("patch/S4-partner-on-L");
  const Vertex s = in_S(s1) ? s1 : t1, t = s == s1 ? t1 : s1;
  link_then(s, t, j.all(), [&] { j.mate(sids, prefer({}), j.all()); });
}

inline void run_tree(Job& j, LemmaId lemma, bool reflected) {
  switch (lemma) {
    case LemmaId::HEAVY78: heavy78_tree(j, reflected); return;
    case LemmaId::HEAVY6: heavy6_tree(j); return;
    case LemmaId::HEAVY5: heavy5_tree(j); return;
    case LemmaId::W2L: break;
  }
  throw Error(ErrorCode::kUnsupportedFamily, "no router for w2l");
}

inline std::pair<EscapePlan, CaseTrace> route_as(const TerminalConfig& cfg_in,
                                                 LemmaId lemma, bool strict) {
  check_config(cfg_in);
  const TerminalConfig cfg = cfg_in.canonical();
  if (family_of(cfg) != lemma)
    throw Error(ErrorCode::kUnsupportedFamily,
                "config does not belong to " + std::string(to_string(lemma)));
  const GridGraph& g = corner_grid();
  CaseTrace trace;
  trace.lemma = lemma;
  try {
    try {
      Job job(g, cfg, lemma);
      run_tree(job, lemma, false);
      EscapePlan plan = job.finish();
      trace.case_labels = job.labels();
      return {plan, trace};
    } catch (const ReflectRequest&) {
      const TerminalConfig rc = diagonal_reflect(cfg);
      Job job(g, rc, lemma);
      run_tree(job, lemma, true);
      EscapePlan plan = job.finish();
      trace.case_labels = job.labels();
      trace.symmetry_applied = true;
      return {diagonal_reflect(plan, rc), trace};
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBudgetExhausted) throw;
    if (strict)
      throw Error(ErrorCode::kCaseGap,
                  std::string(e.what()) + " [" + encode_config(cfg).dump() + "]");
    OracleResult r = oracle_solve(g, cfg, contract_for(lemma));
    if (!r.found())
      throw Error(ErrorCode::kCaseGap, "no plan exists for " +
                                           encode_config(cfg).dump());
    trace.case_labels = {std::string(to_string(lemma)) + "/fallback"};
    trace.used_fallback = true;
    return {*r.plan, trace};
  }
}

}  // namespace detail

/// Routes a 4-pair or 3-pair-plus-singleton configuration.
inline std::pair<EscapePlan, CaseTrace> route_heavy78(const TerminalConfig& cfg,
                                                      bool strict = false) {
  return detail::route_as(cfg, LemmaId::HEAVY78, strict);
}

/// Routes a 2-pair, 2-singleton configuration.
inline std::pair<EscapePlan, CaseTrace> route_heavy6(const TerminalConfig& cfg,
                                                     bool strict = false) {
  return detail::route_as(cfg, LemmaId::HEAVY6, strict);
}

/// Routes a 1-pair, 3-singleton configuration.
inline std::pair<EscapePlan, CaseTrace> route_heavy5(const TerminalConfig& cfg,
                                                     bool strict = false) {
  return detail::route_as(cfg, LemmaId::HEAVY5, strict);
}

/// Dispatches on the shape of cfg. In strict mode a configuration no case
/// handles raises CASE_GAP; otherwise the oracle fills in and the trace says
/// so.
inline std::pair<EscapePlan, CaseTrace> route(const TerminalConfig& cfg,
                                              bool strict = false) {
  check_config(cfg);
  auto fam = family_of(cfg);
  if (!fam) {
    std::string hint;
    if (cfg.terminal_count() == 6 && cfg.pairs.size() == 3)
      hint = "; demote one pair with demote_pair_to_singletons";
    throw Error(ErrorCode::kUnsupportedFamily,
                std::to_string(cfg.pairs.size()) + " pairs and " +
                    std::to_string(cfg.singletons.size()) +
                    " singletons fit no family" + hint);
  }
  return detail::route_as(cfg, *fam, strict);
}

}  // namespace cornerescape

#endif  // CORNERESCAPE_ROUTER_HPP
