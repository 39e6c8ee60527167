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
#include <gtest/gtest.h>

#include "cornerescape/clip_catalog.hpp"
#include "cornerescape/toolkit.hpp"

namespace ce = cornerescape;
using ce::Vertex;

namespace {
const ce::GridGraph& Q() { return ce::corner_grid(); }
}  // namespace

TEST(Shift, ConsumesTheLPath) {
  auto cfg = ce::decode_config(R"({"pairs":[[[1,1],[1,2]]],"singletons":[[2,3]]})");
  ce::RoutingContext ctx(Q(), cfg);
  ce::shift(ctx, {2, 3}, {3, 1});
  const int id = ctx.id_of({2, 3});
  EXPECT_EQ(ctx.pos(id), (Vertex{3, 1}));
  for (auto [a, b] : {std::pair<Vertex, Vertex>{{2, 3}, {3, 3}},
                      {{3, 3}, {3, 2}},
                      {{3, 2}, {3, 1}}})
    EXPECT_FALSE(ctx.free_edges() & ce::GridGraph::bit(Q().edge_index(a, b)));
  EXPECT_EQ(ce::popcount(ctx.free_edges()), 9);
}

TEST(Shift, BlockedByUsedEdgesOrEmptySource) {
  auto cfg = ce::decode_config(R"({"pairs":[],"singletons":[[2,3],[3,1]]})");
  ce::RoutingContext ctx(Q(), cfg);
  ce::shift(ctx, {3, 1}, {3, 2});
  try {
    ce::shift(ctx, {2, 3}, {3, 1});
    FAIL();
  } catch (const ce::Error& e) {
    EXPECT_EQ(e.code(), ce::ErrorCode::kShiftBlocked);
  }
  EXPECT_THROW(ce::shift(ctx, {1, 3}, {3, 3}), ce::Error);
  EXPECT_THROW(ce::shift(ctx, {2, 2}, {3, 3}), ce::Error);
}

TEST(Linkage, TwoPairsInSubgraph) {
  auto [p, q] = ce::link_pairs_in_subgraph(Q(), {1, 1}, {2, 2}, {1, 2}, {2, 1});
  EXPECT_EQ(p.front(), (Vertex{1, 1}));
  EXPECT_EQ(q.back(), (Vertex{2, 1}));
  EXPECT_FALSE(Q().mask_of(p) & Q().mask_of(q));
  // inside the 4-cycle on S the crossing pairs cannot both be linked
  ce::EdgeMask s = Q().mask_of({{1, 1}, {1, 2}, {2, 2}, {2, 1}, {1, 1}});
  EXPECT_THROW(ce::link_pairs_in_subgraph(Q(), {1, 1}, {2, 2}, {1, 2}, {2, 1}, s),
               ce::Error);
}

TEST(Clips, CatalogVerifies) {
  const auto& cat = ce::clip_catalog();
  EXPECT_GE(cat.size(), 8u);
  for (const auto& c : cat) {
    auto v = ce::verify_clip(Q(), c);
    EXPECT_TRUE(v.ok) << c.name << ": "
                      << (v.problems.empty() ? "" : v.problems.front());
    // anchors on L, AB clips have exactly one anchor in B\A
    EXPECT_TRUE(ce::in_L(c.u) && ce::in_L(c.v)) << c.name;
    const int nb = ce::in_B_minus_A(c.u) + ce::in_B_minus_A(c.v);
    EXPECT_EQ(nb, c.kind == ce::ClipKind::AB ? 1 : 0) << c.name;
  }
}

TEST(Clips, NamesAreUnique) {
  std::set<std::string> names;
  for (const auto& c : ce::clip_catalog()) EXPECT_TRUE(names.insert(c.name).second);
  EXPECT_THROW(ce::clip_named("no-such-clip"), ce::Error);
}

TEST(Clips, ABottleneckIsNotAClip) {
  // terminals at (2,1) and (2,2) both need (2,2)-(3,2)
  ce::ClipSpec c;
  c.name = "bottleneck";
  c.u = {3, 1};
  c.v = {3, 2};
  c.edges = {ce::Edge::make({2, 1}, {2, 2}), ce::Edge::make({2, 2}, {3, 2}),
             ce::Edge::make({3, 1}, {3, 2})};
  auto v = ce::verify_clip(Q(), c);
  EXPECT_FALSE(v.ok);
  EXPECT_TRUE(v.witness.has_value());
}

TEST(Clips, JsonRoundTrip) {
  for (const auto& c : ce::clip_catalog()) {
    auto d = ce::decode_clip(ce::encode_clip(c));
    EXPECT_EQ(d.name, c.name);
    EXPECT_EQ(d.edges, c.edges);
    EXPECT_EQ(d.domain, c.domain);
  }
  EXPECT_THROW(ce::decode_clip(nlohmann::json::parse(
                   R"({"name":"x","u":[3,1],"v":[3,2],"kind":"AA","edges":[[[1,1],[2,2]]]})")),
               ce::Error);
}

TEST(Clips, MateThroughClip) {
  const auto& clip = ce::clip_catalog().front();
  auto cov = clip.covered();
  std::vector<Vertex> dom = clip.domain.empty() ? cov : clip.domain;
  std::vector<Vertex> inside;
  for (Vertex v : dom)
    if (std::binary_search(cov.begin(), cov.end(), v) && v != clip.u && v != clip.v)
      inside.push_back(v);
  ASSERT_GE(inside.size(), 2u);
  ce::TerminalConfig cfg;
  cfg.singletons = {inside[0], inside[1]};
  ce::RoutingContext ctx(Q(), cfg);
  ce::mate_through_clip(ctx, clip, inside[0], inside[1]);
  EXPECT_TRUE(ctx.resolved());
  std::set<Vertex> exits;
  for (const auto& e : ctx.to_plan().escapes) exits.insert(e.exit);
  EXPECT_EQ(exits, (std::set<Vertex>{clip.u, clip.v}));
}

TEST(Frame, LinksBothPairsAroundTheSquare) {
  // C = the 4-cycle on Q minus row 1 and column 1, anchor (2,2)
  auto cfg = ce::decode_config(R"({"pairs":[[[1,2],[3,3]],[[2,1],[2,3]]],"singletons":[]})");
  ce::RoutingContext ctx(Q(), cfg);
  ce::FrameSpec f;
  f.cycle = {{2, 2}, {2, 3}, {3, 3}, {3, 2}};
  f.anchor = {2, 2};
  f.attach = {ce::Path{{1, 2}, {2, 2}}, ce::Path{{2, 1}, {2, 2}}};
  const int p0 = ctx.config().pair_of({1, 2}), p1 = ctx.config().pair_of({2, 1});
  auto [a, b] = ce::complete_frame(ctx, f, {p0, p1}, {{3, 3}}, {{2, 3}});
  EXPECT_FALSE(Q().mask_of(a) & Q().mask_of(b));
  EXPECT_TRUE(ctx.resolved());
  ctx.self_check();
}

TEST(Frame, RejectsAnOpenCycle) {
  auto cfg = ce::decode_config(R"({"pairs":[[[1,2],[3,3]],[[2,1],[2,3]]],"singletons":[]})");
  ce::RoutingContext ctx(Q(), cfg);
  ce::FrameSpec f;
  f.cycle = {{2, 2}, {2, 3}, {3, 3}};
  f.anchor = {2, 2};
  f.attach = {ce::Path{{1, 2}, {2, 2}}, ce::Path{{2, 1}, {2, 2}}};
  try {
    ce::complete_frame(ctx, f, {0, 1}, {{3, 3}}, {{2, 3}});
    FAIL();
  } catch (const ce::Error& e) {
    EXPECT_EQ(e.code(), ce::ErrorCode::kFrameConflict);
  }
}

TEST(Mate, GroupUsesFirstWorkingTuple) {
  auto cfg = ce::decode_config(R"({"pairs":[],"singletons":[[1,1],[2,2]]})");
  ce::RoutingContext ctx(Q(), cfg);
  std::vector<int> ids{ctx.id_of({1, 1}), ctx.id_of({2, 2})};
  ASSERT_TRUE(ce::mate_group(ctx, ids, {{{3, 1}, {3, 2}}}, Q().edge_mask()));
  auto plan = ctx.to_plan();
  ASSERT_EQ(plan.escapes.size(), 2u);
  // nothing left to mate, a second call cannot succeed on used edges only
  auto cfg2 = ce::decode_config(R"({"pairs":[],"singletons":[[1,1]]})");
  ce::RoutingContext c2(Q(), cfg2);
  EXPECT_FALSE(ce::mate_group(c2, {0}, {{{3, 1}}}, 0));
}
