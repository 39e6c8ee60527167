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

#include "cornerescape/path_model.hpp"
#include "support/independent.hpp"

namespace ce = cornerescape;
using ce::LemmaId;
using ce::Violation;

namespace {

ce::TerminalConfig h5() {
  // pair (1,1)-(1,2); singletons (2,2), (3,1), (3,3)
  return ce::decode_config(
      R"({"pairs":[[[1,1],[1,2]]],"singletons":[[2,2],[3,1],[3,3]]})");
}

ce::EscapePlan good_h5() {
  ce::EscapePlan p;
  p.linkages.push_back({0, {{1, 1}, {1, 2}}});
  p.escapes.push_back({{2, 2}, {3, 2}, {{2, 2}, {3, 2}}});
  p.escapes.push_back({{3, 1}, {3, 1}, {{3, 1}}});
  p.escapes.push_back({{3, 3}, {3, 3}, {{3, 3}}});
  return p;
}

ce::Verdict check(const ce::EscapePlan& p) {
  return ce::validate_plan(ce::corner_grid(), h5(), p,
                           ce::contract_for(LemmaId::HEAVY5));
}

}  // namespace

TEST(Contract, Table) {
  EXPECT_EQ(ce::contract_for(LemmaId::HEAVY78).min_linked_pairs, 2);
  EXPECT_FALSE(ce::contract_for(LemmaId::HEAVY78).max_exits_in_B_minus_A);
  EXPECT_EQ(ce::contract_for(LemmaId::HEAVY6).max_exits_in_B_minus_A, 1);
  EXPECT_EQ(ce::contract_for(LemmaId::HEAVY5).exact_escapes, 3);
  EXPECT_THROW(ce::contract_for(LemmaId::W2L), ce::Error);
}

TEST(Validate, AcceptsAHandPlan) {
  EXPECT_TRUE(check(good_h5()).ok());
  EXPECT_TRUE(cetest::plan_ok(h5(), good_h5(), LemmaId::HEAVY5));
}

TEST(Validate, EdgeReuse) {
  auto p = good_h5();
  p.escapes[1] = {{3, 1}, {2, 1}, {{3, 1}, {2, 1}}};
  p.linkages[0].path = {{1, 1}, {2, 1}, {3, 1}, {2, 1}, {2, 2}, {1, 2}};
  auto v = check(p);
  EXPECT_TRUE(v.has(Violation::EDGE_REUSE) || v.has(Violation::NOT_A_PATH));
  p = good_h5();
  p.linkages[0].path = {{1, 1}, {2, 1}, {2, 2}, {1, 2}};
  p.escapes[0].path = {{2, 2}, {2, 1}, {3, 1}, {3, 2}};
  EXPECT_TRUE(check(p).has(Violation::EDGE_REUSE));
}

TEST(Validate, ExitCollision) {
  auto p = good_h5();
  p.escapes[0] = {{2, 2}, {3, 3}, {{2, 2}, {2, 3}, {3, 3}}};
  EXPECT_TRUE(check(p).has(Violation::EXIT_COLLISION));
}

TEST(Validate, BExitBound) {
  auto p = good_h5();
  p.escapes[0] = {{2, 2}, {2, 3}, {{2, 2}, {2, 3}}};
  p.escapes[2] = {{3, 3}, {1, 3}, {{3, 3}, {2, 3}, {1, 3}}};
  auto v = check(p);
  EXPECT_TRUE(v.has(Violation::B_EXIT_BOUND));
}

TEST(Validate, BadEndpointAndExitOffL) {
  auto p = good_h5();
  p.linkages[0].path = {{1, 1}, {2, 1}};
  EXPECT_TRUE(check(p).has(Violation::BAD_ENDPOINT));
  p = good_h5();
  p.escapes[0] = {{2, 2}, {2, 2}, {{2, 2}}};
  EXPECT_TRUE(check(p).has(Violation::BAD_ENDPOINT));
}

TEST(Validate, NotAPath) {
  auto p = good_h5();
  p.linkages[0].path = {{1, 1}, {2, 2}, {1, 2}};
  EXPECT_TRUE(check(p).has(Violation::NOT_A_PATH));
  p = good_h5();
  p.escapes[1].path = {};
  EXPECT_TRUE(check(p).has(Violation::NOT_A_PATH));
}

TEST(Validate, UnresolvedAndLinkCount) {
  auto p = good_h5();
  p.escapes.pop_back();
  EXPECT_TRUE(check(p).has(Violation::UNRESOLVED_TERMINAL));
  p = good_h5();
  p.linkages.clear();
  EXPECT_TRUE(check(p).has(Violation::LINK_COUNT));
}

TEST(Validate, PathsMayPassThroughTerminalsAndRevisitVertices) {
  auto p = good_h5();
  p.linkages[0].path = {{1, 1}, {2, 1}, {2, 2}, {2, 3}, {1, 3}, {1, 2}};
  EXPECT_TRUE(check(p).ok());
  p.linkages[0].path = {{1, 1}, {1, 2}, {2, 2}, {2, 3}, {1, 3}, {1, 2}};
  p.escapes[0] = {{2, 2}, {3, 2}, {{2, 2}, {3, 2}}};
  EXPECT_TRUE(check(p).ok());
}

TEST(Validate, AgreesWithIndependentCheckerOnMutants) {
  auto base = good_h5();
  for (const auto& m : cetest::mutants(base))
    EXPECT_EQ(check(m).ok(), cetest::plan_ok(h5(), m, LemmaId::HEAVY5))
        << ce::encode_plan(m).dump();
}

TEST(Plan, JsonRoundTrip) {
  auto p = good_h5();
  EXPECT_EQ(ce::decode_plan(ce::encode_plan(p)), p);
  EXPECT_THROW(ce::decode_plan(nlohmann::json::parse(R"({"linkages":[{}]})")),
               ce::Error);
}

TEST(Plan, ReflectionKeepsValidityWithoutTheBBound) {
  auto cfg = ce::decode_config(
      R"({"pairs":[[[1,1],[1,2]],[[2,1],[2,2]],[[1,3],[3,1]]],"singletons":[[3,3]]})");
  ce::EscapePlan p;
  p.linkages.push_back({cfg.pair_of({1, 1}), {{1, 1}, {1, 2}}});
  p.linkages.push_back({cfg.pair_of({2, 1}), {{2, 1}, {2, 2}}});
  p.escapes.push_back({{1, 3}, {1, 3}, {{1, 3}}});
  p.escapes.push_back({{3, 1}, {3, 1}, {{3, 1}}});
  p.escapes.push_back({{3, 3}, {3, 3}, {{3, 3}}});
  auto c = ce::contract_for(LemmaId::HEAVY78);
  ASSERT_TRUE(ce::validate_plan(ce::corner_grid(), cfg, p, c).ok());
  auto rc = ce::diagonal_reflect(cfg);
  auto rp = ce::diagonal_reflect(p, cfg);
  EXPECT_TRUE(ce::validate_plan(ce::corner_grid(), rc, rp, c).ok());
}
