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

#include "cornerescape/oracle.hpp"
#include "support/independent.hpp"

namespace ce = cornerescape;
using ce::LemmaId;

TEST(WeakLinkage, QAndQMinusCorner) {
  auto a = ce::check_weakly_2_linked(ce::corner_grid());
  EXPECT_TRUE(a.ok);
  EXPECT_EQ(a.tuples, 6561u);
  auto b = ce::check_weakly_2_linked(ce::build_corner_grid({ce::kCorner}));
  EXPECT_TRUE(b.ok);
  EXPECT_EQ(b.tuples, 4096u);
}

TEST(WeakLinkage, APathIsNot) {
  // a 1x3 path: (1,1)-(1,3) and (1,2)-(1,3) share the last edge
  ce::GridGraph g(1, 3, {});
  auto r = ce::check_weakly_2_linked(g);
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.counterexample.has_value());
}

TEST(Trails, ShortlexOrder) {
  auto ts = ce::trails_within(ce::corner_grid(), {1, 1}, {1, 2},
                              ce::corner_grid().edge_mask());
  ASSERT_FALSE(ts.empty());
  EXPECT_EQ(ts[0], (ce::Path{{1, 1}, {1, 2}}));
  for (size_t i = 1; i < ts.size(); ++i)
    EXPECT_LE(ts[i - 1].size(), ts[i].size());
}

TEST(Oracle, WitnessesAreValidAndExistenceMatchesBruteForce) {
  for (LemmaId l : {LemmaId::HEAVY78, LemmaId::HEAVY6, LemmaId::HEAVY5}) {
    auto cfgs = ce::enumerate_configs(l);
    const auto c = ce::contract_for(l);
    // every 37th config keeps the brute force cheap
    for (size_t i = 0; i < cfgs.size(); i += 37) {
      auto r = ce::oracle_solve(ce::corner_grid(), cfgs[i], c);
      ASSERT_EQ(r.found(), cetest::plan_exists(cfgs[i], l))
          << ce::encode_config(cfgs[i]).dump();
      if (r.found()) {
        EXPECT_TRUE(ce::validate_plan(ce::corner_grid(), cfgs[i], *r.plan, c).ok());
        EXPECT_TRUE(cetest::plan_ok(cfgs[i], *r.plan, l));
      }
    }
  }
}

TEST(Oracle, Deterministic) {
  auto cfg = ce::enumerate_configs(LemmaId::HEAVY78)[1234];
  auto c = ce::contract_for(LemmaId::HEAVY78);
  auto a = ce::oracle_solve(ce::corner_grid(), cfg, c);
  auto b = ce::oracle_solve(ce::corner_grid(), cfg, c);
  ASSERT_TRUE(a.found());
  EXPECT_EQ(*a.plan, *b.plan);
}

TEST(Oracle, ReportsInfeasible) {
  // five escapes but only five exits, and the B bound allows one of (1,3),(2,3)
  auto cfg = ce::decode_config(
      R"({"pairs":[[[1,1],[2,2]]],"singletons":[[1,3],[2,3],[3,3]]})");
  ce::EscapeContract c = ce::contract_for(LemmaId::HEAVY5);
  c.min_linked_pairs = 0;
  c.exact_escapes = 5;
  auto r = ce::oracle_solve(ce::corner_grid(), cfg, c);
  EXPECT_EQ(r.status, ce::OracleStatus::kNone);
}

TEST(Oracle, Budget) {
  auto cfg = ce::enumerate_configs(LemmaId::HEAVY78).back();
  auto r = ce::oracle_solve(ce::corner_grid(), cfg,
                            ce::contract_for(LemmaId::HEAVY78),
                            ce::SearchBudget::nodes(1));
  EXPECT_EQ(r.status, ce::OracleStatus::kBudgetExhausted);
}
