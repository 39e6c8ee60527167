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

#include <set>

#include "cornerescape/terminals.hpp"

namespace ce = cornerescape;
using ce::LemmaId;

TEST(Enumeration, FamilySizes) {
  EXPECT_EQ(ce::enumerate_configs(LemmaId::HEAVY78).size(), 4725u);
  EXPECT_EQ(ce::enumerate_configs(LemmaId::HEAVY6).size(), 3780u);
  EXPECT_EQ(ce::enumerate_configs(LemmaId::HEAVY5).size(), 1260u);
}

TEST(Enumeration, OptInSixWithOnePair) {
  ce::EnumerationOptions o;
  o.six_with_one_pair = true;
  // 9C6 * 15 pair choices on top of the 2+2 family
  EXPECT_EQ(ce::enumerate_configs(LemmaId::HEAVY6, o).size(), 3780u + 84u * 15u);
}

TEST(Enumeration, CanonicalAndDistinct) {
  for (LemmaId l : {LemmaId::HEAVY78, LemmaId::HEAVY6, LemmaId::HEAVY5}) {
    auto cfgs = ce::enumerate_configs(l);
    std::set<ce::TerminalConfig> seen(cfgs.begin(), cfgs.end());
    EXPECT_EQ(seen.size(), cfgs.size());
    for (const auto& c : cfgs) {
      ASSERT_EQ(c, c.canonical());
      ASSERT_EQ(ce::family_of(c), l);
    }
  }
}

TEST(Enumeration, W2LIsNotAConfigFamily) {
  EXPECT_THROW(ce::enumerate_configs(LemmaId::W2L), ce::Error);
}

TEST(Config, JsonRoundTrip) {
  auto cfg = ce::decode_config(
      R"({"pairs":[[[2,2],[1,1]]],"singletons":[[3,3],[1,3],[2,3]]})");
  EXPECT_EQ(cfg.pairs[0].first, (ce::Vertex{1, 1}));
  EXPECT_EQ(ce::decode_config(ce::encode_config(cfg)), cfg);
}

TEST(Config, MalformedInputNamesTheField) {
  try {
    ce::decode_config(R"({"pairs":[[[1,1],[1,9]]],"singletons":[]})");
    FAIL();
  } catch (const ce::Error& e) {
    EXPECT_EQ(e.code(), ce::ErrorCode::kMalformedConfig);
    EXPECT_NE(std::string(e.what()).find("pairs[0]"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ce::decode_config("{not json"), ce::Error);
  EXPECT_THROW(ce::decode_config(R"({"pairs":[[[1,1],[1,1]]],"singletons":[]})"),
               ce::Error);
}

TEST(Config, Reflection) {
  auto cfg = ce::decode_config(R"({"pairs":[[[1,1],[1,3]]],"singletons":[[3,2]]})");
  auto r = ce::diagonal_reflect(cfg);
  EXPECT_EQ(r.pairs[0], (ce::VertexPair{{1, 1}, {3, 1}}));
  EXPECT_EQ(r.singletons[0], (ce::Vertex{2, 3}));
  EXPECT_EQ(ce::diagonal_reflect(r), cfg);
}

TEST(Config, DemotePair) {
  auto cfg = ce::decode_config(
      R"({"pairs":[[[1,1],[1,2]],[[2,1],[2,2]],[[3,1],[3,2]]],"singletons":[]})");
  EXPECT_FALSE(ce::family_of(cfg).has_value());
  auto d = ce::demote_pair_to_singletons(cfg, 2);
  EXPECT_EQ(ce::family_of(d), LemmaId::HEAVY6);
  EXPECT_THROW(ce::demote_pair_to_singletons(cfg, 3), ce::Error);
}

TEST(Lemma, ParseNames) {
  EXPECT_EQ(ce::parse_lemma("heavy6"), LemmaId::HEAVY6);
  EXPECT_FALSE(ce::parse_lemma("heavy7").has_value());
}
