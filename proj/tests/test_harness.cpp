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

#include <cstdio>
#include <fstream>

#include "cornerescape/harness.hpp"

namespace ce = cornerescape;
using ce::LemmaId;

TEST(Campaign, Heavy5Strict) {
  auto r = ce::verify_all(LemmaId::HEAVY5, {true, 1, true});
  EXPECT_EQ(r.total, 1260u);
  EXPECT_EQ(r.valid, 1260u);
  EXPECT_EQ(r.valid + r.failures.size(), r.total);
  EXPECT_EQ(r.fallbacks, 0u);
  EXPECT_EQ(r.oracle_confirmed, 1260u);
  EXPECT_TRUE(r.dead_cases.empty());
  EXPECT_EQ(ce::exit_status(r), 0);
}

TEST(Campaign, JobsDoNotChangeTheReport) {
  auto a = ce::verify_all(LemmaId::HEAVY6, {false, 1, false});
  auto b = ce::verify_all(LemmaId::HEAVY6, {false, 4, false});
  EXPECT_EQ(ce::encode_report(a, false).dump(), ce::encode_report(b, false).dump());
}

TEST(Campaign, RejectsBadArguments) {
  EXPECT_THROW(ce::verify_all(LemmaId::HEAVY5, {false, 0, false}), ce::Error);
  EXPECT_THROW(ce::verify_all(LemmaId::W2L), ce::Error);
}

TEST(Campaign, MergeIsOrderIndependent) {
  ce::CampaignReport x, y;
  x.total = 2;
  x.valid = 1;
  x.case_histogram["a"] = 1;
  x.failures.push_back({ce::enumerate_configs(LemmaId::HEAVY5)[5],
                        ce::FailureKind::kCaseGap, {}, "x"});
  y.total = 3;
  y.valid = 2;
  y.case_histogram["a"] = 2;
  y.case_histogram["b"] = 1;
  y.failures.push_back({ce::enumerate_configs(LemmaId::HEAVY5)[1],
                        ce::FailureKind::kInvalid, {}, "y"});
  ce::CampaignReport xy, yx;
  xy.merge(x);
  xy.merge(y);
  yx.merge(y);
  yx.merge(x);
  EXPECT_EQ(ce::encode_report(xy, false), ce::encode_report(yx, false));
  EXPECT_EQ(xy.case_histogram["a"], 3u);
  EXPECT_EQ(ce::exit_status(xy), 2);
}

TEST(Campaign, ExitStatusPrecedence) {
  ce::CampaignReport r;
  EXPECT_EQ(ce::exit_status(r), 0);
  r.failures.push_back({{}, ce::FailureKind::kCaseGap, {}, ""});
  EXPECT_EQ(ce::exit_status(r), 4);
  r.failures.push_back({{}, ce::FailureKind::kOracle, {}, ""});
  EXPECT_EQ(ce::exit_status(r), 3);
  r.failures.push_back({{}, ce::FailureKind::kInvalid, {}, ""});
  EXPECT_EQ(ce::exit_status(r), 2);
}

TEST(Campaign, DeadCaseAlarm) {
  std::map<std::string, std::size_t> hist{{"heavy5/case-c", 4}};
  auto dead = ce::dead_cases(LemmaId::HEAVY5, hist);
  EXPECT_EQ(dead.size(), ce::case_catalog(LemmaId::HEAVY5).size() - 1);
  EXPECT_EQ(std::find(dead.begin(), dead.end(), "heavy5/case-c"), dead.end());
}

TEST(W2L, Counts) {
  auto r = ce::verify_w2l();
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.tuples_full, 6561u);
  EXPECT_EQ(r.tuples_punctured, 4096u);
}

TEST(Render, EmptyPlanIsABareGrid) {
  EXPECT_EQ(ce::render_ascii({}),
            "+---+---+\n"
            "|   |   |\n"
            "+---+---+\n"
            "|   |   |\n"
            "+---+---+\n");
}

TEST(Render, ZeroLengthEscapeIsOnlyAnExitMarker) {
  ce::EscapePlan p;
  p.escapes.push_back({{3, 2}, {3, 2}, {{3, 2}}});
  std::string s = ce::render_ascii(p);
  EXPECT_EQ(s.substr(0, 40),
            "+---+---+\n"
            "|   |   |\n"
            "+---+---+\n"
            "|   |   |\n");
  EXPECT_EQ(s.substr(40, 10), "+---@---+\n");
}

TEST(Render, NoEdgeCarriesTwoGlyphs) {
  for (LemmaId l : {LemmaId::HEAVY78, LemmaId::HEAVY6, LemmaId::HEAVY5}) {
    auto cfgs = ce::enumerate_configs(l);
    for (size_t i = 0; i < cfgs.size(); i += 53) {
      auto plan = ce::route(cfgs[i], true).first;
      std::string s = ce::render_ascii(plan);
      // horizontal edges are three equal characters
      std::istringstream in(s);
      std::string line;
      for (int row = 0; row < 5 && std::getline(in, line); ++row) {
        if (row % 2) continue;
        for (int c = 0; c < 2; ++c)
          ASSERT_TRUE(line[4 * c + 1] == line[4 * c + 2] &&
                      line[4 * c + 2] == line[4 * c + 3])
              << s;
      }
      // every path's glyph appears on exactly its edges
      size_t glyph_cells = 0;
      for (char ch : s.substr(0, 50))
        if (ch != '+' && ch != '-' && ch != '|' && ch != ' ' && ch != '\n' &&
            ch != '#' && ch != '@')
          ++glyph_cells;
      size_t edges = 0;
      for (const auto& lk : plan.linkages) edges += lk.path.size() - 1;
      for (const auto& e : plan.escapes) edges += e.path.size() - 1;
      size_t vertical = 0;
      for (const auto& lk : plan.linkages)
        for (size_t k = 1; k < lk.path.size(); ++k)
          vertical += lk.path[k].col == lk.path[k - 1].col;
      for (const auto& e : plan.escapes)
        for (size_t k = 1; k < e.path.size(); ++k)
          vertical += e.path[k].col == e.path[k - 1].col;
      ASSERT_EQ(glyph_cells, vertical + 3 * (edges - vertical)) << s;
    }
  }
}

TEST(Render, Dot) {
  auto plan = ce::route(ce::enumerate_configs(LemmaId::HEAVY5)[0]).first;
  std::string d = ce::render_dot(plan);
  EXPECT_EQ(d.rfind("graph plan {", 0), 0u);
  EXPECT_NE(d.find("penwidth=3"), std::string::npos);
  EXPECT_NE(d.find("style=dashed"), std::string::npos);
}

TEST(Solve, FixtureCarriesFamilyAndClip) {
  auto s = ce::solve_file(std::string(CE_FIXTURE_DIR) + "/heavy6_case-b_S4.json");
  EXPECT_TRUE(s.verdict.ok());
  ASSERT_FALSE(s.trace.case_labels.empty());
  const std::string& label = s.trace.case_labels.back();
  EXPECT_EQ(label.rfind("heavy6/", 0), 0u);
  bool names_clip = false;
  for (const auto& c : ce::clip_catalog())
    names_clip |= label.find(c.name) != std::string::npos;
  EXPECT_TRUE(names_clip) << label;
}

TEST(Solve, Heavy5PlanShape) {
  auto s = ce::solve_file(std::string(CE_FIXTURE_DIR) + "/heavy5_case-c.json");
  EXPECT_EQ(s.plan.linkages.size(), 1u);
  EXPECT_EQ(s.plan.escapes.size(), 3u);
}

TEST(Solve, MalformedFileNamesTheField) {
  const std::string path = ::testing::TempDir() + "bad_config.json";
  {
    std::ofstream out(path);
    out << R"({"pairs":[[[1,1],[1,2]]],"singletons":[[3,1],[3,2],[4,4]]})";
  }
  try {
    ce::solve_file(path);
    FAIL();
  } catch (const ce::Error& e) {
    EXPECT_EQ(e.code(), ce::ErrorCode::kMalformedConfig);
    EXPECT_NE(std::string(e.what()).find("singletons[2]"), std::string::npos) << e.what();
  }
  std::remove(path.c_str());
  EXPECT_THROW(ce::solve_file(path + ".missing"), ce::Error);
}
