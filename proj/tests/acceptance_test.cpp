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
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "cornerescape/harness.hpp"
#include "support/independent.hpp"

namespace ce = cornerescape;
using ce::LemmaId;

namespace {

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << id << ": " << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string summary(const ce::CampaignReport& r) {
  std::ostringstream os;
  os << r.valid << "/" << r.total << " valid, " << r.failures.size()
     << " failures, oracle confirmed " << r.oracle_confirmed << ", fallbacks "
     << r.fallbacks << ", patched " << r.patched << ", " << r.wall_time << " s";
  return os.str();
}

int jobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n ? static_cast<int>(std::min(n, 8u)) : 2;
}

}  // namespace

int main() {
  const std::vector<LemmaId> fams{LemmaId::HEAVY78, LemmaId::HEAVY6, LemmaId::HEAVY5};

  // 1. weak 2-linkage, single-threaded
  {
    auto t0 = std::chrono::steady_clock::now();
    ce::W2LReport w = ce::verify_w2l();
    double t = seconds_since(t0);
    std::ostringstream os;
    os << "Q " << w.tuples_full << " tuples, Q-(3,3) " << w.tuples_punctured
       << " tuples, " << t << " s";
    report("1 weak-2-linkage", w.ok() && w.tuples_full == 6561 &&
                                   w.tuples_punctured == 4096 && t < 30,
           os.str());
  }

  // 2-4. full campaigns with oracle cross-check (fallback allowed)
  std::map<LemmaId, ce::CampaignReport> loose;
  for (LemmaId l : fams) loose[l] = ce::verify_all(l, {false, jobs(), true});
  {
    const auto& r = loose[LemmaId::HEAVY78];
    report("2 heavy78 campaign",
           r.total == 4725 && r.valid == 4725 && r.failures.empty() &&
               r.oracle_confirmed == 4725 && r.wall_time < 300,
           summary(r));
  }
  {
    const auto& r = loose[LemmaId::HEAVY6];
    int worst_b = 0;
    for (const auto& cfg : ce::enumerate_configs(LemmaId::HEAVY6)) {
      int b = 0;
      for (const auto& e : ce::route(cfg).first.escapes) b += ce::in_B_minus_A(e.exit);
      worst_b = std::max(worst_b, b);
    }
    report("3 heavy6 campaign",
           r.total == 3780 && r.valid == 3780 && r.failures.empty() && worst_b <= 1,
           summary(r) + ", max exits in B\\A " + std::to_string(worst_b));
  }
  {
    const auto& r = loose[LemmaId::HEAVY5];
    report("4 heavy5 campaign",
           r.total == 1260 && r.valid == 1260 && r.failures.empty(), summary(r));
  }

  // 5. strict mode: no fallback anywhere
  {
    std::size_t fb = 0, fails = 0, patched = 0, loose_fail = 0;
    std::ostringstream os;
    for (LemmaId l : fams) {
      auto r = ce::verify_all(l, {true, jobs(), false});
      fb += r.fallbacks + loose[l].fallbacks;
      fails += r.failures.size();
      patched += r.patched;
      loose_fail += loose[l].failures.size();
      os << ce::to_string(l) << " gaps " << r.failures.size() << " patched "
         << r.patched << "; ";
    }
    os << "fallbacks " << fb << ", non-strict failures " << loose_fail;
    report("5 strict transliteration", fb == 0 && fails == 0 && loose_fail == 0,
           os.str());
  }

  // 6. clip catalog
  {
    const auto& cat = ce::clip_catalog();
    int bad = 0;
    for (const auto& c : cat) bad += !ce::verify_clip(ce::corner_grid(), c).ok;
    report("6 clip catalog", cat.size() >= 8 && bad == 0,
           std::to_string(cat.size()) + " clips, " + std::to_string(bad) + " failing");
  }

  // 7a. two validators agree on every campaign plan and its mutants
  {
    std::size_t plans = 0, checked = 0, disagree = 0;
    for (LemmaId l : fams) {
      const auto c = ce::contract_for(l);
      for (const auto& cfg : ce::enumerate_configs(l)) {
        auto plan = ce::route(cfg, true).first;
        ++plans;
        auto one = [&](const ce::EscapePlan& p) {
          ++checked;
          bool a = ce::validate_plan(ce::corner_grid(), cfg, p, c).ok();
          bool b = cetest::plan_ok(cfg, p, l);
          if (a != b) {
            if (disagree < 5)
              std::cout << "  disagree on " << ce::encode_config(cfg).dump()
                        << " " << ce::encode_plan(p).dump() << "\n";
            ++disagree;
          }
        };
        one(plan);
        for (const auto& m : cetest::mutants(plan)) one(m);
      }
    }
    report("7a validator agreement", disagree == 0,
           std::to_string(plans) + " plans, " + std::to_string(checked) +
               " checks, " + std::to_string(disagree) + " disagreements");
  }

  // 7b. reflecting a plan gives a plan for the reflected config
  {
    const auto c = ce::contract_for(LemmaId::HEAVY78);
    std::size_t bad = 0, n = 0, sym = 0;
    for (const auto& cfg : ce::enumerate_configs(LemmaId::HEAVY78)) {
      auto [plan, trace] = ce::route_heavy78(cfg, true);
      sym += trace.symmetry_applied;
      ++n;
      if (!ce::validate_plan(ce::corner_grid(), ce::diagonal_reflect(cfg),
                             ce::diagonal_reflect(plan, cfg), c)
               .ok())
        ++bad;
    }
    report("7b reflection transport", bad == 0,
           std::to_string(n) + " plans reflected, " + std::to_string(bad) +
               " invalid (" + std::to_string(sym) + " routed via symmetry)");
  }

  // 7c. two campaign runs, different worker counts, same bytes
  {
    bool same = true;
    for (LemmaId l : fams) {
      auto a = ce::verify_all(l, {true, 1, true});
      auto b = ce::verify_all(l, {true, jobs(), true});
      same &= ce::encode_report(a, false).dump() == ce::encode_report(b, false).dump();
      auto c = ce::verify_all(l, {false, jobs(), true});
      same &= ce::encode_report(c, false).dump() ==
              ce::encode_report(loose[l], false).dump();
    }
    report("7c determinism", same, "reports identical modulo wall_time across runs and job counts");
  }

  // 7d. dead-case alarm
  {
    std::ostringstream os;
    std::size_t dead = 0, labels = 0;
    for (LemmaId l : fams) {
      dead += loose[l].dead_cases.size();
      labels += ce::case_catalog(l).size();
      for (const auto& d : loose[l].dead_cases) os << " dead:" << d;
    }
    report("7d dead-case alarm", dead == 0,
           std::to_string(labels) + " case labels, " + std::to_string(dead) +
               " never hit" + os.str());
  }

  std::cout << (failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED") << std::endl;
  return failures ? 1 : 0;
}
