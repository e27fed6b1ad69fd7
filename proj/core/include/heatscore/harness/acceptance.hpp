// Copyright 2026 The heatscore Authors
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

#ifndef HEATSCORE_HARNESS_ACCEPTANCE_HPP_
#define HEATSCORE_HARNESS_ACCEPTANCE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "heatscore/csv.hpp"
#include "heatscore/sampler.hpp"

namespace heatscore::harness {

inline constexpr int kCriterionCount = 14;
inline constexpr std::uint64_t kDefaultAcceptanceSeed = 20260314;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  // Threshold the measurement is compared against; `bound_text` spells out
  // intervals.
  double bound = 0.0;
  std::string bound_text;
  std::uint64_t seed = 0;
  std::string detail;
  double seconds = 0.0;
  double runtime_limit = 0.0;
  bool runtime_ok = true;
};

struct AcceptanceOptions {
  // Criterion ids to run; empty means all.
  std::vector<int> only;
  std::uint64_t seed = kDefaultAcceptanceSeed;
  int threads = 0;
  bool enforce_runtime = true;
  // Fault injection: corrupt the stationarity channel, or replace the exact
  // score by an eps-perturbed one in the bound-audit reruns.
  ChannelMutation mutation;
  double inject_eps = 0.0;
  // When set, experiment outputs and the verdict files are written here.
  std::string out_dir;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;

  bool all_passed() const;
  CsvTable to_csv() const;
  std::string to_json() const;
};

std::string criterion_name(int id);
std::string format_line(const CriterionResult& result);

AcceptanceReport run_acceptance(const AcceptanceOptions& options = {});

}  // namespace heatscore::harness

#endif  // HEATSCORE_HARNESS_ACCEPTANCE_HPP_
