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

#ifndef HEATSCORE_HARNESS_EXPERIMENTS_HPP_
#define HEATSCORE_HARNESS_EXPERIMENTS_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "heatscore/bounds.hpp"
#include "heatscore/csv.hpp"
#include "heatscore/harness/config.hpp"
#include "heatscore/harness/fit.hpp"
#include "heatscore/harness/svg.hpp"
#include "heatscore/metrics.hpp"
#include "heatscore/sampler.hpp"

namespace heatscore::harness {

// ---- building blocks shared with the acceptance suite ----

// Exact-score sampler output pushed through the Gaussian channel, against
// the Gaussian target itself.
W2Estimate channel_w2(const GaussianMeasure& law0, const ModelSpace& space,
                      const Schedule& schedule, const ChannelMutation& mutation = {});

struct CoupledOptions {
  double omega = 1.0;
  int calibration_samples = 2000;
  int threads = 0;
};

struct CoupledResult {
  W2Estimate w2;
  double amplitude = 0.0;
  double measured_rms = 0.0;
  std::size_t failures = 0;
};

// Sinusoidal perturbation of RMS size eps on a diagonal Gaussian target.
// The exact run shares every random number with the perturbed run; its
// output is N(m, V) exactly, and the coordinatewise monotone map onto the
// target turns it into a target sample coupled path-by-path to the perturbed
// output. W2 is then the coordinatewise sorted coupling (exact for the
// product laws produced here).
CoupledResult coupled_perturbation_w2(const GaussianMeasure& law0,
                                      const ModelSpace& space,
                                      const Schedule& schedule, double eps,
                                      int n_paths, const RngStream& rng,
                                      const CoupledOptions& options = {});

// Monte Carlo W2 of the sampler output against an independent draw from the
// law. d = 1 uses the sorted coupling, otherwise sliced W2 scaled by sqrt(d).
W2Estimate sample_w2(const SampleSet& output, const MarginalLaw& law,
                     const RngStream& rng, int n_proj = kDefaultProjections);

// ---- experiments ----

enum class ExperimentTag {
  kTauSweep,
  kTSweep,
  kEpsSweep,
  kDimSweep,
  kTraceFixedDimSweep,
  kBoundAudit,
  kBayesDemo,
  kKlVsW2
};

std::string to_string(ExperimentTag tag);
ExperimentTag parse_experiment_tag(const std::string& text);

struct ExperimentSpec {
  ExperimentTag tag = ExperimentTag::kTauSweep;
  Config target;
  std::string config_hash;
  std::string config_text;
  std::vector<double> grid;
  double horizon = 8.0;
  double tau = 0.01;
  double eps = 0.0;
  double delta = 0.0;
  double omega = 1.0;
  int n_paths = 4096;
  int n_proj = kDefaultProjections;
  std::uint64_t seed = 1;
  // bound_audit sub-grids
  std::vector<double> tau_grid;
  std::vector<double> horizon_grid;
  std::vector<double> eps_grid;
};

// Experiment keys and target keys may share one file, or `target_config`
// names a separate target file (relative to `base_dir`).
//   experiment = tau_sweep | T_sweep | eps_sweep | dim_sweep |
//                trace_fixed_dim_sweep | bound_audit | bayes_demo | kl_vs_w2
//   grid = ...        T = ...   tau = ...   eps = ...   delta = ...
//   omega = ...       n_paths = ...   n_proj = ...   seed = ...
//   tau_grid / T_grid / eps_grid (bound_audit)
ExperimentSpec experiment_from_config(const Config& config,
                                      const std::string& base_dir = ".");

struct ExperimentRow {
  std::string point;
  double horizon = 0.0;
  double tau = 0.0;
  double eps = 0.0;
  int dim = 0;
  int n_paths = 0;
  W2Estimate w2;
  double bound = std::numeric_limits<double>::quiet_NaN();  // W2^2 scale
  double margin = std::numeric_limits<double>::quiet_NaN();
  std::optional<bool> tau_hypothesis_met;
  std::string status = "ok";
  std::string notes;
  double seconds = 0.0;
};

struct SummaryRow {
  std::string name;
  double value = 0.0;
  double low = std::numeric_limits<double>::quiet_NaN();
  double high = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ExperimentRow> rows;
  std::vector<SummaryRow> summary;
  std::vector<std::string> warnings;

  // Every row ran and no bound was violated.
  bool ok() const;
  // Deterministic: no timing columns.
  CsvTable table() const;
  CsvTable timings() const;
  ChartSpec chart() const;
};

ExperimentResult run_experiment(const ExperimentSpec& spec, int threads = 0);

// results.csv, timings.csv, chart.svg and manifest.json under `dir`.
void write_experiment(const ExperimentResult& result, const std::string& dir);

}  // namespace heatscore::harness

#endif  // HEATSCORE_HARNESS_EXPERIMENTS_HPP_
