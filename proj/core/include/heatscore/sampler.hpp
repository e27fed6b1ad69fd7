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

#ifndef HEATSCORE_SAMPLER_HPP_
#define HEATSCORE_SAMPLER_HPP_

#include <optional>
#include <string>
#include <vector>

#include "heatscore/scores.hpp"
#include "heatscore/spectral.hpp"

namespace heatscore {

// One backward run: Y_0 ~ N(0, C), then
//   Y_{k+1} = (Y_k + (1 - a_k) s(T - t_k, Y_k)) / sqrt(a_k) + sqrt(1 - a_k) z,
// z ~ N(0, C). Path i draws from rng.substream(i), so two runs sharing an
// RngStream share their Brownian increments (coupled mode).
struct SamplerRun {
  SamplerRun(Schedule schedule, ScoreModel score, int n_paths, RngStream rng,
             std::vector<int> record_steps = {});

  Schedule schedule;
  ScoreModel score;
  int n_paths;
  RngStream rng;
  // Step indices in [0, N] whose iterates are kept; N is always kept.
  std::vector<int> record_steps;
  // Small-step hypothesis cap; a larger tau produces a warning.
  std::optional<double> tau_cap;

  std::vector<std::string> warnings() const;
};

// z is a standard normal d-vector; the step scales it by sqrt(C).
Vec step_with_noise(const Vec& y, int k, const SamplerRun& run, const Vec& z);
Vec step(const Vec& y, int k, const SamplerRun& run, RngEngine& engine);

struct PathFailure {
  int path = 0;
  int step = 0;
  std::string message;
};

struct RunResult {
  std::vector<int> record_steps;
  // Surviving paths only, in path-index order.
  std::vector<SampleSet> records;
  std::vector<PathFailure> failures;

  const SampleSet& final_samples() const { return records.back(); }
  bool partial() const { return !failures.empty(); }
};

RunResult run_paths(const SamplerRun& run, int threads = 0);

// Per-step affine maps of the scheme for a Gaussian target with exact score.
struct GaussianChannel {
  std::vector<Vec> scale;
  std::vector<Vec> shift;
  std::vector<Vec> noise_var;

  int steps() const { return static_cast<int>(scale.size()); }
  GaussianMeasure push(const GaussianMeasure& in, int k) const;
  GaussianMeasure push_all(const GaussianMeasure& in) const;
};

// Test hook: the drift coefficient reads alpha from points (k, k + 1 + shift)
// while the noise keeps the true alpha. shift = 0 is the correct scheme.
struct ChannelMutation {
  int drift_alpha_shift = 0;
};

GaussianChannel build_channel(const Schedule& schedule,
                              const GaussianMeasure& law0,
                              const ModelSpace& space,
                              const ChannelMutation& mutation = {});
// Rejects runs whose score is not affine in x.
GaussianChannel build_channel(const SamplerRun& run,
                              const ChannelMutation& mutation = {});
// Output law of the full discrete scheme started at N(0, C).
GaussianMeasure exact_channel(const SamplerRun& run,
                              const ChannelMutation& mutation = {});

struct MartingaleOptions {
  double horizon = 4.0;
  double tau = 0.01;
  int n_paths = 100000;
  int checkpoints = 10;
  RngStream rng;
};

struct MartingaleReport {
  std::vector<double> times;
  // Per checkpoint: mean of M_t, mean of M_t - M_0, and its standard error,
  // where M_t = e^{-t/2} (s(T - t, X_t) + X_t).
  std::vector<Vec> mean;
  std::vector<Vec> drift;
  std::vector<Vec> drift_stderr;
  std::vector<double> drift_in_se;
  double max_drift_in_se = 0.0;
};

// Starts from the exact P_T and runs the scheme with step tau.
MartingaleReport martingale_diagnostic(const ScoreModel& exact,
                                       const MartingaleOptions& options);

}  // namespace heatscore

#endif  // HEATSCORE_SAMPLER_HPP_
