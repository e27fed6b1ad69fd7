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

#ifndef HEATSCORE_METRICS_HPP_
#define HEATSCORE_METRICS_HPP_

#include <string>
#include <vector>

#include "heatscore/csv.hpp"
#include "heatscore/spectral.hpp"
#include "heatscore/targets.hpp"

namespace heatscore {

enum class W2Method { kBures, kAssignment, kSliced, kSorted };

std::string to_string(W2Method method);

struct W2Estimate {
  double value = 0.0;
  W2Method method = W2Method::kBures;
  double stderr_value = 0.0;  // 0 for closed forms
  int n_used = 0;
  std::uint64_t seed = 0;
};

inline constexpr int kAssignmentCap = 4096;
inline constexpr int kDefaultProjections = 256;

// Diagonal Gaussians: W2^2 = |m1 - m2|^2 + |sqrt(v1) - sqrt(v2)|^2.
W2Estimate w2_bures(const GaussianMeasure& g1, const GaussianMeasure& g2);
// Full covariances: tr(S1 + S2 - 2 (S2^{1/2} S1 S2^{1/2})^{1/2}).
W2Estimate w2_bures_dense(const Vec& m1, const Mat& s1, const Vec& m2,
                          const Mat& s2);

// Exact empirical W2 by optimal matching; stderr by the delta method over
// matched-pair costs.
W2Estimate w2_assignment(const SampleSet& s1, const SampleSet& s2);

// Monotone rearrangement of two equal-size 1D samples.
W2Estimate w2_sorted_1d(std::vector<double> a, std::vector<double> b);

struct SlicedOptions {
  int n_proj = kDefaultProjections;
  // Multiply by sqrt(d): for uniform directions E<u, v>^2 = |v|^2 / d, so the
  // scaled value is comparable to the full W2 across dimensions.
  bool dimension_normalized = false;
};

W2Estimate w2_sliced(const SampleSet& s1, const SampleSet& s2,
                     const RngStream& rng, const SlicedOptions& options = {});

// Per-coordinate mean and unbiased variance of a sample.
GaussianMeasure fit_gaussian(const SampleSet& samples);

// KL(p || N(0, C)) for a product-form target, summed over 1D quadratures.
// Accepts ProductMixture and single-component GaussianMixture targets.
double kl_quadrature(const TargetModel& target, const ModelSpace& space);

CsvTable estimates_to_csv(const std::vector<W2Estimate>& estimates);

}  // namespace heatscore

#endif  // HEATSCORE_METRICS_HPP_
