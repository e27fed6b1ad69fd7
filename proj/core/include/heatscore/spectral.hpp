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

#ifndef HEATSCORE_SPECTRAL_HPP_
#define HEATSCORE_SPECTRAL_HPP_

// Shared numeric substrate. Every covariance in the library is a diagonal
// spectrum expressed in the common eigenbasis of the base covariance C and the
// tail covariance A, so "d-vector" and "diagonal operator" are both Vec.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "heatscore/rng.hpp"

namespace heatscore {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> values);
double compensated_sum(const Vec& values);

// Ambient dimension together with the spectra of C (base covariance) and A
// (Gaussian-tail covariance) in their shared eigenbasis.
class ModelSpace {
 public:
  ModelSpace(Vec c, Vec a);
  // A defaults to C.
  explicit ModelSpace(Vec c);

  static ModelSpace isotropic(int dim, double c = 1.0, double a = 1.0);

  int dim() const { return static_cast<int>(c_.size()); }
  const Vec& c() const { return c_; }
  const Vec& a() const { return a_; }
  double trace_c() const { return trace_c_; }
  double norm_c() const { return c_.maxCoeff(); }

  // max{Tr C, M2, 1}; before a second moment is attached this is max{Tr C, 1}.
  double m0() const { return m0_; }
  std::optional<double> m2() const { return m2_; }
  ModelSpace with_second_moment(double m2) const;
  ModelSpace with_tail(Vec a) const;

  // True when A == C elementwise; downstream this forces K = 1 and L2 = 0.
  bool tail_matches_base() const;

 private:
  Vec c_;
  Vec a_;
  double trace_c_ = 0.0;
  double m0_ = 1.0;
  std::optional<double> m2_;
};

struct GaussianMeasure {
  Vec mean;
  Vec var;  // diagonal covariance in the shared eigenbasis

  GaussianMeasure(Vec mean_in, Vec var_in);
  int dim() const { return static_cast<int>(mean.size()); }
};

// Discretization points 0 = t_0 < ... < t_N = T - delta with
// alpha_k = exp(t_k - t_{k+1}).
class Schedule {
 public:
  static Schedule uniform(double horizon, double delta, int steps);
  static Schedule from_points(double horizon, double delta,
                              std::vector<double> points);

  double horizon() const { return horizon_; }
  double delta() const { return delta_; }
  int steps() const { return static_cast<int>(alphas_.size()); }
  double tau() const { return tau_; }
  double point(int k) const { return points_[k]; }
  double alpha(int k) const { return alphas_[k]; }
  double step_size(int k) const { return points_[k + 1] - points_[k]; }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& alphas() const { return alphas_; }

  // Score time T - t_k queried at step k.
  double score_time(int k) const { return horizon_ - points_[k]; }

 private:
  Schedule(double horizon, double delta, std::vector<double> points);

  double horizon_;
  double delta_;
  std::vector<double> points_;
  std::vector<double> alphas_;
  double tau_ = 0.0;
};

Schedule make_uniform_schedule(double horizon, double delta, int steps);

// n draws in R^d stored row-wise, tagged with the seed that produced them.
struct SampleSet {
  Mat draws;
  std::uint64_t seed = 0;

  int dim() const { return static_cast<int>(draws.cols()); }
  int count() const { return static_cast<int>(draws.rows()); }
  Vec row(int i) const { return draws.row(i).transpose(); }

  friend bool operator==(const SampleSet& lhs, const SampleSet& rhs) {
    return lhs.seed == rhs.seed && lhs.draws.rows() == rhs.draws.rows() &&
           lhs.draws.cols() == rhs.draws.cols() && lhs.draws == rhs.draws;
  }
};

// Draw i uses substream i of `rng`, so draws do not depend on thread layout.
SampleSet gaussian_sample(const GaussianMeasure& mu, int n,
                          const RngStream& rng);

// Mean squared Euclidean norm (empirical M2).
double second_moment(const SampleSet& samples);

Vec sample_mean(const SampleSet& samples);
Vec sample_variance(const SampleSet& samples);  // unbiased, per coordinate
Mat sample_covariance(const SampleSet& samples);

// CSV: a header line `dim,count,seed`, a line with those values, then one
// row per draw with 17 significant digits.
void write_sample_csv(std::ostream& out, const SampleSet& samples);
SampleSet read_sample_csv(std::istream& in);
void write_sample_csv(const std::string& path, const SampleSet& samples);
SampleSet read_sample_csv(const std::string& path);

}  // namespace heatscore

#endif  // HEATSCORE_SPECTRAL_HPP_
