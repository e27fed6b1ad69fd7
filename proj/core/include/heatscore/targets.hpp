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

#ifndef HEATSCORE_TARGETS_HPP_
#define HEATSCORE_TARGETS_HPP_

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

#include "heatscore/probe.hpp"
#include "heatscore/spectral.hpp"

namespace heatscore {

// Finite mixture of Gaussians with diagonal component covariances.
struct GaussianMixture {
  Vec weights;
  std::vector<Vec> means;
  std::vector<Vec> vars;

  GaussianMixture(Vec weights, std::vector<Vec> means, std::vector<Vec> vars);
  static GaussianMixture single(Vec mean, Vec var);

  int dim() const { return static_cast<int>(means.front().size()); }
  int components() const { return static_cast<int>(weights.size()); }
};

// One 1D mixture per coordinate, coordinates independent. Densities at d=64
// stay tractable where the equivalent full mixture has 2^64 components.
struct Mixture1D {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> vars;
};

struct ProductMixture {
  std::vector<Mixture1D> factors;

  explicit ProductMixture(std::vector<Mixture1D> factors);
  int dim() const { return static_cast<int>(factors.size()); }
};

// Atoms y_j mollified by N(0, sigma2 I). sigma2 = 0 means bare atoms, which
// only acquire a density after OU evolution.
struct MollifiedPointCloud {
  std::vector<Vec> atoms;
  Vec weights;
  double sigma2 = 0.0;
  double diameter = 0.0;

  MollifiedPointCloud(std::vector<Vec> atoms, Vec weights, double sigma2,
                      double diameter);
  int dim() const { return static_cast<int>(atoms.front().size()); }
  double max_atom_norm() const;
};

// Prior N(0, C) with observation y = G x + noise, noise ~ N(0, diag(noise)).
struct LinearGaussianPosterior {
  Mat G;      // m x d
  Vec noise;  // m
  Vec y;      // m

  LinearGaussianPosterior(Mat G, Vec noise, Vec y);
  int dim() const { return static_cast<int>(G.cols()); }
};

using TargetModel = std::variant<GaussianMixture, ProductMixture,
                                 MollifiedPointCloud, LinearGaussianPosterior>;

// Gaussian with a full covariance. Only the linear-Gaussian posterior needs
// it: the posterior covariance does not commute with C in general.
struct DenseGaussian {
  Vec mean;
  Mat cov;

  DenseGaussian(Vec mean, Mat cov);
  int dim() const { return static_cast<int>(mean.size()); }
};

using MarginalLaw = std::variant<GaussianMixture, ProductMixture, DenseGaussian>;

struct ForwardMarginal {
  double t = 0.0;
  MarginalLaw law;
};

// OU variance map e^{-t} v + (1 - e^{-t}) c. Shared by every consumer so that
// closed forms agree bit for bit.
inline double ou_variance(double v, double c, double t) {
  const double decay = std::exp(-t);
  return decay * v + (1.0 - decay) * c;
}

int dim(const TargetModel& target);
int dim(const MarginalLaw& law);

// Law of X_0. Bare point clouds map to a mixture with zero variances.
MarginalLaw law_at_zero(const TargetModel& target, const ModelSpace& space);
MarginalLaw evolve(const MarginalLaw& law, const ModelSpace& space, double t);
ForwardMarginal forward_marginal(const TargetModel& target,
                                 const ModelSpace& space, double t);

// Atoms e^{-delta/2} y_j with variance (1 - e^{-delta}); requires C = I.
GaussianMixture stopped_cloud(const MollifiedPointCloud& cloud,
                              const ModelSpace& space, double delta);

// Log density with the normalizing constant included. Underflow saturates at
// kLogDensityFloor instead of returning -inf.
inline constexpr double kLogDensityFloor = -1e300;
double log_density(const MarginalLaw& law, const Vec& x);
Vec grad_log_density(const MarginalLaw& law, const Vec& x);
Mat hess_log_density(const MarginalLaw& law, const Vec& x);

double density_log(const TargetModel& target, const ModelSpace& space,
                   const Vec& x);

SampleSet sample(const MarginalLaw& law, int n, const RngStream& rng);
double second_moment(const MarginalLaw& law);
Vec law_mean(const MarginalLaw& law);

// The law as a single diagonal Gaussian, when it is one.
std::optional<GaussianMeasure> as_diagonal_gaussian(const MarginalLaw& law);

// Box of 6 component standard deviations around the extreme means.
void default_probe_box(const MarginalLaw& law, Vec& lower, Vec& upper,
                       double half_widths = 6.0);

struct TailOptions {
  // Used for the sup search; default_probe_box when unset.
  std::optional<Vec> lower;
  std::optional<Vec> upper;
  int per_axis = ProbeGrid::kDefaultPerAxis;
  int sobol_points = ProbeGrid::kDefaultSobolPoints;
  // Reject the target when sup |sqrt(C) grad h| over the box exceeds this.
  double gradient_cap = 1e6;
  // Early-stopping time for point clouds; the decomposition is then taken
  // of the law at time delta.
  double stopping_delta = 0.0;
};

// h(x) = log p(x) + |x|_A^2 / 2 for the law p being decomposed, up to an
// additive constant. Carries grid-measured sup norms.
class HFunction {
 public:
  HFunction(MarginalLaw law, ModelSpace space, const TailOptions& options);

  double value(const Vec& x) const;
  Vec grad(const Vec& x) const;
  Mat hess(const Vec& x) const;

  // sup |sqrt(C) grad h| and sup ||C hess h|| over the probe box.
  double sup_sqrtc_grad() const { return sup_grad_; }
  double sup_c_hess() const { return sup_hess_; }
  const Vec& sup_grad_argmax() const { return grad_argmax_; }
  const ProbeGrid& grid() const { return grid_; }
  const MarginalLaw& law() const { return law_; }
  const ModelSpace& space() const { return space_; }

 private:
  MarginalLaw law_;
  ModelSpace space_;
  ProbeGrid grid_;
  double sup_grad_ = 0.0;
  double sup_hess_ = 0.0;
  Vec grad_argmax_;
};

HFunction tail_decomposition(const TargetModel& target,
                             const ModelSpace& space,
                             const TailOptions& options = {});

// Spectral norm; symmetric matrices use the eigen solver.
double operator_norm(const Mat& m);

}  // namespace heatscore

#endif  // HEATSCORE_TARGETS_HPP_
