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

#ifndef HEATSCORE_SCORES_HPP_
#define HEATSCORE_SCORES_HPP_

#include <memory>
#include <variant>
#include <vector>

#include "heatscore/probe.hpp"
#include "heatscore/targets.hpp"

namespace heatscore {

class ScoreModel;

struct ExactScore {
  MarginalLaw law0;
  ModelSpace space;
  // Queries below this time are rejected (targets defined after stopping).
  double min_time = 0.0;
};

enum class PerturbationMode { kAdditiveGaussian, kSinusoidal };

struct PerturbedScore {
  std::shared_ptr<const ScoreModel> inner;
  double eps = 0.0;
  PerturbationMode mode = PerturbationMode::kSinusoidal;
  RngStream rng;
  double omega = 1.0;
  // Sinusoidal mode: field is amplitude * sin(omega x_i) / sqrt(d), with the
  // amplitude calibrated so the RMS deviation equals eps.
  double amplitude = 0.0;
};

// Score evaluator bound to one time. The sampler builds one per step.
class ScoreSlice {
 public:
  Vec operator()(const Vec& x) const;
  double time() const { return t_; }

 private:
  friend class ScoreModel;
  double t_ = 0.0;
  Vec c_;
  std::shared_ptr<const MarginalLaw> law_t_;
  std::shared_ptr<const ScoreSlice> inner_;
  std::shared_ptr<const PerturbedScore> perturbation_;
};

// s(t, x) = C grad log p_t(x), exact or perturbed.
class ScoreModel {
 public:
  static ScoreModel exact(const TargetModel& target, const ModelSpace& space,
                          double min_time = 0.0);
  static ScoreModel exact_law(MarginalLaw law0, const ModelSpace& space,
                              double min_time = 0.0);
  static ScoreModel additive(const ScoreModel& inner, double eps,
                             const RngStream& rng);
  // amplitude is eps divided by the unit RMS returned by calibrate_sinusoid.
  static ScoreModel sinusoidal(const ScoreModel& inner, double eps,
                               double amplitude, double omega = 1.0);

  Vec score(double t, const Vec& x) const;
  ScoreSlice slice(double t) const;

  const ModelSpace& space() const;
  int dim() const { return space().dim(); }
  double min_time() const;
  // Exact score of a single diagonal Gaussian, possibly wrapped in eps = 0
  // perturbations. Such scores are affine in x.
  std::optional<GaussianMeasure> affine_law0() const;
  // The innermost exact law.
  const MarginalLaw& base_law() const;
  double eps() const;
  const std::variant<ExactScore, PerturbedScore>& repr() const { return repr_; }

 private:
  explicit ScoreModel(std::variant<ExactScore, PerturbedScore> repr);
  std::variant<ExactScore, PerturbedScore> repr_;
};

// Unit RMS of sin(omega x)/sqrt(d) averaged over the forward law at the
// schedule's score times, weighted by step length:
// sqrt( sum_k h_k E|field(X_{T-t_k})|^2 / (T - delta) ).
double calibrate_sinusoid(const ScoreModel& exact, const Schedule& schedule,
                          double omega, int samples, const RngStream& rng);

// Time-averaged RMS deviation between two score models over forward samples,
// with the same weighting as calibrate_sinusoid.
double rms_deviation(const ScoreModel& model, const ScoreModel& reference,
                     const Schedule& schedule, int samples,
                     const RngStream& rng);

// s~(t, x) = s(t, x) + C Abar_t^{-1} x, Abar_t = A e^{-t} + C (1 - e^{-t}).
class ModifiedScore {
 public:
  explicit ModifiedScore(ScoreModel score);

  Vec operator()(double t, const Vec& x) const;
  Vec abar(double t) const;
  const ScoreModel& score() const { return score_; }
  const ModelSpace& space() const { return score_.space(); }

 private:
  ScoreModel score_;
};

struct JacobianResult {
  Mat jacobian;
  double noise_estimate = 0.0;
  // Round-off noise above 10% of the entry scale.
  bool noisy = false;
};

// Central differences; step <= 0 selects cbrt(eps_machine) (1 + |x_j|).
JacobianResult jacobian_fd(const ModifiedScore& ms, double t, const Vec& x,
                           double step = 0.0);

// Largest |eigenvalue| of the symmetric part by power iteration on its square.
double symmetric_operator_norm(const Mat& jacobian, int iterations = 200);

struct ProfilePoint {
  double t = 0.0;
  double sup_jacobian = 0.0;
  double sup_value = 0.0;
  bool noisy = false;
};

std::vector<ProfilePoint> lipschitz_profile(const ModifiedScore& ms,
                                            const std::vector<double>& times,
                                            const ProbeGrid& grid);

}  // namespace heatscore

#endif  // HEATSCORE_SCORES_HPP_
