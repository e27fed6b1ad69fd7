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

#include "heatscore/scores.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "heatscore/parallel.hpp"

namespace heatscore {
namespace {

std::uint64_t hash_point(double t, const Vec& x, std::uint64_t stream) {
  std::uint64_t h = splitmix64(stream ^ std::bit_cast<std::uint64_t>(t));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(x[i]));
  }
  return h;
}

using Field = std::function<Vec(const Vec&)>;

JacobianResult fd_jacobian(const Field& f, const Vec& x, double step) {
  const int d = static_cast<int>(x.size());
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  JacobianResult out;
  out.jacobian.resize(d, d);
  double fscale = 0.0;
  Vec probe = x;
  for (int j = 0; j < d; ++j) {
    const double h = step > 0.0 ? step : std::cbrt(kEps) * (1.0 + std::abs(x[j]));
    probe[j] = x[j] + h;
    const Vec fp = f(probe);
    probe[j] = x[j] - h;
    const Vec fm = f(probe);
    probe[j] = x[j];
    out.jacobian.col(j) = (fp - fm) / (2.0 * h);
    const double local = std::max(fp.cwiseAbs().maxCoeff(), fm.cwiseAbs().maxCoeff());
    fscale = std::max(fscale, local);
    out.noise_estimate = std::max(out.noise_estimate, kEps * local / h);
  }
  const double entry_scale =
      std::max(out.jacobian.cwiseAbs().maxCoeff(),
               fscale / (1.0 + x.cwiseAbs().maxCoeff()));
  out.noisy = entry_scale > 0.0 && out.noise_estimate > 0.1 * entry_scale;
  return out;
}

}  // namespace

Vec ScoreSlice::operator()(const Vec& x) const {
  if (law_t_) return c_.cwiseProduct(grad_log_density(*law_t_, x));
  Vec base = (*inner_)(x);
  const PerturbedScore& p = *perturbation_;
  if (p.eps == 0.0) return base;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(x.size()));
  if (p.mode == PerturbationMode::kAdditiveGaussian) {
    RngEngine engine =
        RngStream{p.rng.seed, hash_point(t_, x, p.rng.stream_id)}.engine();
    for (Eigen::Index i = 0; i < base.size(); ++i) {
      base[i] += p.eps * inv_sqrt_d * engine.normal();
    }
    return base;
  }
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    base[i] += p.amplitude * std::sin(p.omega * x[i]) * inv_sqrt_d;
  }
  return base;
}

ScoreModel::ScoreModel(std::variant<ExactScore, PerturbedScore> repr)
    : repr_(std::move(repr)) {}

ScoreModel ScoreModel::exact(const TargetModel& target, const ModelSpace& space,
                             double min_time) {
  return exact_law(law_at_zero(target, space), space, min_time);
}

ScoreModel ScoreModel::exact_law(MarginalLaw law0, const ModelSpace& space,
                                 double min_time) {
  if (heatscore::dim(law0) != space.dim()) {
    throw std::invalid_argument("score law and model space dimensions differ");
  }
  if (!(min_time >= 0.0)) throw std::invalid_argument("min_time must be >= 0");
  return ScoreModel(ExactScore{std::move(law0), space, min_time});
}

ScoreModel ScoreModel::additive(const ScoreModel& inner, double eps,
                                const RngStream& rng) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  PerturbedScore p;
  p.inner = std::make_shared<const ScoreModel>(inner);
  p.eps = eps;
  p.mode = PerturbationMode::kAdditiveGaussian;
  p.rng = rng;
  return ScoreModel(std::move(p));
}

ScoreModel ScoreModel::sinusoidal(const ScoreModel& inner, double eps,
                                  double amplitude, double omega) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be > 0");
  PerturbedScore p;
  p.inner = std::make_shared<const ScoreModel>(inner);
  p.eps = eps;
  p.mode = PerturbationMode::kSinusoidal;
  p.omega = omega;
  p.amplitude = eps == 0.0 ? 0.0 : amplitude;
  return ScoreModel(std::move(p));
}

ScoreSlice ScoreModel::slice(double t) const {
  if (t < min_time()) {
    throw std::domain_error("score queried before the model's minimum time");
  }
  ScoreSlice s;
  s.t_ = t;
  if (const auto* ex = std::get_if<ExactScore>(&repr_)) {
    s.c_ = ex->space.c();
    s.law_t_ = std::make_shared<const MarginalLaw>(evolve(ex->law0, ex->space, t));
    return s;
  }
  const auto& p = std::get<PerturbedScore>(repr_);
  s.inner_ = std::make_shared<const ScoreSlice>(p.inner->slice(t));
  s.perturbation_ = std::make_shared<const PerturbedScore>(p);
  return s;
}

Vec ScoreModel::score(double t, const Vec& x) const {
  if (x.size() != dim()) throw std::invalid_argument("score: dimension mismatch");
  return slice(t)(x);
}

const ModelSpace& ScoreModel::space() const {
  if (const auto* ex = std::get_if<ExactScore>(&repr_)) return ex->space;
  return std::get<PerturbedScore>(repr_).inner->space();
}

double ScoreModel::min_time() const {
  if (const auto* ex = std::get_if<ExactScore>(&repr_)) return ex->min_time;
  return std::get<PerturbedScore>(repr_).inner->min_time();
}

std::optional<GaussianMeasure> ScoreModel::affine_law0() const {
  if (const auto* ex = std::get_if<ExactScore>(&repr_)) {
    return as_diagonal_gaussian(ex->law0);
  }
  const auto& p = std::get<PerturbedScore>(repr_);
  if (p.eps != 0.0) return std::nullopt;
  return p.inner->affine_law0();
}

const MarginalLaw& ScoreModel::base_law() const {
  if (const auto* ex = std::get_if<ExactScore>(&repr_)) return ex->law0;
  return std::get<PerturbedScore>(repr_).inner->base_law();
}

double ScoreModel::eps() const {
  if (std::holds_alternative<ExactScore>(repr_)) return 0.0;
  return std::get<PerturbedScore>(repr_).eps;
}

double calibrate_sinusoid(const ScoreModel& exact, const Schedule& schedule,
                          double omega, int samples, const RngStream& rng) {
  const ModelSpace& space = exact.space();
  const double inv_d = 1.0 / space.dim();
  CompensatedSum acc;
  for (int k = 0; k < schedule.steps(); ++k) {
    const MarginalLaw law =
        evolve(exact.base_law(), space, schedule.score_time(k));
    const SampleSet xs = sample(law, samples, rng.substream(k));
    double mean = 0.0;
    for (int i = 0; i < samples; ++i) {
      double sq = 0.0;
      for (int j = 0; j < space.dim(); ++j) {
        const double s = std::sin(omega * xs.draws(i, j));
        sq += s * s;
      }
      mean += sq * inv_d;
    }
    acc.add(schedule.step_size(k) * mean / samples);
  }
  return std::sqrt(acc.value() / schedule.points().back());
}

double rms_deviation(const ScoreModel& model, const ScoreModel& reference,
                     const Schedule& schedule, int samples,
                     const RngStream& rng) {
  const ModelSpace& space = reference.space();
  std::vector<double> per_step(schedule.steps());
  parallel_for(schedule.steps(), [&](int k) {
    const double t = schedule.score_time(k);
    const MarginalLaw law = evolve(reference.base_law(), space, t);
    const SampleSet xs = sample(law, samples, rng.substream(k));
    const ScoreSlice a = model.slice(t);
    const ScoreSlice b = reference.slice(t);
    double mean = 0.0;
    for (int i = 0; i < samples; ++i) {
      const Vec x = xs.row(i);
      mean += (a(x) - b(x)).squaredNorm();
    }
    per_step[k] = schedule.step_size(k) * mean / samples;
  });
  return std::sqrt(compensated_sum(per_step) / schedule.points().back());
}

ModifiedScore::ModifiedScore(ScoreModel score) : score_(std::move(score)) {}

Vec ModifiedScore::abar(double t) const {
  const ModelSpace& sp = space();
  Vec out(sp.dim());
  for (int i = 0; i < sp.dim(); ++i) out[i] = ou_variance(sp.a()[i], sp.c()[i], t);
  return out;
}

Vec ModifiedScore::operator()(double t, const Vec& x) const {
  const Vec s = score_.score(t, x);
  return s + space().c().cwiseProduct(x.cwiseQuotient(abar(t)));
}

JacobianResult jacobian_fd(const ModifiedScore& ms, double t, const Vec& x,
                           double step) {
  if (step < 0.0) throw std::invalid_argument("jacobian step must be positive");
  const ScoreSlice slice = ms.score().slice(t);
  const Vec abar = ms.abar(t);
  const Vec& c = ms.space().c();
  return fd_jacobian(
      [&](const Vec& y) { return Vec(slice(y) + c.cwiseProduct(y.cwiseQuotient(abar))); },
      x, step);
}

double symmetric_operator_norm(const Mat& jacobian, int iterations) {
  const Mat sym = 0.5 * (jacobian + jacobian.transpose());
  const int d = static_cast<int>(sym.rows());
  if (d == 1) return std::abs(sym(0, 0));
  const Mat sq = sym * sym;
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = 1.0 / (1.0 + 0.618 * i);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vec w = sq * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = std::sqrt(norm);
    if (std::abs(next - lambda) <= 1e-15 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

std::vector<ProfilePoint> lipschitz_profile(const ModifiedScore& ms,
                                            const std::vector<double>& times,
                                            const ProbeGrid& grid) {
  if (grid.size() == 0) throw std::invalid_argument("probe grid is empty");
  std::vector<ProfilePoint> profile;
  for (double t : times) {
    if (!(t >= 0.0)) throw std::invalid_argument("profile times must be >= 0");
    const ScoreSlice slice = ms.score().slice(t);
    const Vec abar = ms.abar(t);
    const Vec& c = ms.space().c();
    const Field f = [&](const Vec& y) {
      return Vec(slice(y) + c.cwiseProduct(y.cwiseQuotient(abar)));
    };
    std::vector<double> jac(grid.size()), val(grid.size());
    std::vector<char> noisy(grid.size());
    parallel_for(grid.size(), [&](int i) {
      const Vec x = grid.point(i);
      const JacobianResult jr = fd_jacobian(f, x, 0.0);
      jac[i] = symmetric_operator_norm(jr.jacobian);
      val[i] = f(x).norm();
      noisy[i] = jr.noisy;
    });
    ProfilePoint p;
    p.t = t;
    for (int i = 0; i < grid.size(); ++i) {
      p.sup_jacobian = std::max(p.sup_jacobian, jac[i]);
      p.sup_value = std::max(p.sup_value, val[i]);
      p.noisy = p.noisy || noisy[i];
    }
    profile.push_back(p);
  }
  return profile;
}

}  // namespace heatscore
