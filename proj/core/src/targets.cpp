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

#include "heatscore/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heatscore {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_weights(const Vec& w) {
  if (w.size() == 0) throw std::invalid_argument("mixture has no components");
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (!(w[j] >= 0.0)) throw std::invalid_argument("negative mixture weight");
  }
  if (std::abs(compensated_sum(w) - 1.0) > 1e-14) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
}

void check_weights(const std::vector<double>& w) {
  check_weights(Vec(Eigen::Map<const Vec>(w.data(), w.size())));
}

double log_sum_exp(const double* values, int n, double& max_out) {
  double m = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) m = std::max(m, values[j]);
  max_out = m;
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += std::exp(values[j] - m);
  return m + std::log(s);
}

double saturate(double v) {
  return std::isfinite(v) || v > 0 ? v : kLogDensityFloor;
}

void require_density(const MarginalLaw& law) {
  if (const auto* mix = std::get_if<GaussianMixture>(&law)) {
    for (const auto& v : mix->vars) {
      if ((v.array() <= 0.0).any()) {
        throw std::domain_error(
            "mixture has a degenerate component; it has no density");
      }
    }
  } else if (const auto* prod = std::get_if<ProductMixture>(&law)) {
    for (const auto& f : prod->factors) {
      for (double v : f.vars) {
        if (!(v > 0.0)) {
          throw std::domain_error("product factor has a degenerate component");
        }
      }
    }
  }
}

// Component log weights plus log normal densities.
void component_logs(const GaussianMixture& mix, const Vec& x,
                    std::vector<double>& logs) {
  const int k = mix.components();
  const int d = mix.dim();
  logs.resize(k);
  for (int j = 0; j < k; ++j) {
    double quad = 0.0;
    double logdet = 0.0;
    for (int i = 0; i < d; ++i) {
      const double diff = x[i] - mix.means[j][i];
      quad += diff * diff / mix.vars[j][i];
      logdet += std::log(mix.vars[j][i]);
    }
    logs[j] = std::log(mix.weights[j]) - 0.5 * (d * kLog2Pi + logdet + quad);
  }
}

void responsibilities(const GaussianMixture& mix, const Vec& x,
                      std::vector<double>& r) {
  component_logs(mix, x, r);
  double m = 0.0;
  const double lse = log_sum_exp(r.data(), static_cast<int>(r.size()), m);
  if (!std::isfinite(lse)) {
    // Far outside every component: use the nearest in Mahalanobis terms.
    std::fill(r.begin(), r.end(), 0.0);
    r[0] = 1.0;
    return;
  }
  double total = 0.0;
  for (double& v : r) {
    v = std::exp(v - m);
    total += v;
  }
  for (double& v : r) v /= total;
}

void factor_stats(const Mixture1D& f, double x, double& logp, double& grad,
                  double& hess) {
  const int k = static_cast<int>(f.weights.size());
  double buf[64];
  std::vector<double> heap;
  double* logs = buf;
  if (k > 64) {
    heap.resize(k);
    logs = heap.data();
  }
  for (int j = 0; j < k; ++j) {
    const double diff = x - f.means[j];
    logs[j] = std::log(f.weights[j]) -
              0.5 * (kLog2Pi + std::log(f.vars[j]) + diff * diff / f.vars[j]);
  }
  double m = 0.0;
  logp = log_sum_exp(logs, k, m);
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    logs[j] = std::isfinite(m) ? std::exp(logs[j] - m) : (j == 0 ? 1.0 : 0.0);
    total += logs[j];
  }
  double g = 0.0;
  double second = 0.0;
  double curvature = 0.0;
  for (int j = 0; j < k; ++j) {
    const double r = logs[j] / total;
    const double gj = -(x - f.means[j]) / f.vars[j];
    g += r * gj;
    second += r * gj * gj;
    curvature += r / f.vars[j];
  }
  grad = g;
  hess = -curvature + second - g * g;
}

}  // namespace

GaussianMixture::GaussianMixture(Vec w, std::vector<Vec> mu,
                                 std::vector<Vec> v)
    : weights(std::move(w)), means(std::move(mu)), vars(std::move(v)) {
  check_weights(weights);
  if (static_cast<int>(means.size()) != weights.size() ||
      means.size() != vars.size()) {
    throw std::invalid_argument("mixture component counts disagree");
  }
  const Eigen::Index d = means.front().size();
  if (d == 0) throw std::invalid_argument("mixture dimension is zero");
  for (std::size_t j = 0; j < means.size(); ++j) {
    if (means[j].size() != d || vars[j].size() != d) {
      throw std::invalid_argument("mixture component dimensions disagree");
    }
    if ((vars[j].array() < 0.0).any()) {
      throw std::invalid_argument("mixture variances must be nonnegative");
    }
  }
}

GaussianMixture GaussianMixture::single(Vec mean, Vec var) {
  return GaussianMixture(Vec::Ones(1), {std::move(mean)}, {std::move(var)});
}

ProductMixture::ProductMixture(std::vector<Mixture1D> f)
    : factors(std::move(f)) {
  if (factors.empty()) throw std::invalid_argument("product has no factors");
  for (const auto& factor : factors) {
    check_weights(factor.weights);
    if (factor.means.size() != factor.weights.size() ||
        factor.vars.size() != factor.weights.size()) {
      throw std::invalid_argument("product factor sizes disagree");
    }
    for (double v : factor.vars) {
      if (!(v >= 0.0)) throw std::invalid_argument("negative factor variance");
    }
  }
}

MollifiedPointCloud::MollifiedPointCloud(std::vector<Vec> y, Vec w, double s2,
                                         double r)
    : atoms(std::move(y)), weights(std::move(w)), sigma2(s2), diameter(r) {
  check_weights(weights);
  if (static_cast<int>(atoms.size()) != weights.size()) {
    throw std::invalid_argument("cloud atom and weight counts disagree");
  }
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("sigma2 must be >= 0");
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j].size() != atoms.front().size()) {
      throw std::invalid_argument("cloud atoms differ in dimension");
    }
    for (std::size_t k = j + 1; k < atoms.size(); ++k) {
      if ((atoms[j] - atoms[k]).norm() > diameter * (1.0 + 1e-12)) {
        throw std::invalid_argument("cloud atoms exceed the stated diameter R");
      }
    }
  }
}

double MollifiedPointCloud::max_atom_norm() const {
  double m = 0.0;
  for (const auto& y : atoms) m = std::max(m, y.norm());
  return m;
}

LinearGaussianPosterior::LinearGaussianPosterior(Mat g, Vec n, Vec obs)
    : G(std::move(g)), noise(std::move(n)), y(std::move(obs)) {
  if (G.rows() == 0 || G.cols() == 0) {
    throw std::invalid_argument("observation operator is empty");
  }
  if (noise.size() != G.rows() || y.size() != G.rows()) {
    throw std::invalid_argument("noise/observation sizes must match G rows");
  }
  if ((noise.array() <= 0.0).any()) {
    throw std::invalid_argument("noise spectrum must be positive");
  }
}

DenseGaussian::DenseGaussian(Vec m, Mat s) : mean(std::move(m)), cov(std::move(s)) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw std::invalid_argument("dense Gaussian sizes disagree");
  }
}

int dim(const TargetModel& target) {
  return std::visit([](const auto& t) { return t.dim(); }, target);
}

int dim(const MarginalLaw& law) {
  return std::visit([](const auto& l) { return l.dim(); }, law);
}

MarginalLaw law_at_zero(const TargetModel& target, const ModelSpace& space) {
  if (dim(target) != space.dim()) {
    throw std::invalid_argument("target and model space dimensions differ");
  }
  if (const auto* mix = std::get_if<GaussianMixture>(&target)) return *mix;
  if (const auto* prod = std::get_if<ProductMixture>(&target)) return *prod;
  if (const auto* cloud = std::get_if<MollifiedPointCloud>(&target)) {
    std::vector<Vec> vars(cloud->atoms.size(),
                          Vec::Constant(cloud->dim(), cloud->sigma2));
    return GaussianMixture(cloud->weights, cloud->atoms, std::move(vars));
  }
  const auto& post = std::get<LinearGaussianPosterior>(target);
  const Vec inv_noise = post.noise.cwiseInverse();
  Mat precision = post.G.transpose() * inv_noise.asDiagonal() * post.G;
  precision.diagonal() += space.c().cwiseInverse();
  Eigen::LLT<Mat> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("posterior precision is not positive definite");
  }
  const Mat cov = llt.solve(Mat::Identity(post.dim(), post.dim()));
  const Vec mean = llt.solve(post.G.transpose() * inv_noise.cwiseProduct(post.y));
  return DenseGaussian(mean, 0.5 * (cov + cov.transpose()));
}

MarginalLaw evolve(const MarginalLaw& law, const ModelSpace& space, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be >= 0");
  if (dim(law) != space.dim()) {
    throw std::invalid_argument("law and model space dimensions differ");
  }
  const double shrink = std::exp(-0.5 * t);
  const Vec& c = space.c();
  if (const auto* mix = std::get_if<GaussianMixture>(&law)) {
    std::vector<Vec> means = mix->means;
    std::vector<Vec> vars = mix->vars;
    for (std::size_t j = 0; j < means.size(); ++j) {
      means[j] *= shrink;
      for (Eigen::Index i = 0; i < c.size(); ++i) {
        vars[j][i] = ou_variance(vars[j][i], c[i], t);
      }
    }
    return GaussianMixture(mix->weights, std::move(means), std::move(vars));
  }
  if (const auto* prod = std::get_if<ProductMixture>(&law)) {
    std::vector<Mixture1D> factors = prod->factors;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      for (auto& m : factors[i].means) m *= shrink;
      for (auto& v : factors[i].vars) v = ou_variance(v, c[i], t);
    }
    return ProductMixture(std::move(factors));
  }
  const auto& dense = std::get<DenseGaussian>(law);
  const double decay = std::exp(-t);
  Mat cov = decay * dense.cov;
  cov.diagonal() += (1.0 - decay) * c;
  return DenseGaussian(shrink * dense.mean, cov);
}

ForwardMarginal forward_marginal(const TargetModel& target,
                                 const ModelSpace& space, double t) {
  return {t, evolve(law_at_zero(target, space), space, t)};
}

GaussianMixture stopped_cloud(const MollifiedPointCloud& cloud,
                              const ModelSpace& space, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("stopping time must be > 0");
  if ((space.c().array() != 1.0).any()) {
    throw std::invalid_argument("stopped cloud construction requires C = I");
  }
  return std::get<GaussianMixture>(
      evolve(law_at_zero(cloud, space), space, delta));
}

double log_density(const MarginalLaw& law, const Vec& x) {
  require_density(law);
  if (const auto* mix = std::get_if<GaussianMixture>(&law)) {
    std::vector<double> logs;
    component_logs(*mix, x, logs);
    double m = 0.0;
    return saturate(log_sum_exp(logs.data(), mix->components(), m));
  }
  if (const auto* prod = std::get_if<ProductMixture>(&law)) {
    double total = 0.0;
    for (int i = 0; i < prod->dim(); ++i) {
      double lp = 0.0, g = 0.0, h = 0.0;
      factor_stats(prod->factors[i], x[i], lp, g, h);
      total += lp;
    }
    return saturate(total);
  }
  const auto& dense = std::get<DenseGaussian>(law);
  Eigen::LLT<Mat> llt(dense.cov);
  const Vec diff = x - dense.mean;
  const Vec white = llt.matrixL().solve(diff);
  const double logdet =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return saturate(-0.5 * (dense.dim() * kLog2Pi + logdet + white.squaredNorm()));
}

Vec grad_log_density(const MarginalLaw& law, const Vec& x) {
  require_density(law);
  if (const auto* mix = std::get_if<GaussianMixture>(&law)) {
    std::vector<double> r;
    responsibilities(*mix, x, r);
    Vec g = Vec::Zero(mix->dim());
    for (int j = 0; j < mix->components(); ++j) {
      if (r[j] == 0.0) continue;
      g += r[j] * (-((x - mix->means[j]).cwiseQuotient(mix->vars[j])));
    }
    return g;
  }
  if (const auto* prod = std::get_if<ProductMixture>(&law)) {
    Vec g(prod->dim());
    for (int i = 0; i < prod->dim(); ++i) {
      double lp = 0.0, h = 0.0;
      factor_stats(prod->factors[i], x[i], lp, g[i], h);
    }
    return g;
  }
  const auto& dense = std::get<DenseGaussian>(law);
  return -dense.cov.llt().solve(x - dense.mean);
}

Mat hess_log_density(const MarginalLaw& law, const Vec& x) {
  require_density(law);
  if (const auto* mix = std::get_if<GaussianMixture>(&law)) {
    std::vector<double> r;
    responsibilities(*mix, x, r);
    const int d = mix->dim();
    Mat h = Mat::Zero(d, d);
    Vec gbar = Vec::Zero(d);
    for (int j = 0; j < mix->components(); ++j) {
      if (r[j] == 0.0) continue;
      const Vec g = -((x - mix->means[j]).cwiseQuotient(mix->vars[j]));
      gbar += r[j] * g;
      h += r[j] * (g * g.transpose());
      h.diagonal() -= r[j] * mix->vars[j].cwiseInverse();
    }
    h -= gbar * gbar.transpose();
    return h;
  }
  if (const auto* prod = std::get_if<ProductMixture>(&law)) {
    Mat h = Mat::Zero(prod->dim(), prod->dim());
    for (int i = 0; i < prod->dim(); ++i) {
      double lp = 0.0, g = 0.0;
      factor_stats(prod->factors[i], x[i], lp, g, h(i, i));
    }
    return h;
  }
  const auto& dense = std::get<DenseGaussian>(law);
  return -dense.cov.llt().solve(Mat::Identity(dense.dim(), dense.dim()));
}

double density_log(const TargetModel& target, const ModelSpace& space,
                   const Vec& x) {
  return log_density(law_at_zero(target, space), x);
}

namespace {

int pick(const double* weights, int k, double u) {
  double acc = 0.0;
  for (int j = 0; j + 1 < k; ++j) {
    acc += weights[j];
    if (u < acc) return j;
  }
  return k - 1;
}

}  // namespace

SampleSet sample(const MarginalLaw& law, int n, const RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample requires n >= 1");
  const int d = dim(law);
  SampleSet out;
  out.seed = rng.seed;
  out.draws.resize(n, d);
  Mat chol;
  if (const auto* dense = std::get_if<DenseGaussian>(&law)) {
    chol = dense->cov.llt().matrixL();
  }
  for (int i = 0; i < n; ++i) {
    RngEngine engine = rng.substream(static_cast<std::uint64_t>(i)).engine();
    if (const auto* mix = std::get_if<GaussianMixture>(&law)) {
      const int j = pick(mix->weights.data(), mix->components(), engine.uniform());
      for (int a = 0; a < d; ++a) {
        out.draws(i, a) =
            mix->means[j][a] + std::sqrt(mix->vars[j][a]) * engine.normal();
      }
    } else if (const auto* prod = std::get_if<ProductMixture>(&law)) {
      for (int a = 0; a < d; ++a) {
        const auto& f = prod->factors[a];
        const int j = pick(f.weights.data(), static_cast<int>(f.weights.size()),
                           engine.uniform());
        out.draws(i, a) = f.means[j] + std::sqrt(f.vars[j]) * engine.normal();
      }
    } else {
      const auto& dense = std::get<DenseGaussian>(law);
      Vec z(d);
      for (int a = 0; a < d; ++a) z[a] = engine.normal();
      out.draws.row(i) = (dense.mean + chol * z).transpose();
    }
  }
  return out;
}

double second_moment(const MarginalLaw& law) {
  if (const auto* mix = std::get_if<GaussianMixture>(&law)) {
    CompensatedSum acc;
    for (int j = 0; j < mix->components(); ++j) {
      acc.add(mix->weights[j] * (mix->means[j].squaredNorm() + mix->vars[j].sum()));
    }
    return acc.value();
  }
  if (const auto* prod = std::get_if<ProductMixture>(&law)) {
    CompensatedSum acc;
    for (const auto& f : prod->factors) {
      for (std::size_t j = 0; j < f.weights.size(); ++j) {
        acc.add(f.weights[j] * (f.means[j] * f.means[j] + f.vars[j]));
      }
    }
    return acc.value();
  }
  const auto& dense = std::get<DenseGaussian>(law);
  return dense.mean.squaredNorm() + dense.cov.trace();
}

Vec law_mean(const MarginalLaw& law) {
  if (const auto* mix = std::get_if<GaussianMixture>(&law)) {
    Vec m = Vec::Zero(mix->dim());
    for (int j = 0; j < mix->components(); ++j) m += mix->weights[j] * mix->means[j];
    return m;
  }
  if (const auto* prod = std::get_if<ProductMixture>(&law)) {
    Vec m = Vec::Zero(prod->dim());
    for (int i = 0; i < prod->dim(); ++i) {
      const auto& f = prod->factors[i];
      for (std::size_t j = 0; j < f.weights.size(); ++j) m[i] += f.weights[j] * f.means[j];
    }
    return m;
  }
  return std::get<DenseGaussian>(law).mean;
}

std::optional<GaussianMeasure> as_diagonal_gaussian(const MarginalLaw& law) {
  if (const auto* mix = std::get_if<GaussianMixture>(&law)) {
    if (mix->components() != 1) return std::nullopt;
    return GaussianMeasure(mix->means[0], mix->vars[0]);
  }
  if (const auto* prod = std::get_if<ProductMixture>(&law)) {
    Vec mean(prod->dim()), var(prod->dim());
    for (int i = 0; i < prod->dim(); ++i) {
      const auto& f = prod->factors[i];
      if (f.weights.size() != 1) return std::nullopt;
      mean[i] = f.means[0];
      var[i] = f.vars[0];
    }
    return GaussianMeasure(mean, var);
  }
  const auto& dense = std::get<DenseGaussian>(law);
  const Mat off = dense.cov - Mat(dense.cov.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() != 0.0) return std::nullopt;
  return GaussianMeasure(dense.mean, dense.cov.diagonal());
}

void default_probe_box(const MarginalLaw& law, Vec& lower, Vec& upper,
                       double half_widths) {
  const int d = dim(law);
  lower = Vec::Constant(d, std::numeric_limits<double>::infinity());
  upper = Vec::Constant(d, -std::numeric_limits<double>::infinity());
  auto widen = [&](int i, double mean, double var) {
    const double s = half_widths * std::sqrt(var);
    lower[i] = std::min(lower[i], mean - s);
    upper[i] = std::max(upper[i], mean + s);
  };
  if (const auto* mix = std::get_if<GaussianMixture>(&law)) {
    for (int j = 0; j < mix->components(); ++j) {
      for (int i = 0; i < d; ++i) widen(i, mix->means[j][i], mix->vars[j][i]);
    }
  } else if (const auto* prod = std::get_if<ProductMixture>(&law)) {
    for (int i = 0; i < d; ++i) {
      const auto& f = prod->factors[i];
      for (std::size_t j = 0; j < f.weights.size(); ++j) widen(i, f.means[j], f.vars[j]);
    }
  } else {
    const auto& dense = std::get<DenseGaussian>(law);
    for (int i = 0; i < d; ++i) widen(i, dense.mean[i], dense.cov(i, i));
  }
  for (int i = 0; i < d; ++i) {
    if (upper[i] - lower[i] <= 0.0) {
      lower[i] -= 1.0;
      upper[i] += 1.0;
    }
  }
}

double operator_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols()) {
    const Mat off = m - Mat(m.diagonal().asDiagonal());
    if (off.cwiseAbs().maxCoeff() == 0.0) return m.diagonal().cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0) {
      Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
  }
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()[0];
}

HFunction::HFunction(MarginalLaw law, ModelSpace space,
                     const TailOptions& options)
    : law_(std::move(law)), space_(std::move(space)) {
  if (dim(law_) != space_.dim()) {
    throw std::invalid_argument("law and model space dimensions differ");
  }
  require_density(law_);
  Vec lower, upper;
  default_probe_box(law_, lower, upper);
  if (options.lower) lower = *options.lower;
  if (options.upper) upper = *options.upper;
  grid_ = space_.dim() <= 2
              ? ProbeGrid::tensor(lower, upper, options.per_axis)
              : ProbeGrid::sobol(lower, upper, options.sobol_points);

  const Vec sqrt_c = space_.c().cwiseSqrt();
  const GridMax g = grid_sup(grid_, [&](const Vec& x) {
    return sqrt_c.cwiseProduct(grad(x)).norm();
  });
  sup_grad_ = g.value;
  grad_argmax_ = g.argmax;
  if (!(sup_grad_ <= options.gradient_cap)) {
    throw std::domain_error(
        "tail decomposition rejected: sup |sqrt(C) grad h| exceeds the cap");
  }
  const GridMax hmax = grid_sup(grid_, [&](const Vec& x) {
    return operator_norm(space_.c().asDiagonal() * hess(x));
  });
  sup_hess_ = hmax.value;
}

double HFunction::value(const Vec& x) const {
  return log_density(law_, x) +
         0.5 * x.cwiseProduct(x).cwiseQuotient(space_.a()).sum();
}

Vec HFunction::grad(const Vec& x) const {
  return grad_log_density(law_, x) + x.cwiseQuotient(space_.a());
}

Mat HFunction::hess(const Vec& x) const {
  Mat h = hess_log_density(law_, x);
  h.diagonal() += space_.a().cwiseInverse();
  return h;
}

HFunction tail_decomposition(const TargetModel& target,
                             const ModelSpace& space,
                             const TailOptions& options) {
  MarginalLaw law = law_at_zero(target, space);
  if (options.stopping_delta > 0.0) {
    law = evolve(law, space, options.stopping_delta);
  } else if (std::holds_alternative<MollifiedPointCloud>(target) &&
             std::get<MollifiedPointCloud>(target).sigma2 == 0.0) {
    throw std::domain_error(
        "bare point cloud has no density; set a stopping time");
  }
  return HFunction(std::move(law), space, options);
}

}  // namespace heatscore
