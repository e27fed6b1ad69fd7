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

#include "heatscore/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "heatscore/parallel.hpp"
#include "heatscore/quadrature.hpp"

namespace heatscore {

OUKernelSet::OUKernelSet(ModelSpace space) : space_(std::move(space)) {}

Vec OUKernelSet::abar(double t) const {
  Vec out(space_.dim());
  for (int i = 0; i < space_.dim(); ++i) {
    out[i] = ou_variance(space_.a()[i], space_.c()[i], t);
  }
  return out;
}

Vec OUKernelSet::kernel(double t) const {
  return space_.a().cwiseQuotient(abar(t)) * std::exp(-0.5 * t);
}

Vec OUKernelSet::b(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("B(t) requires t >= 0");
  // a (e^t - 1) / (a + c (e^t - 1)), the same quantity without cancellation.
  const double growth = std::expm1(t);
  Vec out(space_.dim());
  for (int i = 0; i < space_.dim(); ++i) {
    const double a = space_.a()[i];
    out[i] = a * growth / (a + space_.c()[i] * growth);
  }
  return out;
}

Vec OUKernelSet::b_quadrature(double t) const {
  Vec out(space_.dim());
  for (int i = 0; i < space_.dim(); ++i) {
    const double a = space_.a()[i];
    const double c = space_.c()[i];
    out[i] = integrate(
        [&](double s) {
          const double k = a / ou_variance(a, c, s) * std::exp(-0.5 * s);
          return k * k;
        },
        0.0, t, 1e-14);
  }
  return out;
}

double OUKernelSet::f(double t) const {
  if (t == 0.0) return 0.0;
  return -0.5 * integrate(
                    [&](double s) {
                      double acc = 0.0;
                      for (int i = 0; i < space_.dim(); ++i) {
                        const double c = space_.c()[i];
                        acc += c / ou_variance(space_.a()[i], c, s) - 1.0;
                      }
                      return acc;
                    },
                    0.0, t, 1e-14);
}

double OUKernelSet::tail_constant() const {
  return std::max(1.0, space_.a().cwiseQuotient(space_.c()).maxCoeff());
}

VHJState::VHJState(HFunction h, int order)
    : h_(std::move(h)), kernels_(h_.space()), order_(order) {
  if (h_.space().dim() > 2) {
    throw std::invalid_argument("heat-kernel quadrature supports d <= 2 only");
  }
  sqrt_c_ = h_.space().c().cwiseSqrt();
}

double VHJState::qbar0(const Vec& x) const {
  return -h_.value(sqrt_c_.cwiseProduct(x));
}

Vec VHJState::grad_qbar0(const Vec& x) const {
  return -sqrt_c_.cwiseProduct(h_.grad(sqrt_c_.cwiseProduct(x)));
}

Mat VHJState::hess_qbar0(const Vec& x) const {
  const Mat hess = h_.hess(sqrt_c_.cwiseProduct(x));
  return -(sqrt_c_.asDiagonal() * hess * sqrt_c_.asDiagonal());
}

double VHJState::quadrature(double t, const Vec& x, int order) const {
  if (t == 0.0) return qbar0(x);
  if (!(t > 0.0)) throw std::invalid_argument("qbar requires t >= 0");
  const int d = static_cast<int>(x.size());
  const GaussHermiteRule& rule = gauss_hermite(order);
  const Vec spread = (2.0 * kernels_.b(t)).cwiseSqrt();
  const int n = order;
  const int total = d == 1 ? n : n * n;
  std::vector<double> logs(total);
  Vec y(d);
  double m = -std::numeric_limits<double>::infinity();
  for (int idx = 0; idx < total; ++idx) {
    double logw = 0.0;
    int rest = idx;
    for (int j = 0; j < d; ++j) {
      const int node = rest % n;
      rest /= n;
      y[j] = sqrt_c_[j] * (x[j] + spread[j] * rule.nodes[node]);
      logw += std::log(rule.weights[node]);
    }
    logs[idx] = h_.value(y) + logw;
    m = std::max(m, logs[idx]);
  }
  double s = 0.0;
  for (double v : logs) s += std::exp(v - m);
  return -(m + std::log(s) - 0.5 * d * std::log(std::numbers::pi));
}

double VHJState::qbar_value(double t, const Vec& x) const {
  return quadrature(t, x, order_);
}

QbarValue VHJState::qbar_eval(double t, const Vec& x) const {
  QbarValue out;
  out.value = quadrature(t, x, order_);
  if (t > 0.0) {
    out.doubling_shift = std::abs(quadrature(t, x, 2 * order_) - out.value);
  }
  out.flagged = out.doubling_shift > kDoublingTolerance;
  return out;
}

Vec VHJState::grad_qbar(double t, const Vec& x) const {
  const int d = static_cast<int>(x.size());
  Vec g(d);
  Vec probe = x;
  for (int j = 0; j < d; ++j) {
    const double h =
        std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(x[j]));
    probe[j] = x[j] + h;
    const double up = qbar_value(t, probe);
    probe[j] = x[j] - h;
    const double down = qbar_value(t, probe);
    probe[j] = x[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

Mat VHJState::hess_qbar(double t, const Vec& x) const {
  const int d = static_cast<int>(x.size());
  const double root = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  Vec h(d);
  for (int j = 0; j < d; ++j) h[j] = root * (1.0 + std::abs(x[j]));
  const double center = qbar_value(t, x);
  Mat hess(d, d);
  Vec probe = x;
  for (int j = 0; j < d; ++j) {
    probe[j] = x[j] + h[j];
    const double up = qbar_value(t, probe);
    probe[j] = x[j] - h[j];
    const double down = qbar_value(t, probe);
    probe[j] = x[j];
    hess(j, j) = (up - 2.0 * center + down) / (h[j] * h[j]);
    for (int k = j + 1; k < d; ++k) {
      double corner[4];
      const int sign[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
      for (int s = 0; s < 4; ++s) {
        probe[j] = x[j] + sign[s][0] * h[j];
        probe[k] = x[k] + sign[s][1] * h[k];
        corner[s] = qbar_value(t, probe);
      }
      probe[j] = x[j];
      probe[k] = x[k];
      hess(j, k) = hess(k, j) =
          (corner[0] - corner[1] - corner[2] + corner[3]) / (4.0 * h[j] * h[k]);
    }
  }
  return hess;
}

double BoundCheckReport::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min({m, r.margin_grad, r.margin_hess});
  return m;
}

CsvTable BoundCheckReport::to_csv() const {
  CsvTable table({"t", "measured_sup_grad", "bound_grad", "margin_grad",
                  "measured_sup_hess", "bound_hess", "margin_hess"});
  for (const auto& r : rows) {
    table.add_row({format_real(r.t), format_real(r.measured_sup_grad),
                   format_real(r.bound_grad), format_real(r.margin_grad),
                   format_real(r.measured_sup_hess), format_real(r.bound_hess),
                   format_real(r.margin_hess)});
  }
  return table;
}

BoundCheckReport vhj_bound_check(const VHJState& state,
                                 const std::vector<double>& times,
                                 const ProbeGrid& grid) {
  if (grid.dim() != state.h().space().dim()) {
    throw std::invalid_argument("probe grid dimension mismatch");
  }
  BoundCheckReport report;
  report.lower = grid.lower();
  report.upper = grid.upper();
  const int n = grid.size();

  std::vector<double> g0(n), h0(n);
  parallel_for(n, [&](int i) {
    const Vec x = grid.point(i);
    g0[i] = state.grad_qbar0(x).norm();
    h0[i] = operator_norm(state.hess_qbar0(x));
  });
  const double sup_g0 = *std::max_element(g0.begin(), g0.end());
  const double sup_h0 = *std::max_element(h0.begin(), h0.end());
  const double bound_grad = sup_g0;
  const double bound_hess = sup_h0 + sup_g0 * sup_g0;
  report.rows.push_back({0.0, sup_g0, bound_grad, bound_grad - sup_g0, sup_h0,
                         bound_hess, bound_hess - sup_h0});

  double previous = sup_g0;
  for (double t : times) {
    if (!(t > 0.0)) throw std::invalid_argument("check times must be > 0");
    std::vector<double> gs(n), hs(n), shift(n);
    parallel_for(n, [&](int i) {
      const Vec x = grid.point(i);
      gs[i] = state.grad_qbar(t, x).norm();
      hs[i] = operator_norm(state.hess_qbar(t, x));
      shift[i] = state.qbar_eval(t, x).doubling_shift;
    });
    BoundRow row;
    row.t = t;
    row.measured_sup_grad = *std::max_element(gs.begin(), gs.end());
    row.measured_sup_hess = *std::max_element(hs.begin(), hs.end());
    row.bound_grad = bound_grad;
    row.bound_hess = bound_hess;
    row.margin_grad = bound_grad - row.measured_sup_grad;
    row.margin_hess = bound_hess - row.measured_sup_hess;
    report.rows.push_back(row);
    const double worst = *std::max_element(shift.begin(), shift.end());
    report.max_doubling_shift = std::max(report.max_doubling_shift, worst);
    if (row.measured_sup_grad > previous) report.gradient_monotone = false;
    previous = row.measured_sup_grad;
  }
  report.quadrature_flagged =
      report.max_doubling_shift > VHJState::kDoublingTolerance;
  return report;
}

namespace {

// Posterior weights of the atoms given x under the sigma-mollifier.
std::vector<double> atom_weights(const MollifiedPointCloud& cloud, const Vec& x) {
  const int k = static_cast<int>(cloud.atoms.size());
  std::vector<double> logs(k);
  double m = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) {
    logs[j] = std::log(cloud.weights[j]) -
              (x - cloud.atoms[j]).squaredNorm() / (2.0 * cloud.sigma2);
    m = std::max(m, logs[j]);
  }
  double total = 0.0;
  for (double& v : logs) {
    v = std::exp(v - m);
    total += v;
  }
  for (double& v : logs) v /= total;
  return logs;
}

}  // namespace

Vec mollifier_grad(const MollifiedPointCloud& cloud, const Vec& x) {
  if (!(cloud.sigma2 > 0.0)) throw std::invalid_argument("sigma must be > 0");
  const auto r = atom_weights(cloud, x);
  Vec mean = Vec::Zero(x.size());
  for (std::size_t j = 0; j < r.size(); ++j) mean += r[j] * cloud.atoms[j];
  return mean / cloud.sigma2;
}

Mat mollifier_hess(const MollifiedPointCloud& cloud, const Vec& x) {
  if (!(cloud.sigma2 > 0.0)) throw std::invalid_argument("sigma must be > 0");
  const auto r = atom_weights(cloud, x);
  Vec mean = Vec::Zero(x.size());
  for (std::size_t j = 0; j < r.size(); ++j) mean += r[j] * cloud.atoms[j];
  Mat cov = Mat::Zero(x.size(), x.size());
  for (std::size_t j = 0; j < r.size(); ++j) {
    const Vec dev = cloud.atoms[j] - mean;
    cov += r[j] * dev * dev.transpose();
  }
  return cov / (cloud.sigma2 * cloud.sigma2);
}

BoundCheckReport mh_bound_check(const MollifiedPointCloud& cloud,
                                const ProbeGrid& grid) {
  if (!(cloud.sigma2 > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (grid.dim() != cloud.dim()) {
    throw std::invalid_argument("probe grid dimension mismatch");
  }
  const double radius = std::max(cloud.diameter, cloud.max_atom_norm());
  const GridMax g = grid_sup(grid, [&](const Vec& x) {
    return mollifier_grad(cloud, x).norm();
  });
  const GridMax h = grid_sup(grid, [&](const Vec& x) {
    return operator_norm(mollifier_hess(cloud, x));
  });
  BoundRow row;
  row.measured_sup_grad = g.value;
  row.bound_grad = radius / cloud.sigma2;
  row.margin_grad = row.bound_grad - row.measured_sup_grad;
  row.measured_sup_hess = h.value;
  row.bound_hess = 2.0 * radius * radius / (cloud.sigma2 * cloud.sigma2);
  row.margin_hess = row.bound_hess - row.measured_sup_hess;
  BoundCheckReport report;
  report.rows.push_back(row);
  report.lower = grid.lower();
  report.upper = grid.upper();
  return report;
}

}  // namespace heatscore
