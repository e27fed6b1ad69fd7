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

#ifndef HEATSCORE_HEAT_KERNEL_HPP_
#define HEATSCORE_HEAT_KERNEL_HPP_

#include <string>
#include <vector>

#include "heatscore/csv.hpp"
#include "heatscore/probe.hpp"
#include "heatscore/targets.hpp"

namespace heatscore {

// Per-eigenvalue evaluators of the change-of-variables kernels.
class OUKernelSet {
 public:
  explicit OUKernelSet(ModelSpace space);

  // A e^{-t} + C (1 - e^{-t})
  Vec abar(double t) const;
  // (A / Abar_t) e^{-t/2}
  Vec kernel(double t) const;
  // int_0^t K(s)^2 ds in closed form, (e^{t/2} - e^{-t/2}) K(t).
  Vec b(double t) const;
  // The same integral by adaptive quadrature.
  Vec b_quadrature(double t) const;
  // -1/2 int_0^t Tr(C Abar_s^{-1} - I) ds by adaptive quadrature.
  double f(double t) const;
  // max{1, max_i a_i / c_i} = sup_t |e^{t/2} K(t)|.
  double tail_constant() const;

  const ModelSpace& space() const { return space_; }

 private:
  ModelSpace space_;
};

struct QbarValue {
  double value = 0.0;
  // |q(order) - q(2 order)|
  double doubling_shift = 0.0;
  bool flagged = false;
};

// qbar(t, x) = -log int phi_{B(t)}(x - y) exp(h(sqrt(C) y)) dy, evaluated by
// tensor Gauss-Hermite quadrature. qbar(0, .) = -h(sqrt(C) .).
class VHJState {
 public:
  static constexpr double kDoublingTolerance = 1e-8;

  explicit VHJState(HFunction h, int order = 64);

  // Quadrature value at the configured order only.
  double qbar_value(double t, const Vec& x) const;
  // With the node-doubling error monitor.
  QbarValue qbar_eval(double t, const Vec& x) const;

  // Closed-form initial data and its derivatives.
  double qbar0(const Vec& x) const;
  Vec grad_qbar0(const Vec& x) const;
  Mat hess_qbar0(const Vec& x) const;

  // Central differences of qbar_value; steps scale as eps^{1/3} and
  // eps^{1/4} times (1 + |x|).
  Vec grad_qbar(double t, const Vec& x) const;
  Mat hess_qbar(double t, const Vec& x) const;

  const HFunction& h() const { return h_; }
  const OUKernelSet& kernels() const { return kernels_; }
  int order() const { return order_; }

 private:
  double quadrature(double t, const Vec& x, int order) const;

  HFunction h_;
  OUKernelSet kernels_;
  Vec sqrt_c_;
  int order_;
};

struct BoundRow {
  double t = 0.0;
  double measured_sup_grad = 0.0;
  double bound_grad = 0.0;
  double margin_grad = 0.0;
  double measured_sup_hess = 0.0;
  double bound_hess = 0.0;
  double margin_hess = 0.0;
};

struct BoundCheckReport {
  std::vector<BoundRow> rows;
  Vec lower;
  Vec upper;
  bool quadrature_flagged = false;
  double max_doubling_shift = 0.0;
  // sup |grad| non-increasing across consecutive rows.
  bool gradient_monotone = true;

  double min_margin() const;
  CsvTable to_csv() const;
};

// Row t = 0 carries the initial constants; later rows compare against
// sup|grad q0| and sup||hess q0|| + sup|grad q0|^2.
BoundCheckReport vhj_bound_check(const VHJState& state,
                                 const std::vector<double>& times,
                                 const ProbeGrid& grid);

// g = log q_sigma + |x|^2 / (2 sigma^2) with closed-form derivatives
// grad g = E[y | x] / sigma^2, hess g = Cov(y | x) / sigma^4.
Vec mollifier_grad(const MollifiedPointCloud& cloud, const Vec& x);
Mat mollifier_hess(const MollifiedPointCloud& cloud, const Vec& x);

// Margins against R / sigma^2 and 2 R^2 / sigma^4, where R is the larger of
// the stated diameter and the largest atom norm.
BoundCheckReport mh_bound_check(const MollifiedPointCloud& cloud,
                                const ProbeGrid& grid);

}  // namespace heatscore

#endif  // HEATSCORE_HEAT_KERNEL_HPP_
