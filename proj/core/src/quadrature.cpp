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

#include "heatscore/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace heatscore {
namespace {

GaussHermiteRule build_rule(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(0.5 * i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()[i];
    // Normalized recurrence: psi_k = H_k / sqrt(2^k k! sqrt(pi)).
    double dpsi = 0.0;
    for (int it = 0; it < 8; ++it) {
      double p0 = std::pow(std::numbers::pi, -0.25);
      double p1 = std::sqrt(2.0) * x * p0;
      for (int k = 2; k <= n; ++k) {
        const double p2 =
            x * std::sqrt(2.0 / k) * p1 - std::sqrt((k - 1.0) / k) * p0;
        p0 = p1;
        p1 = p2;
      }
      // p1 = psi_n(x), p0 = psi_{n-1}(x); psi_n' = sqrt(2n) psi_{n-1}.
      dpsi = std::sqrt(2.0 * n) * p0;
      const double dx = p1 / dpsi;
      x -= dx;
      if (std::abs(dx) < 1e-16 * (1.0 + std::abs(x))) break;
    }
    rule.nodes[i] = x;
    // w = 2 / dpsi^2 in the normalized convention (exp weight e^{-x^2}).
    rule.weights[i] = 2.0 / (dpsi * dpsi);
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int order) {
  if (order < 1 || order > 400) {
    throw std::invalid_argument("Gauss-Hermite order must be in [1, 400]");
  }
  static std::mutex mutex;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double* error) {
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 15, rel_tol, &err);
  if (error) *error = err;
  return value;
}

}  // namespace heatscore
