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

#ifndef HEATSCORE_QUADRATURE_HPP_
#define HEATSCORE_QUADRATURE_HPP_

#include <functional>
#include <vector>

namespace heatscore {

// Physicists' Gauss-Hermite rule: sum w_i f(x_i) ~ int f(x) e^{-x^2} dx.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch eigen solve followed by Newton polishing on H_n. Rules of
// order 64 and 128 are cached.
const GaussHermiteRule& gauss_hermite(int order);

// Adaptive Gauss-Kronrod on [a, b]; infinite endpoints are allowed.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13, double* error = nullptr);

}  // namespace heatscore

#endif  // HEATSCORE_QUADRATURE_HPP_
