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
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

namespace heatscore {
namespace {

class GaussHermiteOrders : public ::testing::TestWithParam<int> {};

// sum w_i x_i^{2k} = Gamma(k + 1/2), exact for 2k <= 2n - 1.
TEST_P(GaussHermiteOrders, EvenMomentsExact) {
  const int n = GetParam();
  const GaussHermiteRule& r = gauss_hermite(n);
  ASSERT_EQ(static_cast<int>(r.nodes.size()), n);
  for (int k = 0; 2 * k <= std::min(2 * n - 1, 40); ++k) {
    long double s = 0.0L;
    for (int i = 0; i < n; ++i) {
      s += r.weights[i] * std::pow(static_cast<long double>(r.nodes[i]), 2 * k);
    }
    const double expect = std::tgamma(k + 0.5);
    EXPECT_NEAR(static_cast<double>(s) / expect, 1.0, 1e-11) << "k=" << k;
  }
}

TEST_P(GaussHermiteOrders, SymmetricAndPositive) {
  const int n = GetParam();
  const GaussHermiteRule& r = gauss_hermite(n);
  for (int i = 0; i < n; ++i) {
    EXPECT_GT(r.weights[i], 0.0);
    EXPECT_NEAR(r.nodes[i], -r.nodes[n - 1 - i], 1e-12 * (1 + std::abs(r.nodes[i])));
    EXPECT_NEAR(r.weights[i], r.weights[n - 1 - i], 1e-14 + 1e-10 * r.weights[i]);
  }
}

INSTANTIATE_TEST_SUITE_P(Orders, GaussHermiteOrders,
                         ::testing::Values(1, 2, 5, 16, 32, 64, 128));

TEST(GaussHermite, OddMomentsVanishAndKnownRule) {
  const GaussHermiteRule& r2 = gauss_hermite(2);
  EXPECT_NEAR(std::abs(r2.nodes[0]), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r2.weights[0], std::sqrt(std::numbers::pi) / 2, 1e-15);
  const GaussHermiteRule& r = gauss_hermite(20);
  double s = 0.0;
  for (int i = 0; i < 20; ++i) s += r.weights[i] * std::pow(r.nodes[i], 7);
  EXPECT_NEAR(s, 0.0, 1e-12);
  EXPECT_EQ(&gauss_hermite(64), &gauss_hermite(64));
}

TEST(Integrate, FiniteInterval) {
  double err = 0.0;
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi,
                        1e-13, &err),
              2.0, 1e-12);
  EXPECT_LT(err, 1e-10);
  EXPECT_NEAR(integrate([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0),
              std::numbers::pi / 4, 1e-13);
}

TEST(Integrate, InfiniteEndpoints) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x * x); }, -inf, inf),
              std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x); }, 0.0, inf), 1.0,
              1e-12);
}

TEST(Integrate, ReversedLimitsFlipSign) {
  const auto f = [](double x) { return x * x; };
  EXPECT_NEAR(integrate(f, 1.0, 0.0), -1.0 / 3.0, 1e-14);
}

}  // namespace
}  // namespace heatscore
