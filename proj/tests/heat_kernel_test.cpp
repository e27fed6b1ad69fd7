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

#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "heatscore/quadrature.hpp"

namespace heatscore {
namespace {

Vec vec1(double a) { return Vec::Constant(1, a); }

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

TEST(OUKernelSet, ClosedFormsMatchQuadrature) {
  const OUKernelSet k(ModelSpace(vec2(1.0, 0.5), vec2(2.0, 0.3)));
  for (double t : {0.01, 0.5, 2.0, 7.0}) {
    EXPECT_LT((k.b(t) - k.b_quadrature(t)).norm(), 1e-11 * (1 + k.b(t).norm()));
    // b = int K^2 only matches (e^{t/2} - e^{-t/2}) K when checked pointwise.
    const Vec ab = k.abar(t);
    EXPECT_NEAR(ab[0], 2.0 * std::exp(-t) + 1.0 * (1 - std::exp(-t)), 1e-15);
  }
  EXPECT_LT((k.kernel(0.0) - Vec::Ones(2)).norm(), 1e-15);
  EXPECT_LT(k.b(0.0).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(k.tail_constant(), 2.0);
  EXPECT_NEAR(k.f(0.0), 0.0, 1e-15);
}

TEST(OUKernelSet, TailConstantDominatesScaledKernel) {
  const OUKernelSet k(ModelSpace(vec2(1.0, 0.5), vec2(3.0, 0.2)));
  for (int i = 0; i <= 200; ++i) {
    const double t = 0.05 * i;
    const Vec scaled = std::exp(t / 2) * k.kernel(t);
    EXPECT_LE(scaled.maxCoeff(), k.tail_constant() * (1 + 1e-12));
  }
}

TEST(OUKernelSet, FVanishesWhenTailMatchesBase) {
  const OUKernelSet k(ModelSpace(vec2(1.0, 0.5)));
  EXPECT_NEAR(k.f(3.0), 0.0, 1e-13);
  // f = -1/2 int Tr(C Abar^{-1} - I); here C < A so f > 0.
  const OUKernelSet k2(ModelSpace(vec1(1.0), vec1(2.0)));
  const double t = 1.5;
  const double expect = -0.5 * integrate(
      [](double s) { return 1.0 / (2.0 * std::exp(-s) + 1.0 - std::exp(-s)) - 1.0; },
      0.0, t);
  EXPECT_NEAR(k2.f(t), expect, 1e-12);
}

// Oracle: the defining convolution by adaptive quadrature in 1D.
double qbar_oracle(const VHJState& st, double t, double x) {
  const double bt = st.kernels().b(t)[0];
  const double sc = std::sqrt(st.h().space().c()[0]);
  const double inf = std::numeric_limits<double>::infinity();
  const double z = integrate(
      [&](double y) {
        const double r = x - y;
        return std::exp(-r * r / (2 * bt) + st.h().value(vec1(sc * y))) /
               std::sqrt(2 * std::numbers::pi * bt);
      },
      -inf, inf, 1e-13);
  return -std::log(z);
}

TEST(VHJState, QuadratureMatchesConvolutionIntegral) {
  const ModelSpace space(vec1(1.0), vec1(0.5));
  const MarginalLaw law = GaussianMixture(vec2(0.5, 0.5), {vec1(-1.0), vec1(1.0)},
                                          {vec1(0.25), vec1(0.25)});
  const VHJState st(HFunction(law, space, TailOptions{}));
  for (double t : {0.1, 0.7, 2.0}) {
    for (double x : {-1.5, 0.0, 0.8}) {
      const QbarValue q = st.qbar_eval(t, vec1(x));
      EXPECT_NEAR(q.value, qbar_oracle(st, t, x), 1e-9) << t << " " << x;
      EXPECT_FALSE(q.flagged);
      EXPECT_LT(q.doubling_shift, VHJState::kDoublingTolerance);
    }
  }
  EXPECT_DOUBLE_EQ(st.qbar_value(0.0, vec1(0.3)), st.qbar0(vec1(0.3)));
}

TEST(VHJState, InitialDerivativesMatchFiniteDifferences) {
  const ModelSpace space(vec2(1.0, 0.5), vec2(0.8, 0.5));
  const MarginalLaw law = GaussianMixture(vec2(0.3, 0.7), {vec2(-1, 0), vec2(1, 0.5)},
                                          {vec2(0.3, 0.2), vec2(0.4, 0.25)});
  const VHJState st(HFunction(law, space, TailOptions{}));
  const Vec x = vec2(0.2, -0.3);
  Vec g(2);
  for (int i = 0; i < 2; ++i) {
    Vec xp = x, xm = x;
    xp[i] += 1e-5;
    xm[i] -= 1e-5;
    g[i] = (st.qbar0(xp) - st.qbar0(xm)) / 2e-5;
  }
  EXPECT_LT((st.grad_qbar0(x) - g).norm(), 1e-6);
  // Small t approaches the initial data.
  EXPECT_LT((st.grad_qbar(1e-6, x) - st.grad_qbar0(x)).norm(), 1e-3);
  EXPECT_LT((st.hess_qbar(1e-6, x) - st.hess_qbar0(x)).norm(), 1e-2);
}

TEST(VHJState, RejectsHighDimension) {
  const ModelSpace space = ModelSpace::isotropic(3);
  const MarginalLaw law = GaussianMixture::single(Vec::Zero(3), Vec::Constant(3, 0.5));
  EXPECT_THROW(VHJState(HFunction(law, space, TailOptions{})), std::invalid_argument);
}

TEST(VHJBoundCheck, BimodalTargetSatisfiesBounds) {
  const ModelSpace space(vec1(1.0), vec1(0.5));
  const MarginalLaw law = GaussianMixture(vec2(0.5, 0.5), {vec1(-1.0), vec1(1.0)},
                                          {vec1(0.25), vec1(0.25)});
  const VHJState st(HFunction(law, space, TailOptions{}));
  const ProbeGrid grid = ProbeGrid::tensor(vec1(-4.0), vec1(4.0), 81);
  const BoundCheckReport rep = vhj_bound_check(st, {0.25, 0.5, 1.0, 2.0}, grid);
  ASSERT_EQ(rep.rows.size(), 5u);
  EXPECT_GE(rep.min_margin(), -1e-6);
  EXPECT_TRUE(rep.gradient_monotone);
  EXPECT_FALSE(rep.quadrature_flagged);
  const CsvTable csv = rep.to_csv();
  EXPECT_EQ(csv.rows().size(), 5u);
}

TEST(Mollifier, TwoAtomClosedForm) {
  const double s2 = 0.5;
  const MollifiedPointCloud cloud({vec1(-1.0), vec1(1.0)}, vec2(0.5, 0.5), s2, 2.0);
  for (double x : {-2.0, -0.3, 0.0, 0.6, 3.0}) {
    const double th = std::tanh(x / s2);
    EXPECT_NEAR(mollifier_grad(cloud, vec1(x))[0], th / s2, 1e-13);
    EXPECT_NEAR(mollifier_hess(cloud, vec1(x))(0, 0), (1 - th * th) / (s2 * s2),
                1e-12);
  }
}

TEST(Mollifier, BoundCheckMargins) {
  const double s2 = 0.5;
  const MollifiedPointCloud cloud({vec1(-1.0), vec1(1.0)}, vec2(0.5, 0.5), s2, 2.0);
  const ProbeGrid grid = ProbeGrid::tensor(vec1(-6.0), vec1(6.0), 241);
  const BoundCheckReport rep = mh_bound_check(cloud, grid);
  ASSERT_FALSE(rep.rows.empty());
  const BoundRow& r = rep.rows.front();
  EXPECT_DOUBLE_EQ(r.bound_grad, 2.0 / s2);
  EXPECT_DOUBLE_EQ(r.bound_hess, 2.0 * 4.0 / (s2 * s2));
  EXPECT_GT(r.margin_grad, 0.0);
  EXPECT_GT(r.margin_hess, 0.0);
  EXPECT_NEAR(r.measured_sup_hess, 1.0 / (s2 * s2), 1e-9);
}

}  // namespace
}  // namespace heatscore
