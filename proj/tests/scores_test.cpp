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

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

namespace heatscore {
namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

GaussianMixture bimodal() {
  return GaussianMixture(vec2(0.4, 0.6), {vec2(-1.0, 0.5), vec2(1.5, -0.2)},
                         {vec2(0.4, 0.9), vec2(0.6, 0.3)});
}

TEST(ExactScore, GaussianClosedForm) {
  const ModelSpace space(vec2(1.0, 0.5));
  const Vec m = vec2(2.0, -1.0), v = vec2(0.3, 2.0);
  const ScoreModel s = ScoreModel::exact(GaussianMixture::single(m, v), space);
  const double t = 0.7;
  const Vec x = vec2(0.4, 0.1);
  const Vec got = s.score(t, x);
  for (int i = 0; i < 2; ++i) {
    const double mt = std::exp(-t / 2) * m[i];
    const double vt = ou_variance(v[i], space.c()[i], t);
    EXPECT_NEAR(got[i], -space.c()[i] * (x[i] - mt) / vt, 1e-14);
  }
  ASSERT_TRUE(s.affine_law0());
  EXPECT_DOUBLE_EQ(s.eps(), 0.0);
}

TEST(ExactScore, MatchesFiniteDifferenceOfForwardDensity) {
  const ModelSpace space(vec2(1.0, 0.5));
  const ScoreModel s = ScoreModel::exact(bimodal(), space);
  const double t = 0.4;
  const ForwardMarginal fm = forward_marginal(bimodal(), space, t);
  const Vec x = vec2(0.2, -0.3);
  Vec fd(2);
  for (int i = 0; i < 2; ++i) {
    Vec xp = x, xm = x;
    xp[i] += 1e-5;
    xm[i] -= 1e-5;
    fd[i] = space.c()[i] *
            (log_density(fm.law, xp) - log_density(fm.law, xm)) / 2e-5;
  }
  EXPECT_LT((s.score(t, x) - fd).norm(), 1e-6);
}

// E_p[grad log p] = 0 by integration by parts.
TEST(ExactScore, ZeroMeanUnderForwardLaw) {
  const ModelSpace space(vec2(1.0, 0.5));
  const ScoreModel s = ScoreModel::exact(bimodal(), space);
  const double t = 0.5;
  const ForwardMarginal fm = forward_marginal(bimodal(), space, t);
  const int n = 20000;
  const SampleSet xs = sample(fm.law, n, {4, 0});
  Vec sum = Vec::Zero(2), sq = Vec::Zero(2);
  for (int i = 0; i < n; ++i) {
    const Vec v = s.score(t, xs.row(i));
    sum += v;
    sq += v.cwiseProduct(v);
  }
  const Vec mean = sum / n;
  for (int j = 0; j < 2; ++j) {
    const double se = std::sqrt(sq[j] / n / n);
    EXPECT_LT(std::abs(mean[j]), 5.0 * se);
  }
}

TEST(ExactScore, MinTimeIsEnforced) {
  const ModelSpace space = ModelSpace::isotropic(2);
  const ScoreModel s = ScoreModel::exact(bimodal(), space, 0.1);
  EXPECT_THROW(s.score(0.05, vec2(0, 0)), std::domain_error);
  EXPECT_NO_THROW(s.score(0.1, vec2(0, 0)));
}

TEST(PerturbedScore, AdditiveIsDeterministicWithRequestedRms) {
  const ModelSpace space = ModelSpace::isotropic(2);
  const ScoreModel exact = ScoreModel::exact(bimodal(), space);
  const double eps = 0.2;
  const ScoreModel noisy = ScoreModel::additive(exact, eps, {5, 1});
  const Vec x = vec2(0.3, 0.9);
  EXPECT_EQ(noisy.score(1.0, x), noisy.score(1.0, x));
  EXPECT_NE(noisy.score(1.0, x), noisy.score(1.1, x));
  const Schedule sched = Schedule::uniform(2.0, 0.0, 20);
  const double rms = rms_deviation(noisy, exact, sched, 4000, {6, 0});
  EXPECT_NEAR(rms, eps, 0.05 * eps);
  EXPECT_DOUBLE_EQ(noisy.eps(), eps);
}

TEST(PerturbedScore, SinusoidCalibrationHitsTargetRms) {
  const ModelSpace space(vec2(1.0, 0.5));
  const ScoreModel exact = ScoreModel::exact(bimodal(), space);
  const Schedule sched = Schedule::uniform(3.0, 0.0, 30);
  const double unit = calibrate_sinusoid(exact, sched, 1.0, 8000, {7, 0});
  ASSERT_GT(unit, 0.0);
  const double eps = 0.05;
  const ScoreModel pert = ScoreModel::sinusoidal(exact, eps, eps / unit);
  // Independent sample set for the check.
  const double rms = rms_deviation(pert, exact, sched, 8000, {8, 0});
  EXPECT_NEAR(rms, eps, 0.05 * eps);
  // eps = 0 wrappers are exact and stay affine for Gaussian targets.
  const ScoreModel g = ScoreModel::exact(GaussianMixture::single(vec2(0, 0), vec2(1, 1)), space);
  EXPECT_TRUE(ScoreModel::sinusoidal(g, 0.0, 3.0).affine_law0());
  EXPECT_FALSE(ScoreModel::sinusoidal(g, 0.1, 3.0).affine_law0());
  EXPECT_THROW(ScoreModel::sinusoidal(g, -0.1, 1.0), std::invalid_argument);
}

TEST(ModifiedScore, VanishesForTailGaussian) {
  const ModelSpace space(vec2(1.0, 0.5), vec2(2.0, 0.25));
  const ModifiedScore ms(
      ScoreModel::exact(GaussianMixture::single(Vec::Zero(2), space.a()), space));
  for (double t : {0.0, 0.3, 2.0}) {
    EXPECT_LT(ms(t, vec2(1.3, -0.7)).norm(), 1e-13);
  }
  const Vec ab = ms.abar(0.5);
  EXPECT_NEAR(ab[0], 2.0 * std::exp(-0.5) + 1.0 * (1 - std::exp(-0.5)), 1e-15);
}

TEST(ModifiedScore, JacobianMatchesClosedForm) {
  const ModelSpace space(vec2(1.0, 0.5));
  const Vec v = vec2(0.3, 2.0);
  const ModifiedScore ms(
      ScoreModel::exact(GaussianMixture::single(vec2(1.0, 0.0), v), space));
  const double t = 0.6;
  const JacobianResult j = jacobian_fd(ms, t, vec2(0.2, -0.4));
  const Vec ab = ms.abar(t);
  for (int i = 0; i < 2; ++i) {
    const double c = space.c()[i];
    const double expect = -c / ou_variance(v[i], c, t) + c / ab[i];
    EXPECT_NEAR(j.jacobian(i, i), expect, 1e-7);
  }
  EXPECT_NEAR(j.jacobian(0, 1), 0.0, 1e-8);
  EXPECT_FALSE(j.noisy);
}

TEST(SymmetricOperatorNorm, MatchesEigenvalues) {
  Mat m(3, 3);
  m << 2.0, 1.0, 0.0, 3.0, -4.0, 0.5, 0.0, 0.5, 1.0;
  const Mat sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  const double expect = es.eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(symmetric_operator_norm(m), expect, 1e-9);
}

TEST(LipschitzProfile, GaussianSupIsConstantOverGrid) {
  const ModelSpace space = ModelSpace::isotropic(2);
  const ModifiedScore ms(ScoreModel::exact(
      GaussianMixture::single(Vec::Zero(2), Vec::Constant(2, 0.5)), space));
  const ProbeGrid grid = ProbeGrid::tensor(Vec::Constant(2, -2), Vec::Constant(2, 2), 9);
  const auto prof = lipschitz_profile(ms, {0.5, 1.0}, grid);
  ASSERT_EQ(prof.size(), 2u);
  for (const auto& p : prof) {
    const double expect = std::abs(-1.0 / ou_variance(0.5, 1.0, p.t) + 1.0);
    EXPECT_NEAR(p.sup_jacobian, expect, 1e-6);
  }
}

}  // namespace
}  // namespace heatscore
