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

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

namespace heatscore {
namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

GaussianMixture two_component() {
  return GaussianMixture(vec2(0.3, 0.7), {vec2(-1.0, 0.5), vec2(1.5, -0.2)},
                         {vec2(0.4, 0.9), vec2(0.6, 0.3)});
}

// Direct evaluation of the mixture density, no log-sum-exp.
double naive_mixture_density(const GaussianMixture& m, const Vec& x) {
  double p = 0.0;
  for (int j = 0; j < m.components(); ++j) {
    double comp = 1.0;
    for (int i = 0; i < m.dim(); ++i) {
      const double v = m.vars[j][i];
      const double r = x[i] - m.means[j][i];
      comp *= std::exp(-r * r / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v);
    }
    p += m.weights[j] * comp;
  }
  return p;
}

Vec fd_grad(const MarginalLaw& law, const Vec& x) {
  Vec g(x.size());
  const double h = 1e-5;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (log_density(law, xp) - log_density(law, xm)) / (2.0 * h);
  }
  return g;
}

Mat fd_hess(const MarginalLaw& law, const Vec& x) {
  Mat m(x.size(), x.size());
  const double h = 1e-5;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    m.col(i) = (grad_log_density(law, xp) - grad_log_density(law, xm)) / (2.0 * h);
  }
  return m;
}

TEST(Targets, ConstructorsValidate) {
  EXPECT_THROW(GaussianMixture(vec2(0.5, 0.6), {vec2(0, 0), vec2(0, 0)},
                               {vec2(1, 1), vec2(1, 1)}),
               std::invalid_argument);
  EXPECT_THROW(GaussianMixture(vec2(0.5, 0.5), {vec2(0, 0)}, {vec2(1, 1)}),
               std::invalid_argument);
  EXPECT_THROW(ProductMixture({}), std::invalid_argument);
  EXPECT_THROW(ProductMixture({Mixture1D{{1.0}, {0.0}, {-1.0}}}),
               std::invalid_argument);
  EXPECT_THROW(MollifiedPointCloud({vec2(0, 0)}, Vec::Ones(1), -1.0, 0.0),
               std::invalid_argument);
  EXPECT_THROW(LinearGaussianPosterior(Mat::Ones(2, 2), Vec::Ones(3),
                                       Vec::Ones(2)),
               std::invalid_argument);
  EXPECT_THROW(DenseGaussian(Vec::Zero(2), Mat::Identity(3, 3)),
               std::invalid_argument);
}

TEST(Targets, MixtureDensityMatchesDirectSum) {
  const GaussianMixture m = two_component();
  const MarginalLaw law = m;
  for (double a : {-2.0, -0.3, 0.0, 1.1, 2.5}) {
    for (double b : {-1.0, 0.2, 1.7}) {
      const Vec x = vec2(a, b);
      EXPECT_NEAR(log_density(law, x), std::log(naive_mixture_density(m, x)),
                  1e-12);
    }
  }
  // Far in the tail the naive sum underflows; the log stays finite.
  EXPECT_TRUE(std::isfinite(log_density(law, vec2(60.0, -60.0))));
}

TEST(Targets, GradientAndHessianMatchFiniteDifferences) {
  const MarginalLaw mix = two_component();
  std::vector<Mixture1D> f{{{0.5, 0.5}, {-1.0, 1.0}, {0.25, 0.25}},
                           {{0.2, 0.8}, {0.0, 2.0}, {1.0, 0.5}}};
  const MarginalLaw prod = ProductMixture(f);
  Mat s(2, 2);
  s << 1.0, 0.3, 0.3, 0.5;
  const MarginalLaw dense = DenseGaussian(vec2(0.1, -0.2), s);
  for (const MarginalLaw* law : {&mix, &prod, &dense}) {
    for (const Vec& x : {vec2(0.3, -0.4), vec2(-1.2, 1.0), vec2(2.0, 0.0)}) {
      EXPECT_LT((grad_log_density(*law, x) - fd_grad(*law, x)).norm(), 1e-6);
      EXPECT_LT((hess_log_density(*law, x) - fd_hess(*law, x)).norm(), 1e-5);
    }
  }
}

TEST(Targets, ProductEqualsExpandedMixture) {
  std::vector<Mixture1D> f{{{0.5, 0.5}, {-1.0, 1.0}, {0.25, 0.25}},
                           {{0.2, 0.8}, {0.0, 2.0}, {1.0, 0.5}}};
  const MarginalLaw prod = ProductMixture(f);
  Vec w(4);
  std::vector<Vec> m, v;
  int idx = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      w[idx++] = f[0].weights[i] * f[1].weights[j];
      m.push_back(vec2(f[0].means[i], f[1].means[j]));
      v.push_back(vec2(f[0].vars[i], f[1].vars[j]));
    }
  }
  const MarginalLaw mix = GaussianMixture(w, m, v);
  const Vec x = vec2(0.7, 1.3);
  EXPECT_NEAR(log_density(prod, x), log_density(mix, x), 1e-12);
  EXPECT_NEAR(second_moment(prod), second_moment(mix), 1e-12);
  EXPECT_LT((law_mean(prod) - law_mean(mix)).norm(), 1e-14);
}

TEST(Targets, GaussianEvolutionClosedForm) {
  const ModelSpace space(vec2(1.0, 0.5));
  const GaussianMixture g = GaussianMixture::single(vec2(2.0, -1.0), vec2(0.3, 2.0));
  const double t = 0.8;
  const auto out = std::get<GaussianMixture>(evolve(g, space, t));
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(out.means[0][i], std::exp(-t / 2) * g.means[0][i], 1e-15);
    EXPECT_NEAR(out.vars[0][i],
                std::exp(-t) * g.vars[0][i] + (1 - std::exp(-t)) * space.c()[i],
                1e-15);
  }
  EXPECT_THROW(evolve(g, space, -1.0), std::invalid_argument);
}

TEST(Targets, EvolutionIsASemigroup) {
  const ModelSpace space(vec2(1.0, 0.5));
  const MarginalLaw law = two_component();
  const auto ab = std::get<GaussianMixture>(evolve(evolve(law, space, 0.3), space, 0.9));
  const auto direct = std::get<GaussianMixture>(evolve(law, space, 1.2));
  for (int j = 0; j < 2; ++j) {
    EXPECT_LT((ab.means[j] - direct.means[j]).norm(), 1e-14);
    EXPECT_LT((ab.vars[j] - direct.vars[j]).norm(), 1e-14);
  }
  Mat s(2, 2);
  s << 1.0, 0.3, 0.3, 0.5;
  const MarginalLaw dense = DenseGaussian(vec2(0.1, -0.2), s);
  const auto d1 = std::get<DenseGaussian>(evolve(evolve(dense, space, 0.5), space, 0.5));
  const auto d2 = std::get<DenseGaussian>(evolve(dense, space, 1.0));
  EXPECT_LT((d1.cov - d2.cov).norm(), 1e-14);
  EXPECT_LT((d1.mean - d2.mean).norm(), 1e-14);
}

TEST(Targets, LongTimeLimitIsBase) {
  const ModelSpace space(vec2(1.0, 0.5));
  const ForwardMarginal fm = forward_marginal(GaussianMixture(two_component()), space, 40.0);
  const Vec x = vec2(0.4, -0.3);
  const double expected = -0.5 * (x[0] * x[0] / 1.0 + x[1] * x[1] / 0.5) -
                          std::log(2.0 * std::numbers::pi) - 0.5 * std::log(0.5);
  EXPECT_NEAR(log_density(fm.law, x), expected, 1e-8);
}

TEST(Targets, StoppedCloudIsMixtureOfEvolvedAtoms) {
  const ModelSpace space = ModelSpace::isotropic(2);
  const MollifiedPointCloud cloud({vec2(1.0, 0.0), vec2(-1.0, 0.0)},
                                  vec2(0.5, 0.5), 0.0, 2.0);
  const double delta = 0.3;
  const GaussianMixture m = stopped_cloud(cloud, space, delta);
  ASSERT_EQ(m.components(), 2);
  for (int j = 0; j < 2; ++j) {
    EXPECT_LT((m.means[j] - std::exp(-delta / 2) * cloud.atoms[j]).norm(), 1e-15);
    EXPECT_NEAR(m.vars[j][0], 1.0 - std::exp(-delta), 1e-15);
  }
  EXPECT_THROW(stopped_cloud(cloud, space, 0.0), std::invalid_argument);
  EXPECT_THROW(stopped_cloud(cloud, ModelSpace(vec2(1.0, 0.5)), 0.3),
               std::invalid_argument);
}

TEST(Targets, PosteriorMatchesNormalEquations) {
  const ModelSpace space(vec2(1.0, 0.25));
  Mat G(3, 2);
  G << 1.0, 0.5, 0.0, 1.0, 2.0, -1.0;
  Vec noise(3), y(3);
  noise << 0.1, 0.2, 0.5;
  y << 0.3, -0.1, 0.8;
  const auto post = std::get<DenseGaussian>(
      law_at_zero(LinearGaussianPosterior(G, noise, y), space));
  // Independent route: Gaussian conditioning of (x, Gx + noise).
  Mat prior = space.c().asDiagonal();
  Mat gram = G * prior * G.transpose();
  gram.diagonal() += noise;
  const Mat gain = prior * G.transpose() * gram.inverse();
  const Vec mean = gain * y;
  const Mat cov = prior - gain * G * prior;
  EXPECT_LT((post.mean - mean).norm(), 1e-12);
  EXPECT_LT((post.cov - cov).norm(), 1e-12);
}

TEST(Targets, SampleMomentsMatchLaw) {
  const MarginalLaw law = two_component();
  const int n = 40000;
  const SampleSet s = sample(law, n, {3, 0});
  EXPECT_NEAR(second_moment(s), second_moment(law), 0.05);
  EXPECT_LT((sample_mean(s) - law_mean(law)).norm(), 0.03);
  EXPECT_EQ(s, sample(law, n, {3, 0}));
}

TEST(Targets, DiagonalGaussianView) {
  EXPECT_TRUE(as_diagonal_gaussian(GaussianMixture::single(vec2(1, 2), vec2(1, 1))));
  EXPECT_FALSE(as_diagonal_gaussian(two_component()));
}

TEST(HFunction, VanishesForTailGaussian) {
  const ModelSpace space(vec2(1.0, 0.5), vec2(2.0, 0.25));
  const MarginalLaw law = GaussianMixture::single(Vec::Zero(2), space.a());
  const HFunction h(law, space, TailOptions{});
  EXPECT_LT(h.grad(vec2(0.7, -1.9)).norm(), 1e-12);
  EXPECT_LT(h.hess(vec2(0.7, -1.9)).norm(), 1e-12);
  EXPECT_NEAR(h.value(vec2(3.0, 1.0)), h.value(vec2(0.0, 0.0)), 1e-12);
  EXPECT_LT(h.sup_sqrtc_grad(), 1e-10);
  EXPECT_LT(h.sup_c_hess(), 1e-10);
}

TEST(HFunction, GradientMatchesFiniteDifference) {
  const ModelSpace space(vec2(1.0, 0.5));
  const HFunction h(two_component(), space, TailOptions{});
  const Vec x = vec2(0.4, -0.6);
  Vec g(2);
  for (int i = 0; i < 2; ++i) {
    Vec xp = x, xm = x;
    xp[i] += 1e-5;
    xm[i] -= 1e-5;
    g[i] = (h.value(xp) - h.value(xm)) / 2e-5;
  }
  EXPECT_LT((h.grad(x) - g).norm(), 1e-6);
  // The box sup dominates every probe point.
  for (int i = 0; i < h.grid().size(); i += 37) {
    const Vec p = h.grid().point(i);
    EXPECT_LE((space.c().cwiseSqrt().asDiagonal() * h.grad(p)).norm(),
              h.sup_sqrtc_grad() * (1 + 1e-12));
  }
}

TEST(HFunction, GradientCapRejects) {
  const ModelSpace space(vec2(1.0, 1.0));
  TailOptions opt;
  opt.gradient_cap = 1e-3;
  EXPECT_THROW(tail_decomposition(two_component(), space, opt),
               std::exception);
}

TEST(Targets, OperatorNorm) {
  Mat m(2, 2);
  m << 3.0, 0.0, 4.0, 5.0;
  // Singular values of [[3,0],[4,5]] are 3 sqrt(5) and sqrt(5).
  EXPECT_NEAR(operator_norm(m), 3.0 * std::sqrt(5.0), 1e-12);
}

}  // namespace
}  // namespace heatscore
