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

#include "heatscore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <gtest/gtest.h>

#include "heatscore/assignment.hpp"

namespace heatscore {
namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

SampleSet random_set(int n, int d, std::uint64_t seed, double shift = 0.0) {
  SampleSet s = gaussian_sample(GaussianMeasure(Vec::Constant(d, shift), Vec::Ones(d)),
                                n, {seed, 0});
  return s;
}

// Minimum over all n! matchings.
double brute_force_w2(const SampleSet& a, const SampleSet& b) {
  std::vector<int> perm(a.count());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double c = 0.0;
    for (int i = 0; i < a.count(); ++i) {
      c += (a.row(i) - b.row(perm[i])).squaredNorm();
    }
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best / a.count());
}

TEST(Bures, DiagonalClosedForm) {
  const GaussianMeasure g1(vec2(1.0, 0.0), vec2(4.0, 1.0));
  const GaussianMeasure g2(vec2(0.0, 2.0), vec2(1.0, 9.0));
  // |dm|^2 = 5, |dsd|^2 = 1 + 4.
  EXPECT_NEAR(w2_bures(g1, g2).value, std::sqrt(10.0), 1e-15);
  EXPECT_EQ(w2_bures(g1, g1).value, 0.0);
  EXPECT_THROW(w2_bures(g1, GaussianMeasure(Vec::Zero(3), Vec::Ones(3))),
               std::invalid_argument);
}

// For 2x2 PSD M, tr sqrt(M) = sqrt(tr M + 2 sqrt(det M)).
TEST(Bures, DenseMatchesTwoByTwoIdentity) {
  Mat s1(2, 2), s2(2, 2);
  s1 << 2.0, 0.6, 0.6, 1.0;
  s2 << 0.5, -0.2, -0.2, 1.5;
  const Vec m1 = vec2(0.3, 0.1), m2 = vec2(-0.2, 0.4);
  Eigen::SelfAdjointEigenSolver<Mat> es(s2);
  const Mat r = es.operatorSqrt();
  const Mat m = r * s1 * r;
  const double tr_sqrt = std::sqrt(m.trace() + 2.0 * std::sqrt(m.determinant()));
  const double expect2 = (m1 - m2).squaredNorm() + s1.trace() + s2.trace() - 2 * tr_sqrt;
  const W2Estimate got = w2_bures_dense(m1, s1, m2, s2);
  EXPECT_NEAR(got.value, std::sqrt(expect2), 1e-12);
  // Symmetric, and equal to the diagonal formula for diagonal inputs.
  EXPECT_NEAR(w2_bures_dense(m2, s2, m1, s1).value, got.value, 1e-12);
  const GaussianMeasure g1(m1, vec2(2.0, 1.0)), g2(m2, vec2(0.5, 1.5));
  EXPECT_NEAR(w2_bures_dense(m1, Mat(g1.var.asDiagonal()), m2, Mat(g2.var.asDiagonal())).value,
              w2_bures(g1, g2).value, 1e-12);
}

TEST(Bures, DenseRotationInvariant) {
  Mat s1(2, 2), s2(2, 2);
  s1 << 2.0, 0.6, 0.6, 1.0;
  s2 << 0.5, -0.2, -0.2, 1.5;
  const double th = 0.7;
  Mat q(2, 2);
  q << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const Vec m1 = vec2(1, 2), m2 = vec2(0, -1);
  EXPECT_NEAR(w2_bures_dense(m1, s1, m2, s2).value,
              w2_bures_dense(q * m1, q * s1 * q.transpose(), q * m2,
                             q * s2 * q.transpose()).value,
              1e-12);
}

TEST(Assignment, MatchesBruteForce) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const SampleSet a = random_set(7, 2, seed);
    const SampleSet b = random_set(7, 2, seed + 100, 0.5);
    EXPECT_NEAR(w2_assignment(a, b).value, brute_force_w2(a, b), 1e-12);
  }
}

TEST(Assignment, MatrixSolverIsPermutationOptimal) {
  Mat cost(3, 3);
  cost << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const std::vector<int> m = solve_assignment_matrix(cost);
  double total = 0.0;
  for (int i = 0; i < 3; ++i) total += cost(i, m[i]);
  EXPECT_DOUBLE_EQ(total, 5.0);
  std::vector<int> sorted = m;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2}));
  EXPECT_TRUE(solve_assignment_matrix(Mat(0, 0)).empty());
}

TEST(Assignment, IdentityAndSymmetry) {
  const SampleSet a = random_set(50, 3, 4);
  const SampleSet b = random_set(50, 3, 5);
  EXPECT_NEAR(w2_assignment(a, a).value, 0.0, 1e-15);
  EXPECT_NEAR(w2_assignment(a, b).value, w2_assignment(b, a).value, 1e-12);
  EXPECT_THROW(w2_assignment(a, random_set(49, 3, 5)), std::invalid_argument);
}

TEST(Sorted, AgreesWithAssignmentIn1D) {
  const SampleSet a = random_set(200, 1, 6);
  const SampleSet b = random_set(200, 1, 7, 1.0);
  std::vector<double> va(a.draws.data(), a.draws.data() + 200);
  std::vector<double> vb(b.draws.data(), b.draws.data() + 200);
  EXPECT_NEAR(w2_sorted_1d(va, vb).value, w2_assignment(a, b).value, 1e-12);
  EXPECT_NEAR(w2_sorted_1d({0.0, 1.0}, {3.0, 2.0}).value, 2.0, 1e-15);
  EXPECT_THROW(w2_sorted_1d({}, {}), std::invalid_argument);
}

TEST(Sliced, ShiftRecoversNorm) {
  const int d = 4;
  const SampleSet a = random_set(500, d, 8);
  SampleSet b = a;
  Vec v(d);
  v << 1.0, -2.0, 0.5, 0.0;
  b.draws.rowwise() += v.transpose();
  SlicedOptions opt;
  opt.n_proj = 2000;
  opt.dimension_normalized = true;
  const W2Estimate s = w2_sliced(a, b, {9, 0}, opt);
  EXPECT_NEAR(s.value, v.norm(), 0.05 * v.norm());
  opt.dimension_normalized = false;
  const W2Estimate raw = w2_sliced(a, b, {9, 0}, opt);
  EXPECT_NEAR(raw.value * std::sqrt(d), s.value, 1e-12);
  EXPECT_LE(raw.value, w2_assignment(a, b).value + 1e-12);
  opt.n_proj = 4;
  EXPECT_THROW(w2_sliced(a, b, {9, 0}, opt), std::invalid_argument);
}

TEST(FitGaussian, SampleMoments) {
  const SampleSet s = random_set(1000, 2, 10, 2.0);
  const GaussianMeasure g = fit_gaussian(s);
  EXPECT_LT((g.mean - sample_mean(s)).norm(), 1e-14);
  EXPECT_LT((g.var - sample_variance(s)).norm(), 1e-14);
}

TEST(KlQuadrature, GaussianClosedForm) {
  const ModelSpace space(vec2(1.0, 0.5));
  const Vec m = vec2(0.5, -1.0), v = vec2(0.3, 0.8);
  double expect = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double c = space.c()[i];
    expect += 0.5 * (v[i] / c + m[i] * m[i] / c - 1.0 - std::log(v[i] / c));
  }
  EXPECT_NEAR(kl_quadrature(GaussianMixture::single(m, v), space), expect, 1e-10);
  EXPECT_THROW(kl_quadrature(GaussianMixture(vec2(0.5, 0.5), {m, m}, {v, v}), space),
               std::invalid_argument);
}

TEST(KlQuadrature, ProductSumsFactors) {
  const ModelSpace one(Vec::Ones(1));
  const Mixture1D f{{0.5, 0.5}, {-1.0, 1.0}, {0.25, 0.25}};
  const double single = kl_quadrature(ProductMixture({f}), one);
  const double triple = kl_quadrature(ProductMixture({f, f, f}), ModelSpace(Vec::Ones(3)));
  EXPECT_GT(single, 0.0);
  EXPECT_NEAR(triple, 3.0 * single, 1e-12);
}

TEST(EstimatesCsv, Columns) {
  const CsvTable t = estimates_to_csv({w2_sorted_1d({0.0}, {1.0})});
  EXPECT_EQ(t.rows().size(), 1u);
  EXPECT_EQ(t.columns().front(), "method");
  EXPECT_EQ(to_string(W2Method::kSliced), "sliced");
}

}  // namespace
}  // namespace heatscore
