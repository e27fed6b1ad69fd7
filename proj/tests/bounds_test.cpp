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

#include "heatscore/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

namespace heatscore {
namespace {

constexpr double kE = std::numbers::e;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

ConstantsReport tail_gaussian_report() {
  const ModelSpace space(vec2(1.0, 0.5));
  return constants(GaussianMixture::single(Vec::Zero(2), space.c()), space);
}

TEST(Constants, TailGaussianIsTrivial) {
  const ConstantsReport r = tail_gaussian_report();
  EXPECT_DOUBLE_EQ(r.K.value, 1.0);
  EXPECT_NEAR(r.L0.value, 0.0, 1e-12);
  EXPECT_NEAR(r.L1.value, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.L2.value, 0.0);
  EXPECT_NEAR(r.K1.value, std::exp(4.0) * (kE + 1) * kE, 1e-9);
  EXPECT_DOUBLE_EQ(r.M2.value, 1.5);
  EXPECT_DOUBLE_EQ(r.M0.value, 1.5);
  EXPECT_EQ(r.K.provenance, Provenance::kClosedForm);
  EXPECT_EQ(r.L0.provenance, Provenance::kMeasuredGrid);
  EXPECT_FALSE(r.K3.available());
}

TEST(Constants, TailMismatchSetsKAndL2) {
  const ModelSpace space(vec2(1.0, 0.5), vec2(2.0, 0.25));
  const ConstantsReport r =
      constants(GaussianMixture::single(Vec::Zero(2), vec2(1.0, 0.5)), space);
  EXPECT_DOUBLE_EQ(r.K.value, 2.0);
  // max |1 - c/a|, |a/c - 1| over the spectrum: c/a = 2 in the second mode.
  EXPECT_DOUBLE_EQ(r.L2.value, 1.0);
}

TEST(Constants, TheoremConstantFormula) {
  EXPECT_NEAR(theorem_constant(0.0), std::exp(4.0) * (kE + 1) * kE, 1e-9);
  const double l = 2.0;
  EXPECT_NEAR(theorem_constant(l) / (std::exp(4 + 3 * l) * std::exp(3.0) * l * l), 1.0,
              1e-14);
  EXPECT_NEAR(log_theorem_constant(l), std::log(theorem_constant(l)), 1e-12);
  EXPECT_NEAR(relaxed_constant(0.0, 0.0, 0.0), theorem_constant(0.0), 1e-9);
  EXPECT_GT(relaxed_constant(0.5, 0.2, 0.3), theorem_constant(0.7));
}

TEST(Constants, BoundedSupportConstant) {
  const double r = 2.0, delta = 0.5;
  const double u = 1 - std::exp(-delta);
  EXPECT_NEAR(log_bounded_support_constant(r, delta),
              std::log(2.0) + 7 + 12 * r * r / (u * u) + 4 / u, 1e-10);
  EXPECT_NEAR(std::log(bounded_support_constant(r, delta)),
              log_bounded_support_constant(r, delta), 1e-10);
  // Tiny delta: the constant overflows but its log stays finite.
  EXPECT_TRUE(std::isfinite(log_bounded_support_constant(r, 1e-4)));
}

TEST(Constants, StoppedCloudClosedForms) {
  const ModelSpace space = ModelSpace::isotropic(1);
  const MollifiedPointCloud cloud({Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)},
                                  vec2(0.5, 0.5), 0.0, 2.0);
  ConstantsOptions opt;
  opt.tail.stopping_delta = 0.2;
  const ConstantsReport r = constants(cloud, space, opt);
  const double u = 1 - std::exp(-0.2);
  EXPECT_NEAR(r.L0.value, 3 * 4.0 / (u * u), 1e-9);
  EXPECT_NEAR(r.L1.value, 2.0 / u, 1e-12);
  EXPECT_NEAR(r.L2.value, 1.0 / u, 1e-12);
  EXPECT_DOUBLE_EQ(r.K.value, 1.0);
  EXPECT_TRUE(r.K2.available());
  EXPECT_THROW(constants(cloud, ModelSpace(Vec::Constant(1, 0.5)), opt), std::exception);
}

TEST(Constants, PosteriorProvidesBayesConstants) {
  const ModelSpace space(vec2(1.0, 0.5));
  Mat G(2, 2);
  G << 1.0, 0.0, 0.5, 1.0;
  const LinearGaussianPosterior post(G, vec2(0.5, 0.5), vec2(0.8, -0.4));
  const ConstantsReport r = constants(post, space);
  EXPECT_TRUE(r.k3.available());
  EXPECT_TRUE(r.K3.available());
  EXPECT_GT(r.k3.value, 0.0);
}

TEST(Constants, TableListsEveryEntry) {
  const ConstantsReport r = tail_gaussian_report();
  const CsvTable t = constants_to_csv(r);
  EXPECT_EQ(t.rows().size(), r.entries().size());
  EXPECT_NE(constants_text(r).find("K1"), std::string::npos);
}

TEST(SmallStep, CapFormula) {
  ConstantsReport r = tail_gaussian_report();
  EXPECT_DOUBLE_EQ(small_step_cap(r, BoundVariant::kStandard), 1.0);
  r.L0.value = 1.0;
  r.L2.value = 1.0;
  EXPECT_NEAR(small_step_cap(r, BoundVariant::kStandard), 1.0 / (2.0 * kE), 1e-15);
}

BoundInputs inputs(double T, double tau, double eps) {
  BoundInputs in;
  in.m2 = 1.5;
  in.trace_c = 1.5;
  in.horizon = T;
  in.tau = tau;
  in.eps = eps;
  return in;
}

TEST(Theorem2Bound, ClosedFormAndMonotone) {
  const ConstantsReport r = tail_gaussian_report();
  const BoundEvaluation ev = theorem2_bound(r, inputs(2.0, 0.1, 0.05));
  const double expect =
      r.K1.value * (std::exp(-4.0) * 3.0 + 0.05 * 0.05 * 2.0 + 1.5 * 0.01);
  EXPECT_NEAR(ev.value, expect, 1e-12 * expect);
  // Decreasing in T only while the eps term is off.
  double prev = 1e300;
  for (double T : {1.0, 2.0, 4.0, 8.0}) {
    const double v = theorem2_bound(r, inputs(T, 0.1, 0.0)).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
  prev = 0.0;
  for (double tau : {0.01, 0.05, 0.2, 1.0}) {
    const double v = theorem2_bound(r, inputs(4.0, tau, 0.1)).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = 0.0;
  for (double eps : {0.0, 0.01, 0.1, 1.0}) {
    const double v = theorem2_bound(r, inputs(4.0, 0.1, eps)).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Theorem2Bound, StepHypothesis) {
  ConstantsReport r = tail_gaussian_report();
  r.L0.value = 4.0;
  EXPECT_THROW(theorem2_bound(r, inputs(2.0, 0.5, 0.0)), std::domain_error);
  const BoundEvaluation ev =
      theorem2_bound(r, inputs(2.0, 0.5, 0.0), BoundVariant::kStandard, false);
  EXPECT_FALSE(ev.tau_hypothesis_met);
  EXPECT_THROW(theorem2_bound(r, inputs(2.0, 0.01, 0.0), BoundVariant::kRelaxed),
               std::invalid_argument);
  EXPECT_THROW(theorem2_bound(r, inputs(0.0, 0.01, 0.0)), std::invalid_argument);
}

TEST(Theorem2Bound, EarlyStoppingWeakensTheTerm) {
  const ConstantsReport r = tail_gaussian_report();
  BoundInputs in = inputs(3.0, 0.05, 0.0);
  in.delta = 0.5;
  EXPECT_GT(theorem2_bound(r, in, BoundVariant::kEarlyStopping).value,
            theorem2_bound(r, in, BoundVariant::kStandard).value);
}

TEST(Planner, StandardPlanMeetsTarget) {
  const ConstantsReport r = tail_gaussian_report();
  double prev_n = 0;
  for (double eps0 : {1.0, 0.5, 0.1, 0.05}) {
    const ComplexityPlan p = plan_complexity(r, 1.5, 1.5, eps0);
    ASSERT_TRUE(p.feasible);
    EXPECT_LE(p.bound_value, p.target_squared * (1 + 1e-9));
    EXPECT_NEAR(p.target_squared, eps0 * eps0, 1e-15);
    EXPECT_EQ(p.N, static_cast<std::int64_t>(std::ceil(std::exp(p.log_N) - 1e-9)));
    // The bound at the planned point equals the sum of the budgeted shares.
    const BoundEvaluation ev = theorem2_bound(r, inputs(p.horizon, p.tau, p.eps_budget),
                                              BoundVariant::kStandard, false);
    EXPECT_NEAR(ev.value, p.bound_value, 1e-9 * p.bound_value);
    EXPECT_GT(static_cast<double>(p.N), prev_n);
    prev_n = static_cast<double>(p.N);
  }
  PlanOptions bad;
  bad.budget_split = {0.5, 0.5, 0.5};
  EXPECT_THROW(plan_complexity(r, 1.5, 1.5, 0.1, bad), std::invalid_argument);
  EXPECT_THROW(plan_complexity(r, 1.5, 1.5, 0.0), std::invalid_argument);
}

TEST(Planner, BoundedSupportP0Delta) {
  const ConstantsReport r = tail_gaussian_report();
  PlanOptions opt;
  opt.mode = PlanMode::kBoundedSupportP0;
  opt.diameter = 2.0;
  opt.dim = 1;
  opt.max_steps = 9e18;
  const double eps0 = 0.5, m0 = 1.5;
  const ComplexityPlan p = plan_complexity(r, 1.5, 1.5, eps0, opt);
  EXPECT_NEAR(p.delta, eps0 * eps0 / (16 * m0), 1e-15);
  EXPECT_TRUE(std::isfinite(p.log_N));
  EXPECT_TRUE(std::isfinite(p.log_constant));
  opt.max_steps = 10;
  const ComplexityPlan q = plan_complexity(r, 1.5, 1.5, eps0, opt);
  EXPECT_FALSE(q.feasible);
  EXPECT_EQ(q.N, -1);
  opt.throw_if_infeasible = true;
  EXPECT_THROW(plan_complexity(r, 1.5, 1.5, eps0, opt), std::exception);
}

TEST(Planner, EmpiricalModeUsesFittedCoefficients) {
  const ConstantsReport r = tail_gaussian_report();
  PlanOptions opt;
  opt.empirical = EmpiricalCoefficients{2.0, 0.5, 0.3};
  const ComplexityPlan p = plan_complexity(r, 1.5, 1.5, 0.1, opt);
  EXPECT_EQ(p.constants_label, "empirical");
  const double v = 2.0 * std::exp(-2 * p.horizon) + 0.5 * p.eps_budget * p.eps_budget * p.horizon +
                   0.3 * p.tau * p.tau;
  EXPECT_LE(v, 0.01 * (1 + 1e-9));
  EXPECT_EQ(plan_to_csv(p).rows().size(), 1u);
  EXPECT_NE(plan_text(p).find("empirical"), std::string::npos);
}

TEST(EmpiricalFit, RecoversExactCoefficients) {
  std::vector<SweepObservation> obs;
  for (double T : {1.0, 2.0, 3.0}) {
    for (double tau : {0.05, 0.1}) {
      for (double eps : {0.0, 0.1}) {
        obs.push_back({T, tau, eps,
                       1.5 * std::exp(-2 * T) + 0.7 * eps * eps * T + 0.2 * tau * tau});
      }
    }
  }
  const EmpiricalCoefficients c = fit_empirical_coefficients(obs);
  EXPECT_NEAR(c.c_T, 1.5, 1e-9);
  EXPECT_NEAR(c.c_eps, 0.7, 1e-9);
  EXPECT_NEAR(c.c_tau, 0.2, 1e-9);
}

TEST(EmpiricalFit, ClipsNegativeCoefficients) {
  std::vector<SweepObservation> obs;
  for (double T : {1.0, 2.0, 3.0}) {
    for (double tau : {0.05, 0.1, 0.2}) {
      obs.push_back({T, tau, 0.0, 1.0 * std::exp(-2 * T) - 0.5 * tau * tau + 0.02});
    }
  }
  const EmpiricalCoefficients c = fit_empirical_coefficients(obs);
  EXPECT_GE(c.c_T, 0.0);
  EXPECT_GE(c.c_eps, 0.0);
  EXPECT_GE(c.c_tau, 0.0);
  EXPECT_THROW(fit_empirical_coefficients({obs[0], obs[1]}), std::invalid_argument);
}

}  // namespace
}  // namespace heatscore
