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

#ifndef HEATSCORE_BOUNDS_HPP_
#define HEATSCORE_BOUNDS_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "heatscore/csv.hpp"
#include "heatscore/probe.hpp"
#include "heatscore/scores.hpp"
#include "heatscore/targets.hpp"

namespace heatscore {

enum class Provenance { kClosedForm, kMeasuredGrid, kNotApplicable };

std::string to_string(Provenance p);

struct ConstantEntry {
  double value = std::numeric_limits<double>::quiet_NaN();
  Provenance provenance = Provenance::kNotApplicable;

  bool available() const { return provenance != Provenance::kNotApplicable; }
};

struct ConstantsReport {
  ConstantEntry K, L0, L1, L2, M0, M2, K1, K1_relaxed, K2, k3, K3, B_sum;
  // Box over which the measured entries were taken.
  Vec box_lower;
  Vec box_upper;
  // Set when the target is a point cloud decomposed after stopping.
  double stopping_delta = 0.0;
  double support_diameter = 0.0;

  std::vector<std::pair<std::string, const ConstantEntry*>> entries() const;
};

struct ConstantsOptions {
  TailOptions tail;
  // Relaxed-hypothesis constant needs a measured step-weighted gradient sum.
  std::optional<double> b_sum;
};

// e^{4 + 3 L} max{(e + 1) e, e^3 L^2}
double theorem_constant(double lipschitz_sum);
// e^{4 + 3 (L2 + e B)} max{(e + 1) e, e^3 (L0 + L2)^2}
double relaxed_constant(double l0, double l2, double b);
// 2 exp(7 + 12 R^2 / u^2 + 4 / u), u = 1 - e^{-delta}
double bounded_support_constant(double diameter, double delta);
// Natural logs of the same constants; the planner works with these because
// K2 overflows a double long before the plan becomes meaningless.
double log_theorem_constant(double lipschitz_sum);
double log_bounded_support_constant(double diameter, double delta);

ConstantsReport constants(const TargetModel& target, const ModelSpace& space,
                          const ConstantsOptions& options = {});

// Step-weighted sum of sup ||grad s~_theta(T - t_k, .)|| over the grid.
double measure_b_sum(const ModifiedScore& ms, const Schedule& schedule,
                     const ProbeGrid& grid);

enum class BoundVariant {
  kStandard,
  kEarlyStopping,
  kBayesian,
  kBoundedSupport,
  kRelaxed
};

std::string to_string(BoundVariant v);

struct BoundInputs {
  double m2 = 0.0;
  double trace_c = 0.0;
  double horizon = 0.0;
  double tau = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  // Bounded-support variant only.
  double diameter = 0.0;
  int dim = 0;
};

struct BoundEvaluation {
  double value = 0.0;
  double constant = 0.0;
  double tau_cap = 0.0;
  bool tau_hypothesis_met = true;
};

// min{1, 1 / (L e)} with L the variant's Lipschitz sum.
double small_step_cap(const ConstantsReport& report, BoundVariant variant);

// Right-hand side of the W2^2 bound. With enforce_step the small-step
// hypothesis violation throws; otherwise it is reported in the result.
BoundEvaluation theorem2_bound(const ConstantsReport& report,
                               const BoundInputs& in,
                               BoundVariant variant = BoundVariant::kStandard,
                               bool enforce_step = true);

enum class PlanMode { kStandard, kBoundedSupportDelta, kBoundedSupportP0 };

std::string to_string(PlanMode m);

// W2^2 ~ c_T e^{-2T} + c_eps eps^2 T + c_tau tau^2, fitted from sweeps.
struct EmpiricalCoefficients {
  double c_T = 0.0;
  double c_eps = 0.0;
  double c_tau = 0.0;
};

struct SweepObservation {
  double horizon = 0.0;
  double tau = 0.0;
  double eps = 0.0;
  double w2_squared = 0.0;
};

// Nonnegative least squares over the three coefficients.
EmpiricalCoefficients fit_empirical_coefficients(
    const std::vector<SweepObservation>& observations);

struct PlanOptions {
  PlanMode mode = PlanMode::kStandard;
  // Shares of eps0^2 given to the (T, tau, eps) terms.
  std::array<double, 3> budget_split{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  // Bounded-support modes: diameter R and dimension d; delta for the
  // fixed-delta mode.
  double diameter = 0.0;
  int dim = 0;
  double delta = 0.0;
  double max_steps = 1e9;
  std::optional<EmpiricalCoefficients> empirical;
  bool throw_if_infeasible = false;
};

struct ComplexityPlan {
  PlanMode mode = PlanMode::kStandard;
  std::string constants_label;  // "theorem" or "empirical"
  double eps0 = 0.0;
  double horizon = 0.0;
  double tau = 0.0;
  double log_tau = 0.0;
  double delta = 0.0;
  double eps_budget = 0.0;
  // log((T - delta) / tau); finite even when N itself overflows.
  double log_N = 0.0;
  std::int64_t N = 0;
  std::array<double, 3> budget_split{};
  double constant = 0.0;
  double log_constant = 0.0;
  // Bound at the planned values, against the target eps_bound^2.
  double bound_value = 0.0;
  double target_squared = 0.0;
  bool tau_capped = false;
  bool feasible = true;
};

ComplexityPlan plan_complexity(const ConstantsReport& report, double m2,
                               double trace_c, double eps0,
                               const PlanOptions& options = {});

CsvTable constants_to_csv(const ConstantsReport& report);
CsvTable plan_to_csv(const ComplexityPlan& plan);
// Aligned two-column table, one constant per row, with provenance.
std::string constants_text(const ConstantsReport& report);
std::string plan_text(const ComplexityPlan& plan);

}  // namespace heatscore

#endif  // HEATSCORE_BOUNDS_HPP_
