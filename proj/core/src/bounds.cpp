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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace heatscore {
namespace {

constexpr double kE = std::numbers::e;

ConstantEntry closed(double v) { return {v, Provenance::kClosedForm}; }
ConstantEntry measured(double v) { return {v, Provenance::kMeasuredGrid}; }

// Measured entries taint anything computed from them.
ConstantEntry derived(double v, std::initializer_list<ConstantEntry> inputs) {
  for (const auto& in : inputs) {
    if (in.provenance == Provenance::kMeasuredGrid) return measured(v);
  }
  return closed(v);
}

std::string short_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kClosedForm: return "closed-form";
    case Provenance::kMeasuredGrid: return "measured-grid";
    case Provenance::kNotApplicable: return "n/a";
  }
  return "n/a";
}

std::string to_string(BoundVariant v) {
  switch (v) {
    case BoundVariant::kStandard: return "standard";
    case BoundVariant::kEarlyStopping: return "early_stopping";
    case BoundVariant::kBayesian: return "bayesian";
    case BoundVariant::kBoundedSupport: return "bounded_support";
    case BoundVariant::kRelaxed: return "relaxed";
  }
  return "standard";
}

std::string to_string(PlanMode m) {
  switch (m) {
    case PlanMode::kStandard: return "standard";
    case PlanMode::kBoundedSupportDelta: return "bounded_support_delta";
    case PlanMode::kBoundedSupportP0: return "bounded_support_p0";
  }
  return "standard";
}

std::vector<std::pair<std::string, const ConstantEntry*>>
ConstantsReport::entries() const {
  return {{"K", &K},   {"L0", &L0}, {"L1", &L1},
          {"L2", &L2}, {"M0", &M0}, {"M2", &M2},
          {"K1", &K1}, {"K1_relaxed", &K1_relaxed}, {"K2", &K2},
          {"k3", &k3}, {"K3", &K3}, {"B_sum", &B_sum}};
}

double theorem_constant(double l) {
  return std::exp(4.0 + 3.0 * l) * std::max((kE + 1.0) * kE, kE * kE * kE * l * l);
}

double relaxed_constant(double l0, double l2, double b) {
  const double l = l0 + l2;
  return std::exp(4.0 + 3.0 * (l2 + kE * b)) *
         std::max((kE + 1.0) * kE, kE * kE * kE * l * l);
}

double bounded_support_constant(double diameter, double delta) {
  return std::exp(log_bounded_support_constant(diameter, delta));
}

double log_theorem_constant(double l) {
  return 4.0 + 3.0 * l + std::log(std::max((kE + 1.0) * kE, kE * kE * kE * l * l));
}

double log_bounded_support_constant(double diameter, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("K2 needs delta > 0");
  const double u = -std::expm1(-delta);
  return std::log(2.0) + 7.0 + 12.0 * diameter * diameter / (u * u) + 4.0 / u;
}

ConstantsReport constants(const TargetModel& target, const ModelSpace& space,
                          const ConstantsOptions& options) {
  ConstantsReport r;
  const Vec& c = space.c();
  const Vec& a = space.a();

  const MarginalLaw law0 = law_at_zero(target, space);
  r.M2 = closed(second_moment(law0));
  r.M0 = closed(std::max({space.trace_c(), r.M2.value, 1.0}));

  const auto* cloud = std::get_if<MollifiedPointCloud>(&target);
  const double delta = options.tail.stopping_delta;
  if (cloud && delta > 0.0) {
    if ((c.array() != 1.0).any()) {
      throw std::invalid_argument("stopped point-cloud constants require C = I");
    }
    const double u = -std::expm1(-delta);
    const double rr = cloud->diameter;
    r.stopping_delta = delta;
    r.support_diameter = rr;
    r.K = closed(1.0);
    r.L0 = closed(3.0 * rr * rr / (u * u));
    r.L1 = closed(rr / u);
    r.L2 = closed(1.0 / u);
    r.K2 = closed(bounded_support_constant(rr, delta));
  } else {
    const HFunction h = tail_decomposition(target, space, options.tail);
    r.box_lower = h.grid().lower();
    r.box_upper = h.grid().upper();
    const double kk = std::max(1.0, a.cwiseQuotient(c).maxCoeff());
    r.K = closed(kk);
    const ConstantEntry g = measured(h.sup_sqrtc_grad());
    const ConstantEntry hh = measured(h.sup_c_hess());
    r.L0 = derived(kk * kk * (hh.value + g.value * g.value), {g, hh});
    r.L1 = derived(kk * std::sqrt(space.norm_c()) * g.value, {g});
    double l2 = 0.0;
    for (int i = 0; i < space.dim(); ++i) {
      l2 = std::max({l2, std::abs(1.0 - c[i] / a[i]), std::abs(a[i] / c[i] - 1.0)});
    }
    r.L2 = closed(l2);
    if (cloud) r.support_diameter = cloud->diameter;
  }
  r.K1 = derived(theorem_constant(r.L0.value + r.L2.value), {r.L0, r.L2});

  if (options.b_sum) {
    r.B_sum = measured(*options.b_sum);
    r.K1_relaxed = derived(relaxed_constant(r.L0.value, r.L2.value, *options.b_sum),
                           {r.L0, r.L2, r.B_sum});
  }

  if (const auto* post = std::get_if<LinearGaussianPosterior>(&target)) {
    // Linear G: grad G = G, hess G = 0; |G|_inf over the probe box is
    // attained at a corner.
    Vec lower, upper;
    default_probe_box(law0, lower, upper);
    if (options.tail.lower) lower = *options.tail.lower;
    if (options.tail.upper) upper = *options.tail.upper;
    const int d = post->dim();
    double g_inf = 0.0;
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vec corner(d);
      for (int j = 0; j < d; ++j) corner[j] = (mask >> j & 1) ? upper[j] : lower[j];
      g_inf = std::max(g_inf, (post->G * corner).norm());
    }
    const double grad_g = operator_norm(post->G);
    const double hess_g = 0.0;
    const double inv_sigma = post->noise.cwiseInverse().maxCoeff();
    const double yy = post->y.norm();
    const double reach = g_inf + yy;
    const double k3 = space.norm_c() * inv_sigma *
                      ((hess_g * reach + grad_g * grad_g) +
                       inv_sigma * grad_g * grad_g * reach * reach);
    r.k3 = measured(k3);
    r.K3 = measured(theorem_constant(k3));
  }
  return r;
}

double measure_b_sum(const ModifiedScore& ms, const Schedule& schedule,
                     const ProbeGrid& grid) {
  std::vector<double> times(schedule.steps());
  for (int k = 0; k < schedule.steps(); ++k) times[k] = schedule.score_time(k);
  const auto profile = lipschitz_profile(ms, times, grid);
  CompensatedSum acc;
  for (int k = 0; k < schedule.steps(); ++k) {
    acc.add(schedule.step_size(k) * profile[k].sup_jacobian);
  }
  return acc.value();
}

double small_step_cap(const ConstantsReport& report, BoundVariant variant) {
  double l = report.L0.value + report.L2.value;
  if (variant == BoundVariant::kBayesian) {
    if (!report.k3.available()) throw std::invalid_argument("k3 not available");
    l = report.k3.value;
  }
  if (!(l > 0.0)) return 1.0;
  return std::min(1.0, 1.0 / (l * kE));
}

BoundEvaluation theorem2_bound(const ConstantsReport& report,
                               const BoundInputs& in, BoundVariant variant,
                               bool enforce_step) {
  if (!(in.horizon > 0.0) || !(in.tau > 0.0) || !(in.eps >= 0.0)) {
    throw std::invalid_argument("bound needs T > 0, tau > 0, eps >= 0");
  }
  BoundEvaluation out;
  out.tau_cap = small_step_cap(report, variant);
  out.tau_hypothesis_met = in.tau <= out.tau_cap;
  if (enforce_step && !out.tau_hypothesis_met) {
    throw std::domain_error("step size violates the small-step hypothesis");
  }
  const double gauss = in.m2 + in.trace_c;
  const double eps_term = in.eps * in.eps * in.horizon;
  switch (variant) {
    case BoundVariant::kStandard:
      out.constant = report.K1.value;
      out.value = out.constant * (std::exp(-2.0 * in.horizon) * gauss + eps_term +
                                  in.trace_c * in.tau * in.tau);
      break;
    case BoundVariant::kEarlyStopping:
      out.constant = report.K1.value;
      out.value = out.constant *
                  (std::exp(-2.0 * in.horizon + in.delta) * gauss + eps_term +
                   in.trace_c * in.tau * in.tau);
      break;
    case BoundVariant::kBayesian:
      if (!report.K3.available()) throw std::invalid_argument("K3 not available");
      out.constant = report.K3.value;
      out.value = out.constant * (std::exp(-2.0 * in.horizon) * gauss + eps_term +
                                  in.trace_c * in.tau * in.tau);
      break;
    case BoundVariant::kBoundedSupport: {
      if (in.dim < 1) throw std::invalid_argument("bounded-support bound needs d");
      if (!(in.delta > 0.0 && in.delta <= 1.0)) {
        throw std::invalid_argument("bounded-support bound needs 0 < delta <= 1");
      }
      out.constant = bounded_support_constant(in.diameter, in.delta);
      out.value = out.constant *
                  (std::exp(-2.0 * in.horizon + in.delta) *
                       (in.diameter * in.diameter + in.dim) +
                   eps_term + in.dim * in.tau * in.tau);
      break;
    }
    case BoundVariant::kRelaxed:
      if (!report.K1_relaxed.available()) {
        throw std::invalid_argument("relaxed constant needs a measured B sum");
      }
      out.constant = report.K1_relaxed.value;
      out.value = out.constant * (std::exp(-2.0 * in.horizon) * gauss + eps_term +
                                  in.trace_c * in.tau * in.tau);
      break;
  }
  return out;
}

EmpiricalCoefficients fit_empirical_coefficients(
    const std::vector<SweepObservation>& obs) {
  if (obs.size() < 3) throw std::invalid_argument("need >= 3 observations");
  const int n = static_cast<int>(obs.size());
  Mat design(n, 3);
  Vec rhs(n);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = std::exp(-2.0 * obs[i].horizon);
    design(i, 1) = obs[i].eps * obs[i].eps * obs[i].horizon;
    design(i, 2) = obs[i].tau * obs[i].tau;
    rhs[i] = obs[i].w2_squared;
  }
  // Exhaustive active-set search; three unknowns make this exact NNLS.
  double best = std::numeric_limits<double>::infinity();
  Vec best_x = Vec::Zero(3);
  for (int mask = 1; mask < 8; ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < 3; ++j) if (mask >> j & 1) cols.push_back(j);
    Mat sub(n, static_cast<int>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) sub.col(j) = design.col(cols[j]);
    const Vec x = sub.colPivHouseholderQr().solve(rhs);
    if ((x.array() < 0.0).any()) continue;
    const double res = (sub * x - rhs).squaredNorm();
    if (res < best) {
      best = res;
      best_x.setZero();
      for (std::size_t j = 0; j < cols.size(); ++j) best_x[cols[j]] = x[j];
    }
  }
  return {best_x[0], best_x[1], best_x[2]};
}

ComplexityPlan plan_complexity(const ConstantsReport& report, double m2,
                               double trace_c, double eps0,
                               const PlanOptions& options) {
  if (!(eps0 > 0.0)) throw std::invalid_argument("eps0 must be > 0");
  const auto& split = options.budget_split;
  if (std::abs(split[0] + split[1] + split[2] - 1.0) > 1e-12 ||
      split[0] <= 0.0 || split[1] <= 0.0 || split[2] <= 0.0) {
    throw std::invalid_argument("budget split must be positive and sum to 1");
  }
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  ComplexityPlan plan;
  plan.mode = options.mode;
  plan.eps0 = eps0;
  plan.budget_split = split;
  plan.constants_label = options.empirical ? "empirical" : "theorem";

  // Logs of the coefficients of e^{-2T}, eps^2 T and tau^2 in the budgeted
  // bound; -inf drops a term.
  double log_t = kNone, log_eps = kNone, log_tau = kNone;
  double log_cap = 0.0;
  double eps_bound = eps0;
  auto safe_log = [](double v) {
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
  };
  if (options.mode == PlanMode::kStandard) {
    if (options.empirical) {
      log_t = safe_log(options.empirical->c_T);
      log_eps = safe_log(options.empirical->c_eps);
      log_tau = safe_log(options.empirical->c_tau);
      plan.constant = plan.log_constant = std::numeric_limits<double>::quiet_NaN();
    } else {
      if (!report.K1.available()) throw std::invalid_argument("plan needs K1");
      plan.log_constant = log_theorem_constant(report.L0.value + report.L2.value);
      plan.constant = std::exp(plan.log_constant);
      log_t = plan.log_constant + safe_log(m2 + trace_c);
      log_eps = plan.log_constant;
      log_tau = plan.log_constant + safe_log(trace_c);
      log_cap = std::log(small_step_cap(report, BoundVariant::kStandard));
    }
  } else {
    if (options.dim < 1) throw std::invalid_argument("bounded-support plan needs d");
    if (options.mode == PlanMode::kBoundedSupportDelta) {
      plan.delta = options.delta;
    } else {
      if (!report.M0.available()) throw std::invalid_argument("plan needs M0");
      plan.delta = eps0 * eps0 / (16.0 * report.M0.value);
      eps_bound = 0.5 * eps0;
    }
    if (!(plan.delta > 0.0 && plan.delta <= 1.0)) {
      throw std::invalid_argument("bounded-support plan needs 0 < delta <= 1");
    }
    const double rr = options.diameter;
    const double u = -std::expm1(-plan.delta);
    plan.log_constant = log_bounded_support_constant(rr, plan.delta);
    plan.constant = std::exp(plan.log_constant);
    log_t = plan.log_constant + std::log(rr * rr + options.dim) + plan.delta;
    log_eps = plan.log_constant;
    log_tau = plan.log_constant + std::log(static_cast<double>(options.dim));
    log_cap = std::min(0.0, -1.0 - std::log(3.0 * rr * rr / (u * u) + 1.0 / u));
  }
  const double log_target = 2.0 * std::log(eps_bound);
  plan.target_squared = eps_bound * eps_bound;

  // T: coef_t e^{-2T} <= split0 target.
  if (log_t > kNone) plan.horizon = 0.5 * (log_t - std::log(split[0]) - log_target);
  plan.horizon = std::max(plan.horizon, plan.delta);

  double lt = log_cap;
  if (log_tau > kNone) lt = 0.5 * (std::log(split[1]) + log_target - log_tau);
  plan.tau_capped = lt > log_cap;
  plan.log_tau = std::min(lt, log_cap);
  plan.tau = std::exp(plan.log_tau);
  if (!(plan.horizon - plan.delta > 0.0)) plan.horizon = plan.delta + plan.tau;

  plan.eps_budget =
      log_eps > kNone
          ? std::exp(0.5 * (std::log(split[2]) + log_target - log_eps -
                            std::log(plan.horizon)))
          : std::numeric_limits<double>::infinity();

  plan.log_N = std::log(plan.horizon - plan.delta) - plan.log_tau;
  const double n_real = std::ceil(std::exp(plan.log_N) * (1.0 - 1e-15));
  plan.feasible = std::isfinite(n_real) && n_real <= options.max_steps;
  plan.N = plan.feasible ? static_cast<std::int64_t>(std::max(1.0, n_real)) : -1;

  auto term = [](double log_coef, double log_rest) {
    return log_coef > -std::numeric_limits<double>::infinity()
               ? std::exp(log_coef + log_rest)
               : 0.0;
  };
  plan.bound_value = term(log_t, -2.0 * plan.horizon) +
                     term(log_tau, 2.0 * plan.log_tau) +
                     (std::isfinite(plan.eps_budget)
                          ? term(log_eps, 2.0 * std::log(plan.eps_budget) +
                                              std::log(plan.horizon))
                          : 0.0);
  if (!plan.feasible && options.throw_if_infeasible) {
    throw std::runtime_error("plan infeasible: step count exceeds the maximum");
  }
  return plan;
}

CsvTable constants_to_csv(const ConstantsReport& report) {
  CsvTable table({"constant", "value", "provenance"});
  for (const auto& [name, entry] : report.entries()) {
    table.add_row({name, format_real(entry->value), to_string(entry->provenance)});
  }
  return table;
}

CsvTable plan_to_csv(const ComplexityPlan& plan) {
  CsvTable table({"mode", "constants", "eps0", "T", "N", "log_N", "tau", "log_tau", "delta",
                  "eps_budget", "split_T", "split_tau", "split_eps", "constant", "log_constant",
                  "bound_value", "target_squared", "tau_capped", "feasible"});
  table.add_row({to_string(plan.mode), plan.constants_label, format_real(plan.eps0),
                 format_real(plan.horizon), std::to_string(plan.N),
                 format_real(plan.log_N), format_real(plan.tau),
                 format_real(plan.log_tau), format_real(plan.delta), format_real(plan.eps_budget),
                 format_real(plan.budget_split[0]), format_real(plan.budget_split[1]),
                 format_real(plan.budget_split[2]), format_real(plan.constant),
                 format_real(plan.log_constant),
                 format_real(plan.bound_value), format_real(plan.target_squared),
                 plan.tau_capped ? "1" : "0", plan.feasible ? "1" : "0"});
  return table;
}

std::string constants_text(const ConstantsReport& report) {
  std::ostringstream out;
  out << "Constant     | Value          | Provenance\n";
  out << "-------------+----------------+--------------\n";
  for (const auto& [name, entry] : report.entries()) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-12s | %-14s | %s\n", name.c_str(),
                  entry->available() ? short_real(entry->value).c_str() : "-",
                  to_string(entry->provenance).c_str());
    out << line;
  }
  if (report.box_lower.size() > 0) {
    out << "probe box:";
    for (Eigen::Index i = 0; i < report.box_lower.size(); ++i) {
      out << " [" << short_real(report.box_lower[i]) << ", "
          << short_real(report.box_upper[i]) << "]";
    }
    out << '\n';
  }
  return out.str();
}

std::string plan_text(const ComplexityPlan& plan) {
  std::ostringstream out;
  out << "mode        " << to_string(plan.mode) << " (" << plan.constants_label
      << " constants)\n";
  out << "eps0        " << short_real(plan.eps0) << '\n';
  out << "T           " << short_real(plan.horizon) << '\n';
  out << "tau         " << short_real(plan.tau) << (plan.tau_capped ? " (capped)" : "")
      << '\n';
  out << "log tau     " << short_real(plan.log_tau) << '\n';
  out << "delta       " << short_real(plan.delta) << '\n';
  out << "log K       " << short_real(plan.log_constant) << '\n';
  out << "eps budget  " << short_real(plan.eps_budget) << '\n';
  out << "N           " << (plan.feasible ? std::to_string(plan.N) : "infeasible")
      << "  (log N = " << short_real(plan.log_N) << ")\n";
  out << "bound       " << short_real(plan.bound_value) << " <= "
      << short_real(plan.target_squared) << '\n';
  return out.str();
}

}  // namespace heatscore
