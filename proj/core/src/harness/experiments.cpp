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

#include "heatscore/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "heatscore/harness/manifest.hpp"
#include "heatscore/parallel.hpp"

namespace heatscore::harness {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string clean(std::string msg) {
  for (char& ch : msg) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ' ';
  }
  return msg;
}

std::string note(const std::string& key, double value) {
  return key + "=" + format_real(value) + ";";
}

int steps_for(double horizon, double delta, double tau) {
  const double n = std::ceil((horizon - delta) / tau - 1e-9);
  if (!(n >= 1.0) || n > 1e8) throw std::invalid_argument("step count out of range");
  return static_cast<int>(n);
}

// The target of one experiment, with constants evaluated once.
struct Context {
  TargetConfig target;
  MarginalLaw law0;
  // Law the sampler aims at: P_delta when early stopping.
  MarginalLaw aim;
  double m2 = 0.0;
  std::optional<ConstantsReport> report;
  std::string report_error;
};

Context make_context(TargetConfig target, double delta) {
  MarginalLaw law0 = law_at_zero(target.target, target.space);
  MarginalLaw aim = delta > 0.0 ? evolve(law0, target.space, delta) : law0;
  Context ctx{std::move(target), law0, aim, 0.0, std::nullopt, ""};
  ctx.m2 = second_moment(ctx.law0);
  try {
    ConstantsOptions opts;
    opts.tail.stopping_delta = delta > 0.0 && std::holds_alternative<MollifiedPointCloud>(
                                                  ctx.target.target)
                                   ? delta
                                   : 0.0;
    ctx.report = constants(ctx.target.target, ctx.target.space, opts);
  } catch (const std::exception& e) {
    ctx.report_error = clean(e.what());
  }
  return ctx;
}

BoundVariant variant_for(const Context& ctx, double delta) {
  if (std::holds_alternative<LinearGaussianPosterior>(ctx.target.target)) {
    return BoundVariant::kBayesian;
  }
  if (delta > 0.0) {
    return std::holds_alternative<MollifiedPointCloud>(ctx.target.target)
               ? BoundVariant::kBoundedSupport
               : BoundVariant::kEarlyStopping;
  }
  return BoundVariant::kStandard;
}

void attach_bound(const Context& ctx, ExperimentRow& row, double delta,
                  std::optional<double> b_sum) {
  if (!ctx.report) {
    row.notes += "bound=" + ctx.report_error + ";";
    return;
  }
  ConstantsReport report = *ctx.report;
  BoundVariant variant = variant_for(ctx, delta);
  if (b_sum && variant == BoundVariant::kStandard) {
    report.B_sum = {*b_sum, Provenance::kMeasuredGrid};
    report.K1_relaxed = {relaxed_constant(report.L0.value, report.L2.value, *b_sum),
                         Provenance::kMeasuredGrid};
    variant = BoundVariant::kRelaxed;
  }
  BoundInputs in;
  in.m2 = ctx.m2;
  in.trace_c = ctx.target.space.trace_c();
  in.horizon = row.horizon;
  in.tau = row.tau;
  in.eps = row.eps;
  in.delta = delta;
  in.diameter = report.support_diameter;
  in.dim = ctx.target.space.dim();
  const BoundEvaluation ev = theorem2_bound(report, in, variant, false);
  row.bound = ev.value;
  row.margin = ev.value - row.w2.value * row.w2.value;
  row.tau_hypothesis_met = ev.tau_hypothesis_met;
  row.notes += "variant=" + to_string(variant) + ";";
  if (row.margin < 0.0) row.status = "violation";
}

ScoreModel exact_score(const Context& ctx, double delta) {
  return ScoreModel::exact_law(ctx.law0, ctx.target.space, delta);
}

// One (T, tau, eps) point for the target in `ctx`.
ExperimentRow evaluate_point(const Context& ctx, const std::string& label,
                             double horizon, double tau, double eps, double delta,
                             double omega, int n_paths, int n_proj,
                             const RngStream& rng) {
  const auto t0 = Clock::now();
  ExperimentRow row;
  row.point = label;
  row.horizon = horizon;
  row.eps = eps;
  row.dim = ctx.target.space.dim();
  row.n_paths = n_paths;
  try {
    const Schedule schedule =
        Schedule::uniform(horizon, delta, steps_for(horizon, delta, tau));
    row.tau = schedule.tau();
    const ModelSpace& space = ctx.target.space;
    const auto gaussian = as_diagonal_gaussian(ctx.law0);
    std::optional<double> b_sum;
    if (gaussian && delta == 0.0 && eps == 0.0) {
      row.w2 = channel_w2(*gaussian, space, schedule);
      row.n_paths = 0;
    } else if (gaussian && delta == 0.0) {
      CoupledOptions opts;
      opts.omega = omega;
      opts.threads = 1;
      const CoupledResult res =
          coupled_perturbation_w2(*gaussian, space, schedule, eps, n_paths, rng, opts);
      row.w2 = res.w2;
      row.notes += note("amplitude", res.amplitude);
      if (res.failures > 0) row.status = "partial";
      if (space.dim() <= 2) {
        const ScoreModel exact = exact_score(ctx, 0.0);
        const ModifiedScore ms(ScoreModel::sinusoidal(exact, eps, res.amplitude, omega));
        Vec lower, upper;
        default_probe_box(ctx.law0, lower, upper);
        b_sum = measure_b_sum(ms, schedule, ProbeGrid::standard(lower, upper));
        row.notes += note("b_sum", *b_sum);
      }
    } else {
      ScoreModel score = exact_score(ctx, delta);
      if (eps > 0.0) {
        const double unit =
            calibrate_sinusoid(score, schedule, omega, 2000, rng.substream(2));
        score = ScoreModel::sinusoidal(score, eps, eps / unit, omega);
      }
      const SamplerRun run(schedule, score, n_paths, rng.substream(0));
      const RunResult out = run_paths(run, 1);
      if (out.partial()) row.status = "partial";
      if (out.final_samples().count() < 2) throw std::runtime_error("all paths failed");
      if (const auto* dense = std::get_if<DenseGaussian>(&ctx.aim)) {
        const SampleSet& s = out.final_samples();
        row.w2 = w2_bures_dense(sample_mean(s), sample_covariance(s), dense->mean,
                                dense->cov);
        row.w2.n_used = s.count();
      } else {
        row.w2 = sample_w2(out.final_samples(), ctx.aim, rng.substream(1), n_proj);
      }
      row.w2.seed = rng.seed;
    }
    attach_bound(ctx, row, delta, b_sum);
  } catch (const std::exception& e) {
    row.status = "failed: " + clean(e.what());
  }
  row.seconds = seconds_since(t0);
  return row;
}

Context dim_context(const ExperimentSpec& spec, int d) {
  Config cfg = spec.target;
  if (spec.tag == ExperimentTag::kTraceFixedDimSweep) {
    cfg.set("c_profile", "inverse_square");
    cfg.set("c_trace", cfg.get_or("c_trace", "1"));
    cfg.set("family", "symmetric_product");
  }
  const std::string family = cfg.get_or("family", "symmetric_product");
  if (family != "symmetric_product") {
    throw std::invalid_argument("dimension sweeps rebuild symmetric_product targets");
  }
  const Vec c = spectrum_from_config(cfg, d);
  TargetConfig tc{family, symmetric_product(c, cfg.real_or("separation", 1.0)),
                  ModelSpace(c), 0.0};
  return make_context(std::move(tc), spec.delta);
}

ExperimentRow kl_point(const ExperimentSpec& spec, int d, const RngStream& rng) {
  const auto t0 = Clock::now();
  ExperimentRow row;
  row.point = "d=" + std::to_string(d);
  row.dim = d;
  try {
    const Vec c = spectrum_from_config(spec.target, d);
    const double sep = spec.target.real_or("separation", 1.0);
    const ModelSpace space(c);
    const ProductMixture p0 = symmetric_product(c, sep);
    const double kl = kl_quadrature(p0, space);
    const double kl1 = kl_quadrature(symmetric_product(Vec::Ones(1), sep),
                                     ModelSpace(Vec::Ones(1)));
    const int n = std::min(spec.n_paths, kAssignmentCap);
    row.n_paths = n;
    const SampleSet a = sample(MarginalLaw(p0), n, rng.substream(0));
    const SampleSet b = gaussian_sample(GaussianMeasure(Vec::Zero(d), c), n,
                                        rng.substream(1));
    row.w2 = w2_assignment(a, b);
    row.w2.seed = rng.seed;
    row.bound = 2.0 * space.trace_c();
    row.margin = row.bound - row.w2.value * row.w2.value;
    row.notes = note("kl", kl) + note("kl_per_dim_times_d", d * kl1) +
                note("trace_c", space.trace_c());
    if (std::sqrt(row.bound) + 3.0 * row.w2.stderr_value < row.w2.value) {
      row.status = "violation";
    }
  } catch (const std::exception& e) {
    row.status = "failed: " + clean(e.what());
  }
  row.seconds = seconds_since(t0);
  return row;
}

std::vector<ExperimentRow> run_rows(const ExperimentSpec& spec, int threads,
                                    std::vector<std::string>& warnings) {
  const RngStream root{spec.seed, 0};
  struct Job {
    std::string label;
    double horizon, tau, eps;
    int dim;
  };
  std::vector<Job> jobs;
  auto add = [&](const std::string& tag, double h, double t, double e) {
    jobs.push_back({tag, h, t, e, 0});
  };
  switch (spec.tag) {
    case ExperimentTag::kTauSweep:
      for (double v : spec.grid) add("tau=" + format_real(v), spec.horizon, v, spec.eps);
      break;
    case ExperimentTag::kTSweep:
      for (double v : spec.grid) add("T=" + format_real(v), v, spec.tau, spec.eps);
      break;
    case ExperimentTag::kEpsSweep:
      for (double v : spec.grid) add("eps=" + format_real(v), spec.horizon, spec.tau, v);
      break;
    case ExperimentTag::kBayesDemo:
      for (double v : spec.grid) add("tau=" + format_real(v), spec.horizon, v, spec.eps);
      break;
    case ExperimentTag::kBoundAudit:
      for (double v : spec.tau_grid) add("tau=" + format_real(v), spec.horizon, v, 0.0);
      for (double v : spec.horizon_grid) add("T=" + format_real(v), v, spec.tau, 0.0);
      for (double v : spec.eps_grid) add("eps=" + format_real(v), spec.horizon, spec.tau, v);
      break;
    case ExperimentTag::kDimSweep:
    case ExperimentTag::kTraceFixedDimSweep:
    case ExperimentTag::kKlVsW2:
      for (double v : spec.grid) {
        if (v < 1 || v != std::floor(v)) throw std::invalid_argument("dimension grid must hold positive integers");
        jobs.push_back({"d=" + format_real(v), spec.horizon, spec.tau, spec.eps,
                        static_cast<int>(v)});
      }
      break;
  }
  if (jobs.empty()) throw std::invalid_argument("experiment grid is empty");

  std::optional<Context> shared;
  const bool per_dim = jobs.front().dim > 0;
  if (!per_dim) {
    shared = make_context(load_target(spec.target), spec.delta);
    if (!shared->report) warnings.push_back("constants unavailable: " + shared->report_error);
  }

  std::vector<ExperimentRow> rows(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), [&](int i) {
    const Job& job = jobs[i];
    const RngStream rng = root.substream(static_cast<std::uint64_t>(i));
    if (spec.tag == ExperimentTag::kKlVsW2) {
      rows[i] = kl_point(spec, job.dim, rng);
      return;
    }
    if (per_dim) {
      try {
        const Context ctx = dim_context(spec, job.dim);
        rows[i] = evaluate_point(ctx, job.label, job.horizon, job.tau, job.eps,
                                 spec.delta, spec.omega, spec.n_paths, spec.n_proj, rng);
      } catch (const std::exception& e) {
        rows[i].point = job.label;
        rows[i].dim = job.dim;
        rows[i].status = "failed: " + clean(e.what());
      }
      return;
    }
    rows[i] = evaluate_point(*shared, job.label, job.horizon, job.tau, job.eps,
                             spec.delta, spec.omega, spec.n_paths, spec.n_proj, rng);
  }, threads);
  return rows;
}

bool usable(const ExperimentRow& row) {
  return (row.status == "ok" || row.status == "violation") && row.w2.value > 0.0;
}

void summarize(ExperimentResult& result) {
  const auto& spec = result.spec;
  std::vector<double> x, y, se;
  for (const auto& row : result.rows) {
    if (!usable(row)) continue;
    double xv = 0.0;
    switch (spec.tag) {
      case ExperimentTag::kTauSweep: xv = row.tau; break;
      case ExperimentTag::kTSweep: xv = row.horizon; break;
      case ExperimentTag::kEpsSweep: xv = row.eps; break;
      default: xv = row.dim; break;
    }
    x.push_back(xv);
    y.push_back(row.w2.value);
    se.push_back(row.w2.stderr_value);
  }
  const bool all_zero_se = std::all_of(se.begin(), se.end(), [](double v) { return v == 0.0; });
  if (all_zero_se) se.clear();
  auto add_fit = [&](const std::string& name, const LineFit& f) {
    result.summary.push_back({name, f.slope, f.ci_low, f.ci_high});
  };
  try {
    switch (spec.tag) {
      case ExperimentTag::kTauSweep:
        if (x.size() >= 2) add_fit("tau_slope", fit_loglog(x, y, se));
        break;
      case ExperimentTag::kEpsSweep:
        if (x.size() >= 2) add_fit("eps_slope", fit_loglog(x, y, se));
        break;
      case ExperimentTag::kTSweep:
        if (x.size() >= 2) add_fit("T_rate", fit_semilog(x, y, se));
        break;
      case ExperimentTag::kDimSweep:
      case ExperimentTag::kTraceFixedDimSweep:
        if (!y.empty()) {
          const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
          result.summary.push_back({"max_min_ratio", *hi / *lo, *lo, *hi});
        }
        break;
      default:
        break;
    }
  } catch (const std::exception& e) {
    result.warnings.push_back(std::string("fit failed: ") + e.what());
  }
  if (x.size() < result.rows.size()) {
    result.warnings.push_back("summary excludes rows that did not run");
  }
}

std::string optional_flag(const std::optional<bool>& v) {
  if (!v) return "";
  return *v ? "1" : "0";
}

std::string real_or_blank(double v) { return std::isnan(v) ? "" : format_real(v); }

}  // namespace

W2Estimate channel_w2(const GaussianMeasure& law0, const ModelSpace& space,
                      const Schedule& schedule, const ChannelMutation& mutation) {
  const GaussianChannel ch = build_channel(schedule, law0, space, mutation);
  const GaussianMeasure out =
      ch.push_all(GaussianMeasure(Vec::Zero(space.dim()), space.c()));
  return w2_bures(out, law0);
}

CoupledResult coupled_perturbation_w2(const GaussianMeasure& law0,
                                      const ModelSpace& space,
                                      const Schedule& schedule, double eps,
                                      int n_paths, const RngStream& rng,
                                      const CoupledOptions& options) {
  if (!(eps > 0.0)) throw std::invalid_argument("coupled estimator needs eps > 0");
  const ScoreModel exact = ScoreModel::exact_law(MarginalLaw(GaussianMixture::single(
                                                     law0.mean, law0.var)),
                                                 space);
  CoupledResult res;
  const double unit = calibrate_sinusoid(exact, schedule, options.omega,
                                         options.calibration_samples, rng.substream(2));
  res.amplitude = eps / unit;
  const ScoreModel perturbed =
      ScoreModel::sinusoidal(exact, eps, res.amplitude, options.omega);
  res.measured_rms = rms_deviation(perturbed, exact, schedule,
                                   options.calibration_samples, rng.substream(3));

  const SamplerRun run_exact(schedule, exact, n_paths, rng.substream(0));
  const SamplerRun run_pert(schedule, perturbed, n_paths, rng.substream(0));
  const RunResult ye = run_paths(run_exact, options.threads);
  const RunResult yp = run_paths(run_pert, options.threads);
  res.failures = ye.failures.size() + yp.failures.size();
  if (res.failures > 0) {
    throw std::runtime_error("coupled estimator: sampler paths failed");
  }
  const GaussianMeasure out = exact_channel(run_exact);
  const SampleSet& e = ye.final_samples();
  const SampleSet& p = yp.final_samples();
  double total = 0.0, var_sq = 0.0;
  for (int j = 0; j < space.dim(); ++j) {
    const double gain = std::sqrt(law0.var[j] / out.var[j]);
    std::vector<double> mapped(e.count()), pert(p.count());
    for (int i = 0; i < e.count(); ++i) {
      mapped[i] = law0.mean[j] + gain * (e.draws(i, j) - out.mean[j]);
      pert[i] = p.draws(i, j);
    }
    const W2Estimate w = w2_sorted_1d(std::move(pert), std::move(mapped));
    total += w.value * w.value;
    const double se_sq = 2.0 * w.value * w.stderr_value;
    var_sq += se_sq * se_sq;
  }
  res.w2.method = W2Method::kSorted;
  res.w2.value = std::sqrt(total);
  res.w2.stderr_value = res.w2.value > 0.0 ? std::sqrt(var_sq) / (2.0 * res.w2.value) : 0.0;
  res.w2.n_used = n_paths;
  res.w2.seed = rng.seed;
  return res;
}

W2Estimate sample_w2(const SampleSet& output, const MarginalLaw& law,
                     const RngStream& rng, int n_proj) {
  const SampleSet ref = sample(law, output.count(), rng.substream(0));
  if (output.dim() == 1) {
    std::vector<double> a(output.draws.data(), output.draws.data() + output.count());
    std::vector<double> b(ref.draws.data(), ref.draws.data() + ref.count());
    W2Estimate w = w2_sorted_1d(std::move(a), std::move(b));
    w.seed = rng.seed;
    return w;
  }
  SlicedOptions opts;
  opts.n_proj = n_proj;
  opts.dimension_normalized = true;
  return w2_sliced(output, ref, rng.substream(1), opts);
}

std::string to_string(ExperimentTag tag) {
  switch (tag) {
    case ExperimentTag::kTauSweep: return "tau_sweep";
    case ExperimentTag::kTSweep: return "T_sweep";
    case ExperimentTag::kEpsSweep: return "eps_sweep";
    case ExperimentTag::kDimSweep: return "dim_sweep";
    case ExperimentTag::kTraceFixedDimSweep: return "trace_fixed_dim_sweep";
    case ExperimentTag::kBoundAudit: return "bound_audit";
    case ExperimentTag::kBayesDemo: return "bayes_demo";
    case ExperimentTag::kKlVsW2: return "kl_vs_w2";
  }
  return "tau_sweep";
}

ExperimentTag parse_experiment_tag(const std::string& text) {
  for (int i = 0; i <= static_cast<int>(ExperimentTag::kKlVsW2); ++i) {
    const auto tag = static_cast<ExperimentTag>(i);
    if (to_string(tag) == text) return tag;
  }
  throw std::invalid_argument("unknown experiment " + text);
}

ExperimentSpec experiment_from_config(const Config& config, const std::string& base_dir) {
  ExperimentSpec spec;
  spec.tag = parse_experiment_tag(config.get("experiment"));
  spec.target = config;
  std::string text = config.canonical();
  if (config.has("target_config")) {
    const std::filesystem::path p =
        std::filesystem::path(base_dir) / config.get("target_config");
    const Config target = Config::load(p.string());
    // Experiment keys win over target keys of the same name.
    Config merged = target;
    for (const auto& [k, v] : config.entries()) merged.set(k, v);
    spec.target = merged;
    text = merged.canonical();
  }
  spec.config_text = text;
  spec.config_hash = git_blob_hash(text);
  spec.horizon = config.real_or("T", spec.horizon);
  spec.tau = config.real_or("tau", spec.tau);
  spec.eps = config.real_or("eps", spec.eps);
  spec.delta = config.real_or("delta", spec.target.real_or("stopping_delta", 0.0));
  spec.omega = config.real_or("omega", spec.omega);
  spec.n_paths = config.integer_or("n_paths", spec.n_paths);
  spec.n_proj = config.integer_or("n_proj", spec.n_proj);
  spec.seed = config.u64_or("seed", spec.seed);
  if (spec.tag == ExperimentTag::kBoundAudit) {
    spec.tau_grid = config.reals_or("tau_grid", {});
    spec.horizon_grid = config.reals_or("T_grid", {});
    spec.eps_grid = config.reals_or("eps_grid", {});
    if (spec.tau_grid.empty() && spec.horizon_grid.empty() && spec.eps_grid.empty()) {
      throw std::invalid_argument("bound_audit needs tau_grid, T_grid or eps_grid");
    }
  } else if (spec.tag == ExperimentTag::kBayesDemo) {
    spec.grid = config.reals_or("grid", {spec.tau});
  } else {
    spec.grid = config.reals("grid");
  }
  if (spec.n_paths < 2) throw std::invalid_argument("n_paths must be >= 2");
  return spec;
}

bool ExperimentResult::ok() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const ExperimentRow& r) { return r.status == "ok"; });
}

CsvTable ExperimentResult::table() const {
  CsvTable t({"config_hash", "experiment", "point", "T", "tau", "eps", "d", "n_paths",
              "method", "w2", "w2_stderr", "w2_squared", "bound", "margin",
              "tau_hypothesis_met", "status", "notes", "summary", "summary_low",
              "summary_high"});
  const std::string tag = to_string(spec.tag);
  for (const auto& r : rows) {
    const bool ran = r.status == "ok" || r.status == "violation" || r.status == "partial";
    t.add_row({spec.config_hash, tag, r.point, format_real(r.horizon), format_real(r.tau),
               format_real(r.eps), std::to_string(r.dim), std::to_string(r.n_paths),
               ran ? to_string(r.w2.method) : "", ran ? format_real(r.w2.value) : "",
               ran ? format_real(r.w2.stderr_value) : "",
               ran ? format_real(r.w2.value * r.w2.value) : "", real_or_blank(r.bound),
               real_or_blank(r.margin), optional_flag(r.tau_hypothesis_met), r.status,
               r.notes, "", "", ""});
  }
  for (const auto& s : summary) {
    t.add_row({spec.config_hash, tag, s.name, "", "", "", "", "", "", "", "", "", "",
               "", "", "summary", "", format_real(s.value), real_or_blank(s.low),
               real_or_blank(s.high)});
  }
  return t;
}

CsvTable ExperimentResult::timings() const {
  CsvTable t({"config_hash", "point", "seconds"});
  for (const auto& r : rows) {
    t.add_row({spec.config_hash, r.point, format_real(r.seconds)});
  }
  return t;
}

ChartSpec ExperimentResult::chart() const {
  ChartSpec c;
  c.title = to_string(spec.tag);
  c.y_label = "W2";
  c.log_y = true;
  Series s{"measured W2", {}, {}};
  for (const auto& r : rows) {
    if (!usable(r)) continue;
    switch (spec.tag) {
      case ExperimentTag::kTauSweep:
      case ExperimentTag::kBayesDemo:
        s.x.push_back(r.tau);
        c.x_label = "tau";
        c.log_x = true;
        break;
      case ExperimentTag::kTSweep:
        s.x.push_back(r.horizon);
        c.x_label = "T";
        break;
      case ExperimentTag::kEpsSweep:
        s.x.push_back(r.eps);
        c.x_label = "eps";
        c.log_x = true;
        break;
      case ExperimentTag::kBoundAudit:
        s.x.push_back(static_cast<double>(s.x.size()));
        c.x_label = "run";
        break;
      default:
        s.x.push_back(r.dim);
        c.x_label = "d";
        c.log_x = true;
        break;
    }
    s.y.push_back(r.w2.value);
  }
  c.series.push_back(std::move(s));
  return c;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int threads) {
  ExperimentResult result;
  result.spec = spec;
  result.rows = run_rows(spec, threads, result.warnings);
  summarize(result);
  return result;
}

void write_experiment(const ExperimentResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  result.table().write((base / "results.csv").string());
  result.timings().write((base / "timings.csv").string());
  write_chart((base / "chart.svg").string(), result.chart());
  RunManifest m;
  m.command = "sweep";
  m.seed = result.spec.seed;
  m.config_hash = result.spec.config_hash;
  m.config_text = result.spec.config_text;
  m.fields = {{"experiment", to_string(result.spec.tag)},
              {"T", format_real(result.spec.horizon)},
              {"tau", format_real(result.spec.tau)},
              {"eps", format_real(result.spec.eps)},
              {"delta", format_real(result.spec.delta)},
              {"n_paths", std::to_string(result.spec.n_paths)}};
  m.outputs = {"results.csv", "timings.csv", "chart.svg"};
  m.warnings = result.warnings;
  write_manifest((base / "manifest.json").string(), m);
}

}  // namespace heatscore::harness
