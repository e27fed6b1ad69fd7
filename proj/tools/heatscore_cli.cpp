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

// heatscore command line front end.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "heatscore/bounds.hpp"
#include "heatscore/harness/acceptance.hpp"
#include "heatscore/harness/config.hpp"
#include "heatscore/harness/experiments.hpp"
#include "heatscore/harness/manifest.hpp"
#include "heatscore/heat_kernel.hpp"
#include "heatscore/metrics.hpp"
#include "heatscore/parallel.hpp"
#include "heatscore/sampler.hpp"

namespace fs = std::filesystem;
using namespace heatscore;
using namespace heatscore::harness;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int threads = 0;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config, "key = value configuration file");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "root seed (overrides the config)")
      ->each([&c](const std::string&) { c.seed_set = true; });
  app->add_option("--out", c.out, "output directory");
  app->add_option("--threads", c.threads, "worker threads (0 = hardware)")
      ->check(CLI::NonNegativeNumber);
}

Config load_config(const Common& c) {
  Config cfg = Config::load(c.config);
  if (cfg.has("target_config")) {
    // Keys in the referencing file win.
    const fs::path parent = fs::path(c.config).parent_path();
    Config merged = Config::load((parent / cfg.get("target_config")).string());
    for (const auto& [k, v] : cfg.entries()) merged.set(k, v);
    cfg = merged;
  }
  if (c.seed_set) cfg.set("seed", std::to_string(c.seed));
  return cfg;
}

fs::path out_dir(const Common& c, const std::string& fallback) {
  fs::path p = c.out.empty() ? fs::path(fallback) : fs::path(c.out);
  fs::create_directories(p);
  return p;
}

std::string base_dir(const Common& c) {
  const fs::path parent = fs::path(c.config).parent_path();
  return parent.empty() ? "." : parent.string();
}

Schedule schedule_from(const Config& cfg) {
  const double horizon = cfg.real_or("T", 8.0);
  const double delta = cfg.real_or("delta", cfg.real_or("stopping_delta", 0.0));
  int steps = cfg.integer_or("steps", 0);
  if (steps == 0) {
    const double tau = cfg.real_or("tau", 0.01);
    steps = static_cast<int>(std::ceil((horizon - delta) / tau - 1e-9));
  }
  return Schedule::uniform(horizon, delta, steps);
}

int cmd_sample(const Common& common) {
  const Config cfg = load_config(common);
  const TargetConfig tc = load_target(cfg);
  const Schedule schedule = schedule_from(cfg);
  const std::uint64_t seed = cfg.u64_or("seed", 1);
  const RngStream rng{seed, 0};
  ScoreModel score = ScoreModel::exact(tc.target, tc.space, schedule.delta());
  const double eps = cfg.real_or("eps", 0.0);
  if (eps > 0.0) {
    const std::string mode = cfg.get_or("perturbation", "sinusoidal");
    if (mode == "sinusoidal") {
      const double omega = cfg.real_or("omega", 1.0);
      const double unit = calibrate_sinusoid(score, schedule, omega, 2000, rng.substream(2));
      score = ScoreModel::sinusoidal(score, eps, eps / unit, omega);
    } else if (mode == "additive") {
      score = ScoreModel::additive(score, eps, rng.substream(3));
    } else {
      throw std::invalid_argument("perturbation must be sinusoidal or additive");
    }
  }
  std::vector<int> record;
  for (double k : cfg.reals_or("record", {})) record.push_back(static_cast<int>(k));
  SamplerRun run(schedule, score, cfg.integer_or("n_paths", 1000), rng.substream(0), record);
  ConstantsOptions copts;
  copts.tail.stopping_delta = tc.stopping_delta;
  try {
    run.tau_cap = small_step_cap(constants(tc.target, tc.space, copts), BoundVariant::kStandard);
  } catch (const std::exception& e) {
    std::cerr << "warning: constants unavailable: " << e.what() << "\n";
  }
  const RunResult result = run_paths(run, common.threads);
  const fs::path dir = out_dir(common, "sample_out");
  RunManifest m;
  m.command = "sample";
  m.seed = seed;
  m.config_hash = cfg.hash();
  m.config_text = cfg.canonical();
  m.fields = {{"T", format_real(schedule.horizon())},
              {"delta", format_real(schedule.delta())},
              {"steps", std::to_string(schedule.steps())},
              {"tau", format_real(schedule.tau())},
              {"eps", format_real(eps)},
              {"n_paths", std::to_string(run.n_paths)},
              {"failed_paths", std::to_string(result.failures.size())}};
  m.warnings = run.warnings();
  for (std::size_t r = 0; r < result.records.size(); ++r) {
    const int k = result.record_steps[r];
    const std::string name = k == schedule.steps() ? "samples.csv"
                                                   : "record_" + std::to_string(k) + ".csv";
    write_sample_csv((dir / name).string(), result.records[r]);
    m.outputs.push_back(name);
  }
  for (const auto& f : result.failures) {
    m.warnings.push_back("path " + std::to_string(f.path) + " failed at step " +
                         std::to_string(f.step) + ": " + f.message);
  }
  write_manifest((dir / "manifest.json").string(), m);
  for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "wrote " << result.final_samples().count() << " samples to "
            << (dir / "samples.csv").string() << "\n";
  return result.partial() ? 3 : 0;
}

int cmd_verify(const Common& common) {
  const Config cfg = load_config(common);
  const TargetConfig tc = load_target(cfg);
  const fs::path dir = out_dir(common, "verify_out");
  const std::string check = cfg.get_or("check", "all");
  const double tol = cfg.real_or("tolerance", 1e-6);
  TailOptions tail;
  tail.stopping_delta = tc.stopping_delta;
  if (cfg.has("box_lower")) {
    const auto lo = cfg.reals("box_lower"), hi = cfg.reals("box_upper");
    tail.lower = Eigen::Map<const Vec>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    tail.upper = Eigen::Map<const Vec>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  }
  tail.per_axis = cfg.integer_or("per_axis", tail.per_axis);
  bool ok = true;
  auto grid_for = [&](const MarginalLaw& law) {
    Vec lo, hi;
    default_probe_box(law, lo, hi);
    if (tail.lower) lo = *tail.lower;
    if (tail.upper) hi = *tail.upper;
    return lo.size() <= 2 ? ProbeGrid::tensor(lo, hi, tail.per_axis) : ProbeGrid::standard(lo, hi);
  };

  ConstantsOptions copts;
  copts.tail = tail;
  const ConstantsReport report = constants(tc.target, tc.space, copts);
  constants_to_csv(report).write((dir / "constants.csv").string());
  std::ofstream((dir / "constants.txt").string()) << constants_text(report);
  std::cout << constants_text(report);

  if (check == "all" || check == "decay") {
    const ModifiedScore ms(ScoreModel::exact(tc.target, tc.space, tc.stopping_delta));
    const auto times = cfg.reals_or("times", {0.5, 1.0, 2.0, 4.0});
    const ProbeGrid grid = grid_for(law_at_zero(tc.target, tc.space));
    const auto profile = lipschitz_profile(ms, times, grid);
    CsvTable t({"t", "sup_jacobian", "bound_jacobian", "sup_value", "bound_value", "noisy"});
    for (const auto& p : profile) {
      const double bj = report.L0.value * std::exp(-p.t);
      const double bv = report.L1.value * std::exp(-0.5 * p.t);
      ok = ok && p.sup_jacobian <= bj && p.sup_value <= bv;
      t.add_row({format_real(p.t), format_real(p.sup_jacobian), format_real(bj),
                 format_real(p.sup_value), format_real(bv), p.noisy ? "1" : "0"});
    }
    t.write((dir / "decay.csv").string());
  }
  if ((check == "all" || check == "vhj") && tc.space.dim() <= 2 &&
      !std::holds_alternative<MollifiedPointCloud>(tc.target)) {
    const VHJState state(tail_decomposition(tc.target, tc.space, tail),
                         cfg.integer_or("order", 64));
    const auto times = cfg.reals_or("vhj_times", {0.25, 0.5, 1.0, 2.0});
    const BoundCheckReport rep =
        vhj_bound_check(state, times, grid_for(law_at_zero(tc.target, tc.space)));
    rep.to_csv().write((dir / "vhj.csv").string());
    ok = ok && rep.min_margin() >= -tol && rep.gradient_monotone;
    std::cout << "vHJ min margin " << rep.min_margin()
              << (rep.gradient_monotone ? "" : " (gradient sup not monotone)") << "\n";
  }
  if (check == "all" || check == "mh") {
    if (const auto* cloud = std::get_if<MollifiedPointCloud>(&tc.target); cloud && cloud->sigma2 > 0) {
      const BoundCheckReport rep = mh_bound_check(*cloud, grid_for(law_at_zero(tc.target, tc.space)));
      rep.to_csv().write((dir / "mh.csv").string());
      ok = ok && rep.min_margin() >= 0.0;
      std::cout << "mollifier min margin " << rep.min_margin() << "\n";
    }
  }
  RunManifest m;
  m.command = "verify-bounds";
  m.seed = cfg.u64_or("seed", 0);
  m.config_hash = cfg.hash();
  m.config_text = cfg.canonical();
  m.fields = {{"check", check}, {"verdict", ok ? "ok" : "violated"}};
  write_manifest((dir / "manifest.json").string(), m);
  std::cout << (ok ? "all bounds hold" : "bound violated") << "\n";
  return ok ? 0 : 1;
}

int cmd_sweep(const Common& common) {
  const Config cfg = load_config(common);
  const ExperimentSpec spec = experiment_from_config(cfg, base_dir(common));
  const ExperimentResult result = run_experiment(spec, common.threads);
  const fs::path dir = out_dir(common, "sweep_out");
  write_experiment(result, dir.string());
  std::cout << result.table().str();
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  return result.ok() ? 0 : 1;
}

int cmd_plan(const Common& common) {
  const Config cfg = load_config(common);
  const TargetConfig tc = load_target(cfg);
  PlanOptions po;
  const std::string mode = cfg.get_or("mode", "standard");
  if (mode == "standard") {
    po.mode = PlanMode::kStandard;
  } else if (mode == "bounded_support_delta") {
    po.mode = PlanMode::kBoundedSupportDelta;
  } else if (mode == "bounded_support_p0") {
    po.mode = PlanMode::kBoundedSupportP0;
  } else {
    throw std::invalid_argument("unknown plan mode " + mode);
  }
  if (cfg.has("split")) {
    const auto s = cfg.reals("split");
    if (s.size() != 3) throw std::invalid_argument("split needs three shares (T, tau, eps)");
    po.budget_split = {s[0], s[1], s[2]};
  }
  po.dim = tc.space.dim();
  po.delta = cfg.real_or("delta", tc.stopping_delta);
  po.max_steps = cfg.real_or("max_steps", po.max_steps);
  if (const auto* cloud = std::get_if<MollifiedPointCloud>(&tc.target)) po.diameter = cloud->diameter;
  po.diameter = cfg.real_or("diameter", po.diameter);
  if (cfg.has("c_T")) {
    po.empirical = EmpiricalCoefficients{cfg.real("c_T"), cfg.real("c_eps"), cfg.real("c_tau")};
  }
  ConstantsOptions copts;
  copts.tail.stopping_delta =
      std::holds_alternative<MollifiedPointCloud>(tc.target) && tc.stopping_delta == 0.0
          ? (po.delta > 0.0 ? po.delta : 0.1)
          : tc.stopping_delta;
  const ConstantsReport report = constants(tc.target, tc.space, copts);
  const double m2 = second_moment(law_at_zero(tc.target, tc.space));
  const fs::path dir = out_dir(common, "plan_out");
  bool feasible = true;
  std::optional<CsvTable> all;
  for (double eps0 : cfg.reals_or("eps0", {0.1})) {
    const ComplexityPlan plan = plan_complexity(report, m2, tc.space.trace_c(), eps0, po);
    std::cout << plan_text(plan) << "\n";
    feasible = feasible && plan.feasible;
    const CsvTable t = plan_to_csv(plan);
    if (!all) all.emplace(t.columns());
    for (const auto& row : t.rows()) all->add_row(row);
  }
  all->append_column("config_hash", cfg.hash());
  all->write((dir / "plan.csv").string());
  constants_to_csv(report).write((dir / "constants.csv").string());
  return feasible ? 0 : 1;
}

int cmd_w2(const Common& common, const std::string& a, const std::string& b,
           const std::string& method, int n_proj) {
  const SampleSet s1 = read_sample_csv(a);
  const SampleSet s2 = read_sample_csv(b);
  const std::uint64_t seed = common.seed_set ? common.seed : 1;
  W2Estimate est;
  std::string m = method;
  if (m == "auto") m = s1.dim() == 1 ? "sorted" : (s1.count() <= kAssignmentCap ? "assignment" : "sliced");
  if (m == "sorted") {
    if (s1.dim() != 1) throw std::invalid_argument("sorted W2 needs 1-d samples");
    est = w2_sorted_1d(std::vector<double>(s1.draws.data(), s1.draws.data() + s1.count()),
                       std::vector<double>(s2.draws.data(), s2.draws.data() + s2.count()));
  } else if (m == "assignment") {
    est = w2_assignment(s1, s2);
  } else if (m == "sliced") {
    SlicedOptions so;
    so.n_proj = n_proj;
    est = w2_sliced(s1, s2, RngStream{seed, 0}, so);
  } else if (m == "bures") {
    est = w2_bures_dense(sample_mean(s1), sample_covariance(s1), sample_mean(s2),
                         sample_covariance(s2));
  } else {
    throw std::invalid_argument("unknown method " + method);
  }
  est.seed = seed;
  const CsvTable t = estimates_to_csv({est});
  std::cout << t.str();
  if (!common.out.empty()) {
    fs::create_directories(common.out);
    t.write((fs::path(common.out) / "w2.csv").string());
  }
  return 0;
}

int cmd_accept(const Common& common, const std::vector<int>& only, int mutate, double inject,
               bool no_limits) {
  AcceptanceOptions opts;
  opts.only = only;
  opts.threads = common.threads;
  if (common.seed_set) opts.seed = common.seed;
  opts.mutation.drift_alpha_shift = mutate;
  opts.inject_eps = inject;
  opts.enforce_runtime = !no_limits;
  opts.out_dir = common.out;
  const AcceptanceReport report = run_acceptance(opts);
  int passed = 0;
  for (const auto& r : report.results) {
    std::cout << format_line(r) << "\n";
    passed += r.passed;
  }
  std::cout << passed << "/" << report.results.size() << " criteria passed\n";
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heatscore: score-based diffusion sampler with Wasserstein-2 bounds"};
  app.require_subcommand(1);

  Common c_sample, c_verify, c_sweep, c_plan, c_w2, c_accept;
  auto* sample = app.add_subcommand("sample", "run the sampler on a configured target");
  add_common(sample, c_sample, true);
  auto* verify = app.add_subcommand("verify-bounds", "measure constants and check the smoothness bounds");
  add_common(verify, c_verify, true);
  auto* sweep = app.add_subcommand("sweep", "run a configured experiment");
  add_common(sweep, c_sweep, true);
  auto* plan = app.add_subcommand("plan", "plan T, tau and the score budget for a target accuracy");
  add_common(plan, c_plan, true);
  auto* w2 = app.add_subcommand("w2", "W2 between two sample CSV files");
  add_common(w2, c_w2, false);
  std::string w2_a, w2_b, w2_method = "auto";
  int w2_proj = kDefaultProjections;
  w2->add_option("a", w2_a, "first sample CSV")->required()->check(CLI::ExistingFile);
  w2->add_option("b", w2_b, "second sample CSV")->required()->check(CLI::ExistingFile);
  w2->add_option("--method", w2_method, "auto | sorted | assignment | sliced | bures");
  w2->add_option("--n-proj", w2_proj, "projections for sliced W2");
  auto* accept = app.add_subcommand("accept", "run the acceptance suite");
  add_common(accept, c_accept, false);
  std::vector<int> only;
  int mutate = 0;
  double inject = 0.0;
  bool no_limits = false;
  accept->add_option("--only", only, "criterion ids to run")->delimiter(',');
  accept->add_option("--mutate-alpha", mutate, "shift the drift alpha in the stationarity check");
  accept->add_option("--inject-eps", inject, "score error injected into the bound-audit reruns");
  accept->add_flag("--no-runtime-limits", no_limits, "do not fail criteria on runtime");

  CLI11_PARSE(app, argc, argv);

  try {
    for (Common* c : {&c_sample, &c_verify, &c_sweep, &c_plan, &c_w2, &c_accept}) {
      if (c->threads > 0) set_default_threads(c->threads);
    }
    if (*sample) return cmd_sample(c_sample);
    if (*verify) return cmd_verify(c_verify);
    if (*sweep) return cmd_sweep(c_sweep);
    if (*plan) return cmd_plan(c_plan);
    if (*w2) return cmd_w2(c_w2, w2_a, w2_b, w2_method, w2_proj);
    if (*accept) return cmd_accept(c_accept, only, mutate, inject, no_limits);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
