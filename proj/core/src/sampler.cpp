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

#include "heatscore/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>

#include "heatscore/parallel.hpp"

namespace heatscore {
namespace {

inline Vec advance(const Vec& y, double alpha, const Vec& score,
                   const Vec& sqrt_c, const Vec& z) {
  const double root = std::sqrt(alpha);
  return (y + (1.0 - alpha) * score) / root +
         std::sqrt(1.0 - alpha) * sqrt_c.cwiseProduct(z);
}

}  // namespace

SamplerRun::SamplerRun(Schedule schedule_in, ScoreModel score_in, int paths,
                       RngStream stream, std::vector<int> records)
    : schedule(std::move(schedule_in)),
      score(std::move(score_in)),
      n_paths(paths),
      rng(stream),
      record_steps(std::move(records)) {
  if (n_paths < 1) throw std::invalid_argument("run needs n_paths >= 1");
  const int n = schedule.steps();
  for (int k : record_steps) {
    if (k < 0 || k > n) throw std::invalid_argument("record step out of range");
  }
  record_steps.push_back(n);
  std::sort(record_steps.begin(), record_steps.end());
  record_steps.erase(std::unique(record_steps.begin(), record_steps.end()),
                     record_steps.end());
}

std::vector<std::string> SamplerRun::warnings() const {
  std::vector<std::string> out;
  if (tau_cap && schedule.tau() > *tau_cap) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "step size %.6g exceeds the small-step cap %.6g",
                  schedule.tau(), *tau_cap);
    out.emplace_back(buf);
  }
  return out;
}

Vec step_with_noise(const Vec& y, int k, const SamplerRun& run, const Vec& z) {
  if (k < 0 || k >= run.schedule.steps()) {
    throw std::out_of_range("step index out of range");
  }
  const Vec s = run.score.score(run.schedule.score_time(k), y);
  return advance(y, run.schedule.alpha(k), s, run.score.space().c().cwiseSqrt(), z);
}

Vec step(const Vec& y, int k, const SamplerRun& run, RngEngine& engine) {
  Vec z(y.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = engine.normal();
  return step_with_noise(y, k, run, z);
}

RunResult run_paths(const SamplerRun& run, int threads) {
  const int d = run.score.dim();
  const int steps = run.schedule.steps();
  const Vec sqrt_c = run.score.space().c().cwiseSqrt();

  std::vector<ScoreSlice> slices(steps);
  parallel_for(steps, [&](int k) {
    slices[k] = run.score.slice(run.schedule.score_time(k));
  }, threads);

  const int n_records = static_cast<int>(run.record_steps.size());
  std::vector<Mat> store(n_records, Mat(run.n_paths, d));
  std::vector<char> ok(run.n_paths, 1);
  std::vector<PathFailure> failures_by_path(run.n_paths);

  parallel_for(run.n_paths, [&](int i) {
    RngEngine engine = run.rng.substream(static_cast<std::uint64_t>(i)).engine();
    Vec y(d), z(d);
    for (int j = 0; j < d; ++j) y[j] = sqrt_c[j] * engine.normal();
    int next = 0;
    if (run.record_steps[0] == 0) store[next++].row(i) = y.transpose();
    for (int k = 0; k < steps; ++k) {
      const Vec s = slices[k](y);
      if (!s.allFinite()) {
        ok[i] = 0;
        failures_by_path[i] = {i, k, "non-finite score"};
        return;
      }
      for (int j = 0; j < d; ++j) z[j] = engine.normal();
      y = advance(y, run.schedule.alpha(k), s, sqrt_c, z);
      if (next < n_records && run.record_steps[next] == k + 1) {
        store[next++].row(i) = y.transpose();
      }
    }
  }, threads);

  RunResult result;
  result.record_steps = run.record_steps;
  std::vector<int> keep;
  for (int i = 0; i < run.n_paths; ++i) {
    if (ok[i]) {
      keep.push_back(i);
    } else {
      result.failures.push_back(failures_by_path[i]);
    }
  }
  for (int r = 0; r < n_records; ++r) {
    SampleSet set;
    set.seed = run.rng.seed;
    set.draws.resize(static_cast<Eigen::Index>(keep.size()), d);
    for (std::size_t p = 0; p < keep.size(); ++p) {
      set.draws.row(static_cast<Eigen::Index>(p)) = store[r].row(keep[p]);
    }
    result.records.push_back(std::move(set));
  }
  return result;
}

GaussianMeasure GaussianChannel::push(const GaussianMeasure& in, int k) const {
  const Vec mean = scale[k].cwiseProduct(in.mean) + shift[k];
  const Vec var =
      scale[k].cwiseProduct(scale[k]).cwiseProduct(in.var) + noise_var[k];
  return GaussianMeasure(mean, var);
}

GaussianMeasure GaussianChannel::push_all(const GaussianMeasure& in) const {
  GaussianMeasure out = in;
  for (int k = 0; k < steps(); ++k) out = push(out, k);
  return out;
}

GaussianChannel build_channel(const Schedule& schedule,
                              const GaussianMeasure& law0,
                              const ModelSpace& space,
                              const ChannelMutation& mutation) {
  if (law0.dim() != space.dim()) {
    throw std::invalid_argument("channel law and space dimensions differ");
  }
  const int n = schedule.steps();
  const Vec& c = space.c();
  GaussianChannel ch;
  ch.scale.resize(n);
  ch.shift.resize(n);
  ch.noise_var.resize(n);
  for (int k = 0; k < n; ++k) {
    const double alpha = schedule.alpha(k);
    double drift_alpha = alpha;
    if (mutation.drift_alpha_shift != 0) {
      const int hi = std::clamp(k + 1 + mutation.drift_alpha_shift, k + 1, n);
      drift_alpha = std::exp(schedule.point(k) - schedule.point(hi));
      if (hi == k + 1) drift_alpha = std::exp(-2.0 * schedule.step_size(k));
    }
    const double t = schedule.score_time(k);
    const double shrink = std::exp(-0.5 * t);
    const double root = std::sqrt(drift_alpha);
    Vec sc(c.size()), sh(c.size()), nv(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double vt = ou_variance(law0.var[i], c[i], t);
      const double mt = shrink * law0.mean[i];
      const double gain = (1.0 - drift_alpha) * c[i] / vt;
      sc[i] = (1.0 - gain) / root;
      sh[i] = gain * mt / root;
      nv[i] = (1.0 - alpha) * c[i];
    }
    ch.scale[k] = std::move(sc);
    ch.shift[k] = std::move(sh);
    ch.noise_var[k] = std::move(nv);
  }
  return ch;
}

GaussianChannel build_channel(const SamplerRun& run,
                              const ChannelMutation& mutation) {
  const auto law0 = run.score.affine_law0();
  if (!law0) {
    throw std::invalid_argument(
        "exact channel needs an affine score (single diagonal Gaussian)");
  }
  return build_channel(run.schedule, *law0, run.score.space(), mutation);
}

GaussianMeasure exact_channel(const SamplerRun& run,
                              const ChannelMutation& mutation) {
  const GaussianChannel ch = build_channel(run, mutation);
  const ModelSpace& space = run.score.space();
  return ch.push_all(GaussianMeasure(Vec::Zero(space.dim()), space.c()));
}

MartingaleReport martingale_diagnostic(const ScoreModel& exact,
                                       const MartingaleOptions& options) {
  if (!(options.tau > 0.0) || !(options.horizon > 0.0)) {
    throw std::invalid_argument("martingale diagnostic needs tau, T > 0");
  }
  if (options.checkpoints < 1 || options.n_paths < 2) {
    throw std::invalid_argument("martingale diagnostic needs checkpoints, paths");
  }
  const ModelSpace& space = exact.space();
  const int d = space.dim();
  int steps = static_cast<int>(std::ceil(options.horizon / options.tau - 1e-9));
  steps = ((steps + options.checkpoints - 1) / options.checkpoints) * options.checkpoints;
  const Schedule schedule = Schedule::uniform(options.horizon, 0.0, steps);
  const int stride = steps / options.checkpoints;
  const Vec sqrt_c = space.c().cwiseSqrt();

  std::vector<ScoreSlice> slices(steps + 1);
  parallel_for(steps + 1, [&](int k) {
    slices[k] = exact.slice(options.horizon - schedule.point(k));
  });

  const MarginalLaw law_t = evolve(exact.base_law(), space, options.horizon);
  const SampleSet start = sample(law_t, options.n_paths, options.rng.substream(0));
  const RngStream noise = options.rng.substream(1);

  const int m = options.checkpoints + 1;
  std::vector<Mat> values(m, Mat(options.n_paths, d));
  parallel_for(options.n_paths, [&](int i) {
    RngEngine engine = noise.substream(static_cast<std::uint64_t>(i)).engine();
    Vec y = start.row(i);
    Vec z(d);
    auto record = [&](int slot, int k) {
      const Vec s = slices[k](y);
      values[slot].row(i) =
          (std::exp(-0.5 * schedule.point(k)) * (s + y)).transpose();
    };
    record(0, 0);
    for (int k = 0; k < steps; ++k) {
      const Vec s = slices[k](y);
      for (int j = 0; j < d; ++j) z[j] = engine.normal();
      y = advance(y, schedule.alpha(k), s, sqrt_c, z);
      if ((k + 1) % stride == 0) record((k + 1) / stride, k + 1);
    }
  });

  MartingaleReport report;
  const double n = options.n_paths;
  for (int slot = 0; slot < m; ++slot) {
    report.times.push_back(schedule.point(slot * stride));
    report.mean.push_back(values[slot].colwise().mean().transpose());
    const Mat diff = values[slot] - values[0];
    const Vec drift = diff.colwise().mean().transpose();
    const Mat centered = diff.rowwise() - drift.transpose();
    const Vec var = centered.cwiseProduct(centered).colwise().sum().transpose() / (n - 1.0);
    const Vec se = (var / n).cwiseSqrt();
    double worst = 0.0;
    for (int j = 0; j < d; ++j) {
      if (se[j] > 0.0) {
        worst = std::max(worst, std::abs(drift[j]) / se[j]);
      } else if (drift[j] != 0.0) {
        worst = std::numeric_limits<double>::infinity();
      }
    }
    report.drift.push_back(drift);
    report.drift_stderr.push_back(se);
    report.drift_in_se.push_back(worst);
    report.max_drift_in_se = std::max(report.max_drift_in_se, worst);
  }
  return report;
}

}  // namespace heatscore
