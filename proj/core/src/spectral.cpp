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

#include "heatscore/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "heatscore/csv.hpp"

namespace heatscore {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

double compensated_sum(const Vec& values) {
  return compensated_sum(std::span<const double>(values.data(), values.size()));
}

namespace {

void require_positive_spectrum(const Vec& v, const char* name) {
  if (v.size() == 0) {
    throw std::invalid_argument(std::string(name) + " spectrum is empty");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw std::invalid_argument(std::string(name) +
                                  " spectrum must be positive and finite");
    }
  }
}

}  // namespace

ModelSpace::ModelSpace(Vec c, Vec a) : c_(std::move(c)), a_(std::move(a)) {
  require_positive_spectrum(c_, "C");
  require_positive_spectrum(a_, "A");
  if (a_.size() != c_.size()) {
    throw std::invalid_argument("A and C spectra differ in dimension");
  }
  trace_c_ = compensated_sum(c_);
  m0_ = std::max(trace_c_, 1.0);
}

ModelSpace::ModelSpace(Vec c) : ModelSpace(c, c) {}

ModelSpace ModelSpace::isotropic(int dim, double c, double a) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  return ModelSpace(Vec::Constant(dim, c), Vec::Constant(dim, a));
}

ModelSpace ModelSpace::with_second_moment(double m2) const {
  if (!(m2 >= 0.0) || !std::isfinite(m2)) {
    throw std::invalid_argument("second moment must be finite and nonnegative");
  }
  ModelSpace out = *this;
  out.m2_ = m2;
  out.m0_ = std::max({trace_c_, m2, 1.0});
  return out;
}

ModelSpace ModelSpace::with_tail(Vec a) const {
  ModelSpace out(c_, std::move(a));
  if (m2_) return out.with_second_moment(*m2_);
  return out;
}

bool ModelSpace::tail_matches_base() const { return a_ == c_; }

GaussianMeasure::GaussianMeasure(Vec mean_in, Vec var_in)
    : mean(std::move(mean_in)), var(std::move(var_in)) {
  if (mean.size() != var.size() || mean.size() == 0) {
    throw std::invalid_argument("Gaussian mean and variance sizes differ");
  }
  for (Eigen::Index i = 0; i < var.size(); ++i) {
    if (!(var[i] >= 0.0)) {
      throw std::invalid_argument("Gaussian variances must be nonnegative");
    }
  }
}

Schedule::Schedule(double horizon, double delta, std::vector<double> points)
    : horizon_(horizon), delta_(delta), points_(std::move(points)) {
  if (!(horizon_ - delta_ > 0.0)) {
    throw std::invalid_argument("schedule requires T - delta > 0");
  }
  if (delta_ < 0.0) throw std::invalid_argument("delta must be nonnegative");
  if (points_.size() < 2) {
    throw std::invalid_argument("schedule requires at least one step");
  }
  if (points_.front() != 0.0) {
    throw std::invalid_argument("schedule must start at 0");
  }
  if (points_.back() != horizon_ - delta_) {
    throw std::invalid_argument("schedule must end at T - delta");
  }
  alphas_.resize(points_.size() - 1);
  for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
    const double h = points_[k + 1] - points_[k];
    if (!(h > 0.0)) {
      throw std::invalid_argument("schedule points must strictly increase");
    }
    tau_ = std::max(tau_, h);
    alphas_[k] = std::exp(points_[k] - points_[k + 1]);
  }
}

Schedule Schedule::uniform(double horizon, double delta, int steps) {
  if (steps < 1) throw std::invalid_argument("schedule requires N >= 1");
  if (!(horizon - delta > 0.0)) {
    throw std::invalid_argument("schedule requires T - delta > 0");
  }
  const double end = horizon - delta;
  std::vector<double> points(steps + 1);
  for (int k = 0; k < steps; ++k) {
    points[k] = end * static_cast<double>(k) / static_cast<double>(steps);
  }
  points[steps] = end;
  return Schedule(horizon, delta, std::move(points));
}

Schedule Schedule::from_points(double horizon, double delta,
                               std::vector<double> points) {
  return Schedule(horizon, delta, std::move(points));
}

Schedule make_uniform_schedule(double horizon, double delta, int steps) {
  return Schedule::uniform(horizon, delta, steps);
}

SampleSet gaussian_sample(const GaussianMeasure& mu, int n,
                          const RngStream& rng) {
  if (n < 1) throw std::invalid_argument("gaussian_sample requires n >= 1");
  const int d = mu.dim();
  SampleSet out;
  out.seed = rng.seed;
  out.draws.resize(n, d);
  const Vec sd = mu.var.cwiseSqrt();
  for (int i = 0; i < n; ++i) {
    RngEngine engine = rng.substream(static_cast<std::uint64_t>(i)).engine();
    for (int j = 0; j < d; ++j) {
      out.draws(i, j) = mu.mean[j] + sd[j] * engine.normal();
    }
  }
  return out;
}

double second_moment(const SampleSet& samples) {
  if (samples.count() == 0) {
    throw std::invalid_argument("second_moment of an empty sample set");
  }
  CompensatedSum acc;
  for (int i = 0; i < samples.count(); ++i) {
    acc.add(samples.draws.row(i).squaredNorm());
  }
  return acc.value() / samples.count();
}

Vec sample_mean(const SampleSet& samples) {
  if (samples.count() == 0) throw std::invalid_argument("empty sample set");
  Vec mean(samples.dim());
  for (int j = 0; j < samples.dim(); ++j) {
    CompensatedSum acc;
    for (int i = 0; i < samples.count(); ++i) acc.add(samples.draws(i, j));
    mean[j] = acc.value() / samples.count();
  }
  return mean;
}

Vec sample_variance(const SampleSet& samples) {
  if (samples.count() < 2) {
    throw std::invalid_argument("sample variance needs at least two draws");
  }
  const Vec mean = sample_mean(samples);
  Vec var(samples.dim());
  for (int j = 0; j < samples.dim(); ++j) {
    CompensatedSum acc;
    for (int i = 0; i < samples.count(); ++i) {
      const double dev = samples.draws(i, j) - mean[j];
      acc.add(dev * dev);
    }
    var[j] = acc.value() / (samples.count() - 1);
  }
  return var;
}

Mat sample_covariance(const SampleSet& samples) {
  if (samples.count() < 2) {
    throw std::invalid_argument("sample covariance needs at least two draws");
  }
  const Vec mean = sample_mean(samples);
  const Mat centered = samples.draws.rowwise() - mean.transpose();
  return (centered.transpose() * centered) / (samples.count() - 1);
}

void write_sample_csv(std::ostream& out, const SampleSet& samples) {
  out << "dim,count,seed\n";
  out << samples.dim() << ',' << samples.count() << ',' << samples.seed
      << '\n';
  for (int i = 0; i < samples.count(); ++i) {
    for (int j = 0; j < samples.dim(); ++j) {
      if (j > 0) out << ',';
      out << format_real(samples.draws(i, j));
    }
    out << '\n';
  }
}

SampleSet read_sample_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "dim,count,seed") {
    throw std::runtime_error("sample csv: missing dim,count,seed header");
  }
  if (!std::getline(in, line)) {
    throw std::runtime_error("sample csv: missing header values");
  }
  const auto header = split_csv_line(line);
  if (header.size() != 3) {
    throw std::runtime_error("sample csv: malformed header values");
  }
  const int dim = std::stoi(header[0]);
  const int count = std::stoi(header[1]);
  SampleSet out;
  out.seed = std::stoull(header[2]);
  out.draws.resize(count, dim);
  for (int i = 0; i < count; ++i) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("sample csv: truncated body");
    }
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != dim) {
      throw std::runtime_error("sample csv: row has wrong arity");
    }
    for (int j = 0; j < dim; ++j) out.draws(i, j) = std::stod(fields[j]);
  }
  return out;
}

void write_sample_csv(const std::string& path, const SampleSet& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_sample_csv(out, samples);
}

SampleSet read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_sample_csv(in);
}

}  // namespace heatscore
