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
#include <numbers>
#include <stdexcept>

#include "heatscore/assignment.hpp"
#include "heatscore/parallel.hpp"
#include "heatscore/quadrature.hpp"

namespace heatscore {
namespace {

void require_same_shape(const SampleSet& s1, const SampleSet& s2) {
  if (s1.dim() != s2.dim()) throw std::invalid_argument("W2: dimension mismatch");
  if (s1.count() != s2.count()) throw std::invalid_argument("W2: size mismatch");
  if (s1.count() == 0) throw std::invalid_argument("W2: empty sample set");
}

// W = sqrt(mean cost): stderr(W) = stderr(mean) / (2W).
void delta_stderr(const std::vector<double>& costs, W2Estimate& out) {
  const double n = static_cast<double>(costs.size());
  const double mean = out.value * out.value;
  if (costs.size() < 2 || out.value == 0.0) {
    out.stderr_value = 0.0;
    return;
  }
  CompensatedSum acc;
  for (double c : costs) acc.add((c - mean) * (c - mean));
  const double var = acc.value() / (n - 1.0);
  out.stderr_value = std::sqrt(var / n) / (2.0 * out.value);
}

Mat sqrtm_spd(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  const Vec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

double kl_1d(const Mixture1D& f, double c) {
  const int k = static_cast<int>(f.weights.size());
  auto log_p = [&](double x) {
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(k);
    for (int j = 0; j < k; ++j) {
      const double diff = x - f.means[j];
      logs[j] = std::log(f.weights[j]) -
                0.5 * (std::log(2.0 * std::numbers::pi * f.vars[j]) + diff * diff / f.vars[j]);
      m = std::max(m, logs[j]);
    }
    double s = 0.0;
    for (double v : logs) s += std::exp(v - m);
    return m + std::log(s);
  };
  auto integrand = [&](double x) {
    const double lp = log_p(x);
    const double lq = -0.5 * (std::log(2.0 * std::numbers::pi * c) + x * x / c);
    const double p = std::exp(lp);
    return p == 0.0 ? 0.0 : p * (lp - lq);
  };
  std::vector<double> cuts;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int j = 0; j < k; ++j) {
    const double s = std::sqrt(f.vars[j]);
    lo = std::min(lo, f.means[j] - 40.0 * s);
    hi = std::max(hi, f.means[j] + 40.0 * s);
    cuts.push_back(f.means[j]);
  }
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  CompensatedSum acc;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    acc.add(integrate(integrand, cuts[i], cuts[i + 1], 1e-15));
  }
  return acc.value();
}

}  // namespace

std::string to_string(W2Method method) {
  switch (method) {
    case W2Method::kBures: return "bures";
    case W2Method::kAssignment: return "assignment";
    case W2Method::kSliced: return "sliced";
    case W2Method::kSorted: return "sorted";
  }
  return "unknown";
}

W2Estimate w2_bures(const GaussianMeasure& g1, const GaussianMeasure& g2) {
  if (g1.dim() != g2.dim()) throw std::invalid_argument("W2: dimension mismatch");
  CompensatedSum acc;
  for (int i = 0; i < g1.dim(); ++i) {
    const double dm = g1.mean[i] - g2.mean[i];
    const double ds = std::sqrt(g1.var[i]) - std::sqrt(g2.var[i]);
    acc.add(dm * dm);
    acc.add(ds * ds);
  }
  W2Estimate out;
  out.value = std::sqrt(std::max(0.0, acc.value()));
  out.method = W2Method::kBures;
  return out;
}

W2Estimate w2_bures_dense(const Vec& m1, const Mat& s1, const Vec& m2,
                          const Mat& s2) {
  if (m1.size() != m2.size() || s1.rows() != m1.size() || s2.rows() != m2.size()) {
    throw std::invalid_argument("W2: dimension mismatch");
  }
  const Mat root2 = sqrtm_spd(s2);
  const Mat cross = sqrtm_spd(root2 * s1 * root2);
  const double w2sq =
      (m1 - m2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * cross.trace();
  W2Estimate out;
  out.value = std::sqrt(std::max(0.0, w2sq));
  out.method = W2Method::kBures;
  return out;
}

W2Estimate w2_assignment(const SampleSet& s1, const SampleSet& s2) {
  require_same_shape(s1, s2);
  const int n = s1.count();
  if (n > kAssignmentCap) {
    throw std::invalid_argument(
        "assignment W2 is capped at 4096 points; use the sliced estimator");
  }
  const int d = s1.dim();
  // Row-major copies so the cost kernel walks contiguous memory.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a =
      s1.draws;
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> b =
      s2.draws;
  auto cost = [&](int i, int j) {
    const double* x = a.data() + static_cast<std::ptrdiff_t>(i) * d;
    const double* y = b.data() + static_cast<std::ptrdiff_t>(j) * d;
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      const double diff = x[k] - y[k];
      s += diff * diff;
    }
    return s;
  };
  const std::vector<int> match = solve_assignment(n, cost);
  std::vector<double> costs(n);
  for (int i = 0; i < n; ++i) costs[i] = cost(i, match[i]);
  W2Estimate out;
  out.method = W2Method::kAssignment;
  out.n_used = n;
  out.seed = s1.seed;
  out.value = std::sqrt(std::max(0.0, compensated_sum(costs) / n));
  delta_stderr(costs, out);
  return out;
}

W2Estimate w2_sorted_1d(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("sorted W2: sizes must match and be nonzero");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> costs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    costs[i] = (a[i] - b[i]) * (a[i] - b[i]);
  }
  W2Estimate out;
  out.method = W2Method::kSorted;
  out.n_used = static_cast<int>(a.size());
  out.value = std::sqrt(compensated_sum(costs) / a.size());
  delta_stderr(costs, out);
  return out;
}

W2Estimate w2_sliced(const SampleSet& s1, const SampleSet& s2,
                     const RngStream& rng, const SlicedOptions& options) {
  require_same_shape(s1, s2);
  if (options.n_proj < 16) throw std::invalid_argument("sliced W2 needs n_proj >= 16");
  const int d = s1.dim();
  const int n = s1.count();
  std::vector<double> per_proj(options.n_proj);
  parallel_for(options.n_proj, [&](int p) {
    RngEngine engine = rng.substream(static_cast<std::uint64_t>(p)).engine();
    Vec u(d);
    for (int j = 0; j < d; ++j) u[j] = engine.normal();
    u.normalize();
    const Vec pa = s1.draws * u;
    const Vec pb = s2.draws * u;
    std::vector<double> a(pa.data(), pa.data() + n), b(pb.data(), pb.data() + n);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CompensatedSum acc;
    for (int i = 0; i < n; ++i) acc.add((a[i] - b[i]) * (a[i] - b[i]));
    per_proj[p] = acc.value() / n;
  });
  const double scale = options.dimension_normalized ? static_cast<double>(d) : 1.0;
  for (double& v : per_proj) v *= scale;
  W2Estimate out;
  out.method = W2Method::kSliced;
  out.n_used = n;
  out.seed = rng.seed;
  out.value = std::sqrt(std::max(0.0, compensated_sum(per_proj) / options.n_proj));
  delta_stderr(per_proj, out);
  return out;
}

GaussianMeasure fit_gaussian(const SampleSet& samples) {
  return GaussianMeasure(sample_mean(samples), sample_variance(samples));
}

double kl_quadrature(const TargetModel& target, const ModelSpace& space) {
  std::vector<Mixture1D> factors;
  if (const auto* prod = std::get_if<ProductMixture>(&target)) {
    factors = prod->factors;
  } else if (const auto* mix = std::get_if<GaussianMixture>(&target)) {
    if (mix->components() != 1) {
      throw std::invalid_argument("KL quadrature needs a product-form target");
    }
    for (int i = 0; i < mix->dim(); ++i) {
      factors.push_back({{1.0}, {mix->means[0][i]}, {mix->vars[0][i]}});
    }
  } else {
    throw std::invalid_argument("KL quadrature needs a product-form target");
  }
  if (static_cast<int>(factors.size()) != space.dim()) {
    throw std::invalid_argument("KL: target and space dimensions differ");
  }
  CompensatedSum acc;
  for (int i = 0; i < space.dim(); ++i) {
    for (double v : factors[i].vars) {
      if (!(v > 0.0)) throw std::invalid_argument("KL: degenerate factor");
    }
    acc.add(kl_1d(factors[i], space.c()[i]));
  }
  return acc.value();
}

CsvTable estimates_to_csv(const std::vector<W2Estimate>& estimates) {
  CsvTable table({"method", "value", "stderr", "n", "seed"});
  for (const auto& e : estimates) {
    table.add_row({to_string(e.method), format_real(e.value),
                   format_real(e.stderr_value), std::to_string(e.n_used),
                   std::to_string(e.seed)});
  }
  return table;
}

}  // namespace heatscore
