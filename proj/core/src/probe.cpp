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

#include "heatscore/probe.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/random/sobol.hpp>

#include "heatscore/parallel.hpp"

namespace heatscore {
namespace {

void check_box(const Vec& lower, const Vec& upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw std::invalid_argument("probe box bounds have mismatched sizes");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(upper[i] >= lower[i])) {
      throw std::invalid_argument("probe box has upper < lower");
    }
  }
}

}  // namespace

ProbeGrid ProbeGrid::tensor(const Vec& lower, const Vec& upper,
                            int per_axis) {
  check_box(lower, upper);
  if (per_axis < 1) throw std::invalid_argument("per_axis must be >= 1");
  const int d = static_cast<int>(lower.size());
  double total = std::pow(static_cast<double>(per_axis), d);
  if (total > 5e6) throw std::invalid_argument("tensor grid too large");
  const int n = static_cast<int>(total);

  ProbeGrid grid;
  grid.lower_ = lower;
  grid.upper_ = upper;
  grid.per_axis_ = per_axis;
  grid.points_.resize(n, d);
  for (int i = 0; i < n; ++i) {
    int rest = i;
    for (int j = 0; j < d; ++j) {
      const int idx = rest % per_axis;
      rest /= per_axis;
      const double frac =
          per_axis == 1 ? 0.5 : static_cast<double>(idx) / (per_axis - 1);
      grid.points_(i, j) = lower[j] + frac * (upper[j] - lower[j]);
    }
  }
  return grid;
}

ProbeGrid ProbeGrid::sobol(const Vec& lower, const Vec& upper, int count) {
  check_box(lower, upper);
  if (count < 1) throw std::invalid_argument("sobol count must be >= 1");
  const int d = static_cast<int>(lower.size());
  boost::random::sobol engine(d);
  const double scale = 1.0 / (static_cast<double>(engine.max()) + 1.0);

  ProbeGrid grid;
  grid.lower_ = lower;
  grid.upper_ = upper;
  grid.points_.resize(count, d);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < d; ++j) {
      const double u = static_cast<double>(engine()) * scale;
      grid.points_(i, j) = lower[j] + u * (upper[j] - lower[j]);
    }
  }
  return grid;
}

ProbeGrid ProbeGrid::standard(const Vec& lower, const Vec& upper) {
  if (lower.size() <= 2) return tensor(lower, upper);
  return sobol(lower, upper);
}

ProbeGrid ProbeGrid::from_points(Mat points) {
  if (points.rows() == 0 || points.cols() == 0) {
    throw std::invalid_argument("probe set is empty");
  }
  ProbeGrid grid;
  grid.lower_ = points.colwise().minCoeff().transpose();
  grid.upper_ = points.colwise().maxCoeff().transpose();
  grid.points_ = std::move(points);
  return grid;
}

Vec ProbeGrid::spacing() const {
  const Vec width = upper_ - lower_;
  if (per_axis_ > 1) return width / static_cast<double>(per_axis_ - 1);
  const double per = std::pow(static_cast<double>(size()), 1.0 / dim());
  return width / std::max(1.0, per);
}

GridMax grid_sup(const ProbeGrid& grid,
                 const std::function<double(const Vec&)>& fn, bool refine) {
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](int i) { values[i] = fn(grid.point(i)); });

  GridMax best;
  best.value = -std::numeric_limits<double>::infinity();
  int best_index = 0;
  for (int i = 0; i < grid.size(); ++i) {
    if (values[i] > best.value || std::isnan(values[i])) {
      best.value = values[i];
      best_index = i;
      if (std::isnan(values[i])) break;
    }
  }
  best.argmax = grid.point(best_index);
  if (!refine || std::isnan(best.value)) return best;

  const Vec step = grid.spacing();
  Vec lo = (best.argmax - step).cwiseMax(grid.lower());
  Vec hi = (best.argmax + step).cwiseMin(grid.upper());
  const ProbeGrid local = grid.dim() <= 2
                              ? ProbeGrid::tensor(lo, hi, 21)
                              : ProbeGrid::sobol(lo, hi, 256);
  GridMax fine = grid_sup(local, fn, false);
  if (fine.value > best.value || std::isnan(fine.value)) return fine;
  return best;
}

}  // namespace heatscore
