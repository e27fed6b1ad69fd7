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

#ifndef HEATSCORE_PROBE_HPP_
#define HEATSCORE_PROBE_HPP_

#include <functional>

#include "heatscore/spectral.hpp"

namespace heatscore {

// A finite set of probe points inside an axis-aligned box. Grid suprema
// certify box suprema only; the box travels with every report.
class ProbeGrid {
 public:
  static constexpr int kDefaultPerAxis = 41;
  static constexpr int kDefaultSobolPoints = 4096;

  // Tensor grid with `per_axis` points per coordinate, endpoints included.
  static ProbeGrid tensor(const Vec& lower, const Vec& upper,
                          int per_axis = kDefaultPerAxis);
  // Scrambling-free Sobol points mapped into the box.
  static ProbeGrid sobol(const Vec& lower, const Vec& upper,
                         int count = kDefaultSobolPoints);
  // Tensor grid for d <= 2, Sobol set otherwise.
  static ProbeGrid standard(const Vec& lower, const Vec& upper);
  static ProbeGrid from_points(Mat points);

  int dim() const { return static_cast<int>(points_.cols()); }
  int size() const { return static_cast<int>(points_.rows()); }
  Vec point(int i) const { return points_.row(i).transpose(); }
  const Mat& points() const { return points_; }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  bool is_tensor() const { return per_axis_ > 0; }
  int per_axis() const { return per_axis_; }
  // Typical spacing per axis; used to size refinement boxes.
  Vec spacing() const;

 private:
  Mat points_;
  Vec lower_;
  Vec upper_;
  int per_axis_ = 0;
};

struct GridMax {
  double value = 0.0;
  Vec argmax;
};

// max over the grid of fn, then one refinement pass on a local grid of
// one spacing around the argmax.
GridMax grid_sup(const ProbeGrid& grid,
                 const std::function<double(const Vec&)>& fn,
                 bool refine = true);

}  // namespace heatscore

#endif  // HEATSCORE_PROBE_HPP_
