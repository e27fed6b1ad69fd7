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

#ifndef HEATSCORE_HARNESS_SVG_HPP_
#define HEATSCORE_HARNESS_SVG_HPP_

#include <string>
#include <vector>

namespace heatscore::harness {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

// Self-contained SVG line chart with markers.
std::string line_chart(const ChartSpec& spec);
void write_chart(const std::string& path, const ChartSpec& spec);

}  // namespace heatscore::harness

#endif  // HEATSCORE_HARNESS_SVG_HPP_
