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

#ifndef HEATSCORE_HARNESS_FIT_HPP_
#define HEATSCORE_HARNESS_FIT_HPP_

#include <string>
#include <vector>

namespace heatscore::harness {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  // Leave-one-out spread of the slope; NaN below four points.
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n = 0;
};

// Weighted least squares y = a + b x; unit weights when `weights` is empty.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& weights = {});

// log y against log x.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& y_stderr = {});
// log y against x.
LineFit fit_semilog(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>& y_stderr = {});

}  // namespace heatscore::harness

#endif  // HEATSCORE_HARNESS_FIT_HPP_
