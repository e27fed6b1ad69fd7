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

#include "heatscore/harness/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace heatscore::harness {
namespace {

void ols(const std::vector<double>& x, const std::vector<double>& y,
         const std::vector<double>& w, int skip, double& slope, double& intercept) {
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (static_cast<int>(i) == skip) continue;
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (static_cast<int>(i) == skip) continue;
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit: abscissae are all equal");
  slope = sxy / sxx;
  intercept = my - slope * mx;
}

// Relative error of y becomes the absolute error of log y.
std::vector<double> log_weights(const std::vector<double>& y,
                                const std::vector<double>& se) {
  if (se.empty()) return {};
  if (se.size() != y.size()) throw std::invalid_argument("fit: stderr size mismatch");
  std::vector<double> w(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double rel = se[i] / y[i];
    w[i] = rel > 0.0 ? 1.0 / (rel * rel) : 1.0;
  }
  return w;
}

std::vector<double> logs(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) throw std::invalid_argument("fit: log of a nonpositive value");
    out[i] = std::log(v[i]);
  }
  return out;
}

}  // namespace

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& weights) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit: need at least two points");
  std::vector<double> w = weights.empty() ? std::vector<double>(x.size(), 1.0) : weights;
  if (w.size() != x.size()) throw std::invalid_argument("fit: weight size mismatch");
  LineFit fit;
  fit.n = static_cast<int>(x.size());
  ols(x, y, w, -1, fit.slope, fit.intercept);
  if (fit.n >= 4) {
    fit.ci_low = std::numeric_limits<double>::infinity();
    fit.ci_high = -fit.ci_low;
    for (int k = 0; k < fit.n; ++k) {
      double s = 0, b = 0;
      ols(x, y, w, k, s, b);
      fit.ci_low = std::min(fit.ci_low, s);
      fit.ci_high = std::max(fit.ci_high, s);
    }
  } else {
    fit.ci_low = fit.ci_high = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& y_stderr) {
  return fit_line(logs(x), logs(y), log_weights(y, y_stderr));
}

LineFit fit_semilog(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>& y_stderr) {
  return fit_line(x, logs(y), log_weights(y, y_stderr));
}

}  // namespace heatscore::harness
