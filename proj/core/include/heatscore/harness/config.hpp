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

#ifndef HEATSCORE_HARNESS_CONFIG_HPP_
#define HEATSCORE_HARNESS_CONFIG_HPP_

// Key-value configuration files.
//
//   # comment to end of line
//   key = value
//   list = 1, 2, 3
//   rows = 1, 0; 0, 1
//
// Keys are case sensitive; later assignments override earlier ones.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "heatscore/spectral.hpp"
#include "heatscore/targets.hpp"

namespace heatscore::harness {

class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key) const;
  double real_or(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer_or(const std::string& key, int fallback) const;
  std::uint64_t u64_or(const std::string& key, std::uint64_t fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<double> reals_or(const std::string& key,
                               std::vector<double> fallback) const;
  std::vector<std::vector<double>> rows(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  // Sorted `key = value` lines; the hash is taken over this text so that
  // comments and ordering do not change it.
  std::string canonical() const;
  std::string hash() const;

 private:
  std::map<std::string, std::string> entries_;
};

struct TargetConfig {
  std::string family;
  TargetModel target;
  ModelSpace space;
  double stopping_delta = 0.0;
};

// family = gaussian_mixture | product_mixture | mollified_cloud |
//          linear_gaussian_posterior | symmetric_product
// Spectrum: `c` (list), or `c_profile` (constant | inverse_square) with `dim`
// and `c_trace`; `a` defaults to `c`.
TargetConfig load_target(const Config& config);

// The spectrum keys alone, for experiments that rebuild targets per d.
Vec spectrum_from_config(const Config& config, int dim_override = 0);

// Factor i is 1/2 N(-s sqrt(c_i), c_i) + 1/2 N(s sqrt(c_i), c_i).
ProductMixture symmetric_product(const Vec& c, double separation = 1.0);

}  // namespace heatscore::harness

#endif  // HEATSCORE_HARNESS_CONFIG_HPP_
