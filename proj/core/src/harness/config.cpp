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

#include "heatscore/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace heatscore::harness {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: `" + key + "` is not a number: " + t);
  }
  if (used != t.size()) {
    throw std::invalid_argument("config: `" + key + "` is not a number: " + t);
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) throw std::invalid_argument("config: empty item in `" + key + "`");
    out.push_back(parse_real(key, item));
  }
  if (out.empty()) throw std::invalid_argument("config: `" + key + "` is empty");
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<Vec> to_vecs(const std::vector<std::vector<double>>& rows) {
  std::vector<Vec> out;
  for (const auto& r : rows) out.push_back(to_vec(r));
  return out;
}

// Broadcast a single row to `n` rows.
std::vector<std::vector<double>> broadcast(std::vector<std::vector<double>> rows,
                                           int n, const std::string& key) {
  if (static_cast<int>(rows.size()) == n) return rows;
  if (rows.size() == 1) return std::vector<std::vector<double>>(n, rows.front());
  throw std::invalid_argument("config: `" + key + "` needs 1 or " +
                              std::to_string(n) + " rows");
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config config;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(number) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(number) +
                                  ": empty key");
    }
    config.entries_[key] = trim(line.substr(eq + 1));
  }
  return config;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

void Config::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

std::string Config::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw std::invalid_argument("config: missing `" + key + "`");
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double Config::real(const std::string& key) const { return parse_real(key, get(key)); }

double Config::real_or(const std::string& key, double fallback) const {
  return has(key) ? real(key) : fallback;
}

int Config::integer(const std::string& key) const {
  const double v = real(key);
  if (v != std::floor(v) || std::abs(v) > 2e9) {
    throw std::invalid_argument("config: `" + key + "` must be an integer");
  }
  return static_cast<int>(v);
}

int Config::integer_or(const std::string& key, int fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t Config::u64_or(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string t = get(key);
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.size() || t.empty() || t[0] == '-') {
    throw std::invalid_argument("config: `" + key + "` must be an unsigned integer");
  }
  return v;
}

bool Config::flag_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: `" + key + "` must be a boolean");
}

std::vector<double> Config::reals(const std::string& key) const {
  return parse_list(key, get(key));
}

std::vector<double> Config::reals_or(const std::string& key,
                                     std::vector<double> fallback) const {
  return has(key) ? reals(key) : fallback;
}

std::vector<std::vector<double>> Config::rows(const std::string& key) const {
  std::vector<std::vector<double>> out;
  std::stringstream in(get(key));
  std::string row;
  while (std::getline(in, row, ';')) out.push_back(parse_list(key, row));
  if (out.empty()) throw std::invalid_argument("config: `" + key + "` is empty");
  return out;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

Vec spectrum_from_config(const Config& config, int dim_override) {
  if (config.has("c") && dim_override == 0) return to_vec(config.reals("c"));
  const std::string profile = config.get_or("c_profile", config.has("c") ? "list" : "constant");
  const int d = dim_override > 0 ? dim_override : config.integer("dim");
  if (d < 1) throw std::invalid_argument("config: dim must be positive");
  Vec c(d);
  if (profile == "list") {
    const Vec base = to_vec(config.reals("c"));
    if (base.size() < d) throw std::invalid_argument("config: `c` shorter than dim");
    c = base.head(d);
  } else if (profile == "constant") {
    c.setConstant(config.real_or("c_value", 1.0));
  } else if (profile == "inverse_square") {
    for (int i = 0; i < d; ++i) c[i] = 1.0 / ((i + 1.0) * (i + 1.0));
    c *= config.real_or("c_trace", 1.0) / c.sum();
  } else {
    throw std::invalid_argument("config: unknown c_profile " + profile);
  }
  return c;
}

ProductMixture symmetric_product(const Vec& c, double separation) {
  std::vector<Mixture1D> factors;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double m = separation * std::sqrt(c[i]);
    factors.push_back({{0.5, 0.5}, {-m, m}, {c[i], c[i]}});
  }
  return ProductMixture(std::move(factors));
}

TargetConfig load_target(const Config& config) {
  const std::string family = config.get("family");
  int dim_hint = 0;
  if (config.has("means")) dim_hint = static_cast<int>(config.rows("means").front().size());
  if (config.has("atoms")) dim_hint = static_cast<int>(config.rows("atoms").front().size());
  if (config.has("G")) dim_hint = static_cast<int>(config.rows("G").front().size());
  if (config.has("factor_means")) dim_hint = static_cast<int>(config.rows("factor_means").size());

  Vec c;
  if (config.has("c") || config.has("c_profile") || config.has("dim")) {
    c = spectrum_from_config(config);
  } else if (dim_hint > 0) {
    c = Vec::Ones(dim_hint);
  } else {
    throw std::invalid_argument("config: cannot infer the dimension");
  }
  const int d = static_cast<int>(c.size());
  const Vec a = config.has("a") ? to_vec(config.reals("a")) : c;
  ModelSpace space(c, a);

  auto target = [&]() -> TargetModel {
    if (family == "gaussian_mixture") {
      const auto means = config.rows("means");
      const int k = static_cast<int>(means.size());
      const Vec w = config.has("weights") ? to_vec(config.reals("weights"))
                                          : Vec::Constant(k, 1.0 / k);
      return GaussianMixture(w, to_vecs(means),
                             to_vecs(broadcast(config.rows("vars"), k, "vars")));
    }
    if (family == "product_mixture") {
      const auto means = config.rows("factor_means");
      const int n = static_cast<int>(means.size());
      const auto vars = broadcast(config.rows("factor_vars"), n, "factor_vars");
      std::vector<std::vector<double>> weights;
      if (config.has("factor_weights")) {
        weights = broadcast(config.rows("factor_weights"), n, "factor_weights");
      }
      std::vector<Mixture1D> factors;
      for (int i = 0; i < n; ++i) {
        const std::size_t k = means[i].size();
        Mixture1D f;
        f.means = means[i];
        f.vars = vars[i];
        f.weights = weights.empty() ? std::vector<double>(k, 1.0 / k) : weights[i];
        factors.push_back(std::move(f));
      }
      return ProductMixture(std::move(factors));
    }
    if (family == "symmetric_product") {
      return symmetric_product(c, config.real_or("separation", 1.0));
    }
    if (family == "mollified_cloud") {
      auto atoms = to_vecs(config.rows("atoms"));
      const int k = static_cast<int>(atoms.size());
      const Vec w = config.has("weights") ? to_vec(config.reals("weights"))
                                          : Vec::Constant(k, 1.0 / k);
      const double sigma = config.real_or("sigma", 0.0);
      double diameter = 0.0;
      for (const auto& y : atoms) {
        for (const auto& z : atoms) diameter = std::max(diameter, (y - z).norm());
      }
      diameter = config.real_or("diameter", diameter);
      return MollifiedPointCloud(std::move(atoms), w, sigma * sigma, diameter);
    }
    if (family == "linear_gaussian_posterior") {
      const auto rows = config.rows("G");
      Mat g(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != g.cols()) {
          throw std::invalid_argument("config: ragged `G` rows");
        }
        g.row(static_cast<Eigen::Index>(i)) = to_vec(rows[i]).transpose();
      }
      const Vec noise = config.has("noise") ? to_vec(config.reals("noise"))
                                            : Vec::Constant(g.rows(), 1.0);
      return LinearGaussianPosterior(g, noise, to_vec(config.reals("y")));
    }
    throw std::invalid_argument("config: unknown family " + family);
  }();
  if (dim(target) != d) {
    throw std::invalid_argument("config: target dimension " +
                                std::to_string(dim(target)) +
                                " differs from spectrum dimension " + std::to_string(d));
  }
  return {family, std::move(target), std::move(space),
          config.real_or("stopping_delta", 0.0)};
}

}  // namespace heatscore::harness
