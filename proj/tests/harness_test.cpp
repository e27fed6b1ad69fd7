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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "heatscore/harness/acceptance.hpp"
#include "heatscore/harness/config.hpp"
#include "heatscore/harness/experiments.hpp"
#include "heatscore/harness/fit.hpp"
#include "heatscore/harness/manifest.hpp"
#include "heatscore/harness/svg.hpp"

namespace heatscore::harness {
namespace {

TEST(Config, ParsesScalarsListsAndRows) {
  const Config c = Config::parse(
      "# header\n"
      "alpha = 0.5   # trailing\n"
      "\n"
      "name = appended\n"
      "list = 1, 2.5, -3\n"
      "rows = 1, 0; 0, 1\n"
      "n = 12\n"
      "on = true\n"
      "alpha = 0.75\n");
  EXPECT_DOUBLE_EQ(c.real("alpha"), 0.75);
  EXPECT_EQ(c.get("name"), "appended");
  EXPECT_EQ(c.reals("list"), (std::vector<double>{1.0, 2.5, -3.0}));
  EXPECT_EQ(c.rows("rows").size(), 2u);
  EXPECT_EQ(c.rows("rows")[1], (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(c.integer("n"), 12);
  EXPECT_TRUE(c.flag_or("on", false));
  EXPECT_FALSE(c.flag_or("off", false));
  EXPECT_EQ(c.get_or("missing", "x"), "x");
  EXPECT_DOUBLE_EQ(c.real_or("missing", 2.0), 2.0);
  EXPECT_EQ(c.u64_or("missing", 7u), 7u);
  EXPECT_THROW(c.get("missing"), std::exception);
  EXPECT_THROW(c.real("name"), std::exception);
}

TEST(Config, RejectsMalformedLines) {
  EXPECT_THROW(Config::parse("no equals sign\n"), std::exception);
  EXPECT_THROW(Config::parse(" = 3\n"), std::exception);
}

TEST(Config, HashIgnoresOrderAndComments) {
  const Config a = Config::parse("x = 1\ny = 2\n");
  const Config b = Config::parse("# c\ny = 2   # d\n\nx = 1\n");
  const Config c = Config::parse("x = 1\ny = 3\n");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash(), git_blob_hash(a.canonical()));
}

// Values from `git hash-object`.
TEST(Manifest, GitBlobHash) {
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Manifest, JsonIsDeterministic) {
  RunManifest m;
  m.command = "sweep";
  m.seed = 3;
  m.config_hash = "abc";
  m.fields = {{"k", "v"}};
  m.outputs = {"results.csv"};
  const std::string a = manifest_json(m);
  EXPECT_EQ(a, manifest_json(m));
  EXPECT_NE(a.find("\"config_hash\""), std::string::npos);
  EXPECT_NE(a.find("results.csv"), std::string::npos);
}

TEST(LoadTarget, Families) {
  {
    const TargetConfig t = load_target(Config::parse(
        "family = gaussian_mixture\nweights = 0.5, 0.5\nmeans = -1, 0; 1, 0\n"
        "vars = 0.25, 0.25\nc = 1, 0.5\n"));
    const auto& m = std::get<GaussianMixture>(t.target);
    EXPECT_EQ(m.components(), 2);
    EXPECT_DOUBLE_EQ(m.vars[1][1], 0.25);
    EXPECT_TRUE(t.space.tail_matches_base());
  }
  {
    const TargetConfig t = load_target(Config::parse(
        "family = mollified_cloud\natoms = -1; 1\nweights = 0.5, 0.5\nsigma = 0.5\n"
        "c = 1\nstopping_delta = 0.1\n"));
    const auto& cl = std::get<MollifiedPointCloud>(t.target);
    EXPECT_DOUBLE_EQ(cl.diameter, 2.0);
    EXPECT_DOUBLE_EQ(cl.sigma2, 0.25);
  }
  {
    const TargetConfig t = load_target(Config::parse(
        "family = linear_gaussian_posterior\nG = 1, 0; 0, 1\nnoise = 0.5, 0.5\n"
        "y = 1, -1\nc = 1, 1\n"));
    EXPECT_EQ(dim(t.target), 2);
  }
  {
    const TargetConfig t = load_target(Config::parse(
        "family = symmetric_product\nc_profile = inverse_square\ndim = 4\nc_trace = 2\n"));
    EXPECT_EQ(dim(t.target), 4);
    EXPECT_NEAR(t.space.trace_c(), 2.0, 1e-12);
    EXPECT_GT(t.space.c()[0], t.space.c()[3]);
  }
  EXPECT_THROW(load_target(Config::parse("family = nope\nc = 1\n")), std::exception);
}

TEST(SymmetricProduct, FactorShape) {
  Vec c(2);
  c << 1.0, 0.25;
  const ProductMixture p = symmetric_product(c, 2.0);
  ASSERT_EQ(p.dim(), 2);
  EXPECT_DOUBLE_EQ(p.factors[1].means[1], 2.0 * 0.5);
  EXPECT_DOUBLE_EQ(p.factors[1].vars[0], 0.25);
  EXPECT_DOUBLE_EQ(p.factors[0].weights[0], 0.5);
}

TEST(Fit, ExactLineAndLeaveOneOut) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 - 2.0 * v);
  const LineFit f = fit_line(x, y);
  EXPECT_NEAR(f.slope, -2.0, 1e-13);
  EXPECT_NEAR(f.intercept, 3.0, 1e-13);
  EXPECT_NEAR(f.ci_low, -2.0, 1e-12);
  EXPECT_NEAR(f.ci_high, -2.0, 1e-12);
  EXPECT_EQ(f.n, 5);
  const LineFit three = fit_line({1, 2, 3}, {1, 2, 3.5});
  EXPECT_TRUE(std::isnan(three.ci_low));
  std::vector<double> py;
  for (double v : x) py.push_back(0.5 * std::pow(v, 1.5));
  EXPECT_NEAR(fit_loglog(x, py).slope, 1.5, 1e-12);
  std::vector<double> ey;
  for (double v : x) ey.push_back(4.0 * std::exp(-0.7 * v));
  EXPECT_NEAR(fit_semilog(x, ey).slope, -0.7, 1e-12);
}

TEST(Fit, NoisyLineCiBracketsSlope) {
  const std::vector<double> x{0, 1, 2, 3, 4, 5, 6};
  const std::vector<double> y{0.1, 0.9, 2.2, 2.8, 4.1, 5.0, 5.9};
  const LineFit f = fit_line(x, y);
  EXPECT_LE(f.ci_low, f.slope);
  EXPECT_GE(f.ci_high, f.slope);
  EXPECT_NEAR(f.slope, 1.0, 0.1);
}

TEST(Svg, ChartContainsSeries) {
  ChartSpec spec;
  spec.title = "t";
  spec.log_x = spec.log_y = true;
  spec.series.push_back({"w2", {0.1, 0.2, 0.4}, {1e-3, 4e-3, 1.6e-2}});
  const std::string s = line_chart(spec);
  EXPECT_NE(s.find("<svg"), std::string::npos);
  EXPECT_NE(s.find("w2"), std::string::npos);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
}

const char* kTauSweep =
    "experiment = tau_sweep\nfamily = gaussian_mixture\nmeans = 2\nvars = 0.5\n"
    "c = 1\na = 0.5\ngrid = 0.2, 0.1, 0.05, 0.025\nT = 8\nseed = 3\n";

TEST(Experiments, ResultsAreByteIdentical) {
  const ExperimentSpec spec = experiment_from_config(Config::parse(kTauSweep));
  const ExperimentResult a = run_experiment(spec, 1);
  const ExperimentResult b = run_experiment(spec, 4);
  EXPECT_EQ(a.table().str(), b.table().str());
  EXPECT_TRUE(a.ok());
  ASSERT_EQ(a.rows.size(), 4u);
  EXPECT_EQ(a.table().rows().front().front(), spec.config_hash);
  bool slope = false;
  for (const auto& s : a.summary) {
    if (s.name == "tau_slope") {
      slope = true;
      EXPECT_NEAR(s.value, 1.0, 0.05);
    }
  }
  EXPECT_TRUE(slope);
  for (const auto& r : a.rows) EXPECT_GE(r.margin, 0.0);
}

TEST(Experiments, WritesOutputDirectory) {
  const ExperimentSpec spec = experiment_from_config(Config::parse(kTauSweep));
  const auto dir = std::filesystem::temp_directory_path() / "heatscore_harness_test";
  std::filesystem::remove_all(dir);
  write_experiment(run_experiment(spec, 2), dir.string());
  for (const char* f : {"results.csv", "timings.csv", "chart.svg", "manifest.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream in(dir / "manifest.json");
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_NE(buf.str().find(spec.config_hash), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Experiments, FailedPointIsRecorded) {
  const ExperimentSpec spec = experiment_from_config(Config::parse(
      "experiment = T_sweep\nfamily = gaussian_mixture\nmeans = 2\nvars = 0.5\nc = 1\n"
      "grid = 2, 0\ntau = 0.05\n"));
  const ExperimentResult r = run_experiment(spec, 1);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].status, "ok");
  EXPECT_EQ(r.rows[1].status.rfind("failed", 0), 0u);
  EXPECT_FALSE(r.ok());
}

TEST(Experiments, TagsRoundTrip) {
  for (auto tag : {ExperimentTag::kTauSweep, ExperimentTag::kTSweep, ExperimentTag::kEpsSweep,
                   ExperimentTag::kDimSweep, ExperimentTag::kTraceFixedDimSweep,
                   ExperimentTag::kBoundAudit, ExperimentTag::kBayesDemo,
                   ExperimentTag::kKlVsW2}) {
    EXPECT_EQ(parse_experiment_tag(to_string(tag)), tag);
  }
  EXPECT_THROW(parse_experiment_tag("bogus"), std::exception);
}

TEST(Acceptance, MutatedSchemeFailsStationarity) {
  AcceptanceOptions opt;
  opt.only = {1};
  opt.enforce_runtime = false;
  EXPECT_TRUE(run_acceptance(opt).all_passed());
  opt.mutation.drift_alpha_shift = 1;
  const AcceptanceReport rep = run_acceptance(opt);
  ASSERT_EQ(rep.results.size(), 1u);
  EXPECT_FALSE(rep.results[0].passed);
  EXPECT_NE(format_line(rep.results[0]).find("[FAIL]"), std::string::npos);
}

TEST(Acceptance, AuditHoldsUnderInjectedScoreError) {
  AcceptanceOptions opt;
  opt.only = {9};
  opt.enforce_runtime = false;
  opt.inject_eps = 0.1;
  const AcceptanceReport rep = run_acceptance(opt);
  ASSERT_EQ(rep.results.size(), 1u);
  EXPECT_TRUE(rep.results[0].passed) << format_line(rep.results[0]);
  EXPECT_EQ(rep.to_csv().rows().size(), 1u);
  EXPECT_NE(rep.to_json().find("\"id\""), std::string::npos);
}

TEST(Acceptance, CriterionNames) {
  for (int id = 1; id <= kCriterionCount; ++id) EXPECT_FALSE(criterion_name(id).empty());
}

}  // namespace
}  // namespace heatscore::harness
