/*
 * Copyright (c) 2026, The gsync Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "gsync/harness/config.hpp"
#include "gsync/harness/experiment.hpp"
#include "gsync/harness/export.hpp"
#include "gsync/harness/plot.hpp"
#include "gsync/harness/trial.hpp"

namespace gsync::harness {
namespace {

ModelParams make(const char* group, std::int64_t n, double p, double q, double sigma,
                 std::uint64_t seed) {
  ModelParams m;
  m.group = GroupSpec::parse(group);
  m.n = n;
  m.p = p;
  m.q = q;
  m.sigma = sigma;
  m.seed = seed;
  return m;
}

ExperimentConfig small_config(Preset preset) {
  ExperimentConfig c;
  c.preset = preset;
  c.group = "z2";
  c.n = 60;
  c.trials = 3;
  c.seed = 11;
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gsync_harness_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool same_double(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

TEST(RunTrial, NoiselessZ2IsExact) {
  TrialOptions opts;
  opts.with_rounding = true;
  const auto out = run_trial(make("z2", 50, 1, 1, 0, 1), opts);
  EXPECT_FALSE(out.diagnostics.failed);
  EXPECT_NEAR(out.record.mse_proxy, 0.0, 1e-12);
  EXPECT_NEAR(out.record.mse_rounded, 0.0, 1e-12);
  EXPECT_NEAR(out.record.rounding_error, 0.0, 1e-12);
  EXPECT_EQ(out.record.d, 1);
  EXPECT_EQ(out.record.group, "z2");
}

TEST(RunTrial, So3AboveThresholdHasModerateProxy) {
  const auto out = run_trial(make("so3", 400, 3.0 / 20.0, 1, 0, 3));
  EXPECT_GE(out.record.mse_proxy, 0.3);
  EXPECT_LE(out.record.mse_proxy, 1.1);
  const double gamma = 3.0 / std::sqrt(0.85);  // p sqrt(qn) / sqrt(1 - p + sigma^2)
  EXPECT_NEAR(out.record.gamma_nominal, gamma, 1e-12);
  EXPECT_NEAR(out.record.theory_mse, 6.0 / (gamma * gamma), 1e-12);
  EXPECT_TRUE(std::isnan(out.record.mse_rounded));
  EXPECT_EQ(out.record.wall_seconds, 0.0);
}

TEST(RunTrial, RerunIsBitIdentical) {
  TrialOptions opts;
  opts.with_rounding = true;
  const auto a = run_trial(make("u2", 80, 0.3, 0.7, 0.4, 9), opts);
  const auto b = run_trial(make("u2", 80, 0.3, 0.7, 0.4, 9), opts);
  EXPECT_EQ(csv_row(a.record), csv_row(b.record));
}

TEST(RunTrial, SolverFailureIsFlaggedNotThrown) {
  TrialOptions opts;
  opts.solver.dense_limit = 0;
  opts.solver.max_restarts = 0;
  opts.solver.max_basis = 4;
  opts.solver.residual_tolerance = 1e-300;
  const auto out = run_trial(make("so3", 200, 0.2, 1, 0.5, 2), opts);
  EXPECT_TRUE(out.diagnostics.failed);
  EXPECT_FALSE(out.diagnostics.failure.empty());
  EXPECT_TRUE(std::isnan(out.record.mse_proxy));
}

TEST(Presets, NamesRoundTrip) {
  for (Preset p : {Preset::Threshold, Preset::CorruptionRange, Preset::Sparsity, Preset::Convergence,
                   Preset::Rounding, Preset::AdditiveNoise, Preset::Custom}) {
    EXPECT_EQ(parse_preset(preset_name(p)), p);
  }
  EXPECT_EQ(parse_preset("additive-noise"), Preset::AdditiveNoise);
  EXPECT_THROW(parse_preset("bogus"), ConfigError);
}

TEST(BuildGrid, ThresholdScalesByCriticalGamma) {
  ExperimentConfig c = small_config(Preset::Threshold);
  c.n = 400;
  c.q = 0.25;
  const auto pts = build_grid(c);
  ASSERT_FALSE(pts.empty());
  for (const auto& pt : pts) {
    EXPECT_NEAR(pt.params.p, pt.x / 20.0, 1e-12);
    EXPECT_EQ(pt.params.q, 0.25);
  }
  EXPECT_NEAR(pts.front().x, 0.25 * 2.0, 1e-12);
  EXPECT_NEAR(pts.back().x, 3.0 * 2.0, 1e-12);
}

TEST(BuildGrid, CorruptionRangeExponents) {
  ExperimentConfig c = small_config(Preset::CorruptionRange);
  const auto pts = build_grid(c);
  ASSERT_EQ(pts.size(), 11u);
  EXPECT_NEAR(pts.front().params.p, 1.0, 1e-12);
  EXPECT_NEAR(pts.back().params.p, 1.0 / 60.0, 1e-12);
}

TEST(BuildGrid, SparsityKeepsProductAndBounds) {
  ExperimentConfig c = small_config(Preset::Sparsity);
  c.n = 400;
  const auto pts = build_grid(c);
  ASSERT_FALSE(pts.empty());
  for (const auto& pt : pts) {
    EXPECT_NEAR(pt.params.p * std::sqrt(pt.params.q * 400.0), 2.0, 1e-9);
    EXPECT_LE(pt.params.p, 1.0 + 1e-12);
  }
  c.grid = {0.99};
  EXPECT_THROW(build_grid(c), ConfigError);
}

TEST(BuildGrid, AdditiveNoiseSigmaRecoversGamma) {
  ExperimentConfig c = small_config(Preset::AdditiveNoise);
  c.n = 400;
  const auto pts = build_grid(c);
  EXPECT_EQ(pts.size(), 18u);
  for (const auto& pt : pts) {
    const Beta b = beta(pt.params.p, pt.params.q, pt.params.sigma, 400.0);
    EXPECT_NEAR(b.gamma, pt.x, 1e-9) << pt.series;
  }
  c.p = 0.05;  // p^2 n / gamma^2 + p - 1 < 0 for every gamma
  EXPECT_THROW(build_grid(c), ConfigError);
}

TEST(BuildGrid, RejectsBadConfigurations) {
  ExperimentConfig custom = small_config(Preset::Custom);
  custom.sweep = "p";
  EXPECT_THROW(build_grid(custom), ConfigError);
  custom.grid = {0.1, 0.2};
  EXPECT_EQ(build_grid(custom).size(), 2u);
  custom.sweep = "tau";
  EXPECT_THROW(build_grid(custom), ConfigError);

  ExperimentConfig su3 = small_config(Preset::Rounding);
  su3.group = "su3";
  EXPECT_THROW(build_grid(su3), ConfigError);

  ExperimentConfig bad_trials = small_config(Preset::Threshold);
  bad_trials.trials = 0;
  EXPECT_THROW(build_grid(bad_trials), ConfigError);
  ExperimentConfig bad_group = small_config(Preset::Threshold);
  bad_group.group = "sl3";
  EXPECT_THROW(build_grid(bad_group), ConfigError);
}

TEST(RunExperiment, AggregatesMatchRecomputation) {
  ExperimentConfig c = small_config(Preset::Custom);
  c.sweep = "p";
  c.grid = {0.2, 0.6};
  c.with_rounding = true;
  const auto r = run_experiment(c);
  ASSERT_EQ(r.records.size(), 6u);
  ASSERT_EQ(r.aggregates.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    double sum = 0, lo = 1e300, hi = -1e300, rsum = 0, dev = 0;
    for (std::size_t t = 0; t < 3; ++t) {
      const auto& rec = r.records[k * 3 + t];
      EXPECT_EQ(rec.seed, 11u + t);
      EXPECT_EQ(rec.preset, "custom");
      sum += rec.mse_proxy;
      lo = std::min(lo, rec.mse_proxy);
      hi = std::max(hi, rec.mse_proxy);
      rsum += rec.mse_rounded;
      dev += std::pow(rec.mse_proxy - r.points[k].reference_mse, 2);
    }
    const auto& a = r.aggregates[k];
    EXPECT_EQ(a.count, 3u);
    EXPECT_NEAR(a.mean_mse_proxy, sum / 3, 1e-12);
    EXPECT_EQ(a.min_mse_proxy, lo);
    EXPECT_EQ(a.max_mse_proxy, hi);
    EXPECT_NEAR(a.mean_mse_rounded, rsum / 3, 1e-12);
    EXPECT_NEAR(a.mean_sq_dev_proxy, dev / 3, 1e-12);
  }
  EXPECT_EQ(r.sweep_variable, "p");
  EXPECT_EQ(r.failed_count(), 0u);
}

TEST(RunExperiment, IndependentOfThreadCount) {
  ExperimentConfig c = small_config(Preset::Threshold);
  c.n = 40;
  c.trials = 4;
  const auto one = run_experiment(c);
  c.threads = 8;
  const auto eight = run_experiment(c);
  EXPECT_EQ(to_csv(one.records), to_csv(eight.records));
}

TEST(RunExperiment, WarnsOnSparseGridPoints) {
  ExperimentConfig c = small_config(Preset::Custom);
  c.trials = 1;
  c.sweep = "p";
  c.grid = {0.05, 1.0};
  const auto r = run_experiment(c);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("log^2"), std::string::npos);
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw ComputeError("boom"); }),
               ComputeError);
}

TEST(Csv, EmptyIsHeaderOnly) {
  const std::string s = to_csv({});
  EXPECT_EQ(s, csv_header() + "\n");
  EXPECT_EQ(s.find("lambda_{d+1}") != std::string::npos, true);
}

TEST(Csv, SingleTrialRoundTrips) {
  TrialOptions opts;
  opts.with_rounding = true;
  const auto out = run_trial(make("so3", 30, 0.4, 0.8, 0.3, 4), opts);
  const std::string text = to_csv({out.record});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  const auto back = parse_csv(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(csv_row(back[0]), csv_row(out.record));
  EXPECT_EQ(back[0].mse_proxy, out.record.mse_proxy);
  EXPECT_EQ(back[0].seed, 4u);
}

TEST(Csv, NonFiniteSpelledOut) {
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_TRUE(std::isnan(parse_double("nan")));
  EXPECT_EQ(parse_double("-inf"), -std::numeric_limits<double>::infinity());
  const double third = 1.0 / 3.0;
  EXPECT_EQ(parse_double(format_double(third)), third);

  TrialRecord r;
  r.group = "z2";
  r.eta = std::numeric_limits<double>::infinity();
  const auto back = parse_csv(to_csv({r}));
  EXPECT_TRUE(same_double(back[0].mse_proxy, r.mse_proxy));
  EXPECT_EQ(back[0].eta, r.eta);
}

TEST(Csv, RejectsMalformedInput) {
  EXPECT_THROW(parse_csv("a,b\n"), InvalidArgument);
  EXPECT_THROW(parse_csv(csv_header() + "\n1,2,3\n"), InvalidArgument);
}

TEST(Json, EchoesConfigAndRecords) {
  ExperimentConfig c = small_config(Preset::Custom);
  c.trials = 2;
  c.sweep = "q";
  c.grid = {0.5};
  const auto r = run_experiment(c);
  const auto j = result_json(r);
  EXPECT_EQ(j["config"]["preset"], "custom");
  EXPECT_EQ(j["config"]["n"], 60);
  EXPECT_EQ(j["config"]["grid"].size(), 1u);
  EXPECT_EQ(j["sweep_variable"], "q");
  EXPECT_EQ(j["records"].size(), 2u);
  EXPECT_EQ(j["aggregates"].size(), 1u);
  EXPECT_TRUE(j["records"][0]["mse_rounded"].is_string());
  EXPECT_EQ(j["records"][0]["mse_rounded"], "nan");
}

TEST(Export, WritesFilesAndCreatesDirectories) {
  const auto dir = scratch("export") / "nested";
  ExperimentConfig c = small_config(Preset::Custom);
  c.trials = 1;
  c.sweep = "p";
  c.grid = {0.5};
  const auto r = run_experiment(c);
  const auto csv = export_results(r, ExportFormat::Csv, dir);
  const auto json = export_results(r, ExportFormat::Json, dir);
  EXPECT_EQ(slurp(csv), to_csv(r.records));
  EXPECT_EQ(nlohmann::json::parse(slurp(json))["records"].size(), 1u);
}

TEST(Config, ParsesKeysAndComments) {
  const auto c = parse_config_text(
      "# comment\npreset = additive_noise\n group=u2 \nn = 120  # trailing\n"
      "grid = 0.5, 1.5\np = 0.3\nrounding = true\nseed = 9\n\n");
  EXPECT_EQ(c.preset, Preset::AdditiveNoise);
  EXPECT_EQ(c.group, "u2");
  EXPECT_EQ(c.n, 120);
  ASSERT_EQ(c.grid.size(), 2u);
  EXPECT_EQ(c.grid[1], 1.5);
  EXPECT_EQ(*c.p, 0.3);
  EXPECT_TRUE(c.with_rounding);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.trials, 20);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config_text("colour = red\n"), ConfigError);
  EXPECT_THROW(parse_config_text("n = many\n"), ConfigError);
  EXPECT_THROW(parse_config_text("just text\n"), ConfigError);
  EXPECT_THROW(parse_config_text("seed = -1\n"), ConfigError);
  EXPECT_THROW(load_config_file("/nonexistent/gsync.cfg"), ConfigError);
}

TEST(Config, OverlaysOnBase) {
  ExperimentConfig base;
  base.n = 77;
  base.group = "z3";
  const auto c = parse_config_text("group = o3\n", base);
  EXPECT_EQ(c.n, 77);
  EXPECT_EQ(c.group, "o3");
}

TEST(Plot, ThresholdLineSitsAtOne) {
  ExperimentConfig c = small_config(Preset::AdditiveNoise);
  c.trials = 1;
  c.p = 1.0;
  c.grid = {0.5, 2.0};
  const auto r = run_experiment(c);
  const auto charts = chart_data(r);
  ASSERT_EQ(charts.size(), 1u);
  ASSERT_TRUE(charts[0].threshold_x.has_value());
  EXPECT_EQ(*charts[0].threshold_x, 1.0);
  EXPECT_EQ(charts[0].scatter.size(), 2u);
  const std::string svg = render_svg(charts[0]);
  EXPECT_NE(svg.find("class=\"threshold\""), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(svg.find("class=\"theory\""), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Plot, SinglePointChartIsFinite) {
  ChartData c;
  c.title = "one & only";
  c.scatter = {{1.0, 0.5}};
  c.mean = {{1.0, 0.5}};
  const std::string svg = render_svg(c);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
  EXPECT_NE(svg.find("one &amp; only"), std::string::npos);
}

TEST(Plot, ConvergenceUsesLogScale) {
  ExperimentConfig c = small_config(Preset::Convergence);
  c.trials = 1;
  c.grid = {50, 100};
  const auto r = run_experiment(c);
  const auto charts = chart_data(r);
  ASSERT_EQ(charts.size(), 1u);
  EXPECT_TRUE(charts[0].log_y);
  EXPECT_NE(render_svg(charts[0]).find("log scale"), std::string::npos);
}

TEST(Plot, NonSweepResultIsUnsupported) {
  ExperimentConfig c = small_config(Preset::Custom);
  const auto r = single_trial_result(c, run_trial(make("z2", 20, 0.5, 1, 0, 1)));
  EXPECT_THROW(chart_data(r), Unsupported);
}

TEST(Plot, EmitWritesOneFilePerSeries) {
  const auto dir = scratch("plot");
  ExperimentConfig c = small_config(Preset::AdditiveNoise);
  c.n = 100;
  c.trials = 1;
  c.grid = {1.0};
  const auto r = run_experiment(c);
  const auto paths = emit_plot(r, dir);
  EXPECT_EQ(paths.size(), 3u);
  for (const auto& p : paths) EXPECT_TRUE(std::filesystem::exists(p));
}

}  // namespace
}  // namespace gsync::harness
