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

// sync: command-line front end.
//
//   sync simulate --group so3 --n 400 --p 0.15 --q 1 --sigma 0 --seed 42 [--round] --out FILE
//   sync experiment <preset> --group G --n N --q Q --trials T --seed S --out DIR [--plot]
//   sync rmt-check --group G --n N --p P --q Q --sigma S --seed S --out DIR
//   sync schur-check --group G --samples N [--seed S]
//
// Exit status: 0 ok, 2 configuration error, 3 compute or I/O failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsync/harness/config.hpp"
#include "gsync/harness/experiment.hpp"
#include "gsync/harness/export.hpp"
#include "gsync/harness/plot.hpp"
#include "gsync/harness/trial.hpp"
#include "gsync/instance.hpp"
#include "gsync/rmt.hpp"
#include "gsync/sync_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;

using gsync::harness::ExperimentConfig;

struct ModelFlags {
  std::string group = "so3";
  std::int64_t n = 400;
  double p = 1.0;
  double q = 1.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--group", group, "group name (z2, z3, u1, u2, su2, so3, o3, ...)");
    app->add_option("--n", n, "number of group elements");
    app->add_option("--p", p, "probability that an observed pair is clean");
    app->add_option("--q", q, "probability that a pair is observed");
    app->add_option("--sigma", sigma, "additive noise level");
    app->add_option("--seed", seed, "base seed");
  }

  gsync::ModelParams params() const {
    gsync::ModelParams m;
    try {
      m.group = gsync::GroupSpec::parse(group);
    } catch (const gsync::InvalidArgument& e) {
      throw gsync::ConfigError(e.what());
    }
    m.n = n;
    m.p = p;
    m.q = q;
    m.sigma = sigma;
    m.seed = seed;
    try {
      m.validate();
    } catch (const gsync::InvalidArgument& e) {
      throw gsync::ConfigError(e.what());
    }
    return m;
  }
};

int run_simulate(const ModelFlags& flags, bool round, const std::string& out,
                 const std::string& dump) {
  const gsync::ModelParams params = flags.params();
  gsync::harness::TrialOptions options;
  options.with_rounding = round;
  if (round && params.group.kind() == gsync::GroupKind::SpecialUnitary && params.group.dim() != 2) {
    throw gsync::ConfigError("blockwise rounding is not available for " + params.group.name());
  }
  gsync::harness::TrialOutcome outcome = gsync::harness::run_trial(params, options);
  if (!dump.empty()) {
    gsync::with_scalar(params.group, [&]<typename S>(std::type_identity<S>) {
      gsync::write_sync_dump(gsync::generate_instance<S>(params), dump);
    });
  }
  const bool failed = outcome.diagnostics.failed;
  if (failed) std::cerr << "sync: solver failure: " << outcome.diagnostics.failure << '\n';
  const std::string csv = gsync::harness::to_csv({outcome.record});
  if (out.empty() || out == "-") {
    std::cout << csv;
  } else {
    gsync::harness::detail::write_text(out, csv);
  }
  return failed ? kExitCompute : kExitOk;
}

int run_experiment_cmd(ExperimentConfig cfg) {
  const gsync::harness::ExperimentResult result = gsync::harness::run_experiment(cfg);
  for (const auto& w : result.warnings) std::cerr << "sync: warning: " << w << '\n';
  const std::filesystem::path dir = cfg.out_dir;
  gsync::harness::export_results(result, gsync::harness::ExportFormat::Csv, dir);
  gsync::harness::export_results(result, gsync::harness::ExportFormat::Json, dir);
  if (cfg.plot) gsync::harness::emit_plot(result, dir);
  const std::size_t failed = result.failed_count();
  if (failed > 0) {
    std::cerr << "sync: " << failed << " trial(s) failed; see nan rows in results.csv\n";
    return kExitCompute;
  }
  return kExitOk;
}

int run_rmt_check(const ModelFlags& flags, const std::string& out) {
  const gsync::ModelParams params = flags.params();
  if (params.tau_squared() <= 0.0) {
    throw gsync::ConfigError("rmt-check: q (1 - p + sigma^2) must be > 0");
  }
  gsync::EmpiricalSpectralDistribution e;
  gsync::with_scalar(params.group, [&]<typename S>(std::type_identity<S>) {
    e = gsync::esd(gsync::assemble_noise_matrix<S>(params), params.group.dim());
  });
  const double ks = gsync::ks_to_semicircle(e);
  const auto [lo, hi] = gsync::edge_eigenvalues(e);

  const std::filesystem::path dir = out;
  std::string csv = "eigenvalue\n";
  for (double v : e.eigenvalues) csv += gsync::harness::format_double(v) + '\n';
  gsync::harness::detail::write_text(dir / "eigenvalues.csv", csv);
  const nlohmann::json summary = {{"ks", ks},
                                  {"lambda_min", lo},
                                  {"lambda_max", hi},
                                  {"n", params.n},
                                  {"d", params.group.dim()},
                                  {"group", params.group.name()},
                                  {"seed", params.seed}};
  gsync::harness::detail::write_text(dir / "summary.json", summary.dump(2) + '\n');
  std::cout << summary.dump() << '\n';
  return kExitOk;
}

int run_schur_check(const std::string& group, std::size_t samples, std::uint64_t seed) {
  gsync::GroupSpec spec = gsync::GroupSpec::special_orthogonal(3);
  try {
    spec = gsync::GroupSpec::parse(group);
  } catch (const gsync::InvalidArgument& e) {
    throw gsync::ConfigError(e.what());
  }
  if (samples < 2) throw gsync::ConfigError("schur-check: --samples must be >= 2");
  const gsync::MomentReport r = gsync::schur_orthogonality_check(spec, samples, seed);
  const int dd = r.d * r.d;
  nlohmann::json second = nlohmann::json::array();
  nlohmann::json cov_re = nlohmann::json::array();
  for (int i = 0; i < r.d; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < r.d; ++j) row.push_back(r.second_moment(i, j));
    second.push_back(row);
  }
  for (int a = 0; a < dd; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (int b = 0; b < dd; ++b) row.push_back(r.covariance(a, b).real());
    cov_re.push_back(row);
  }
  const nlohmann::json report = {{"group", r.group},
                                 {"samples", r.samples},
                                 {"seed", seed},
                                 {"d", r.d},
                                 {"max_mean_z", r.max_mean_z()},
                                 {"expected_second_moment", 1.0 / r.d},
                                 {"second_moment", second},
                                 {"covariance_real", cov_re},
                                 {"max_offdiagonal_covariance", r.max_offdiagonal_covariance()}};
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral group synchronization simulator"};
  app.require_subcommand(1);

  // simulate
  ModelFlags sim_flags;
  bool sim_round = false;
  std::string sim_out, sim_dump;
  CLI::App* sim = app.add_subcommand("simulate", "run one trial and write its record as CSV");
  sim_flags.attach(sim);
  sim->add_flag("--round", sim_round, "also perform blockwise rounding");
  sim->add_option("--out", sim_out, "output CSV file ('-' for stdout)");
  sim->add_option("--dump", sim_dump, "also write the measurement matrix as a SYNC1 file");

  // experiment
  std::string exp_preset, exp_config, exp_group, exp_out, exp_sweep;
  std::int64_t exp_n = 0;
  int exp_trials = 0, exp_threads = 0;
  double exp_q = 0, exp_p = 0, exp_sigma = 0, exp_gamma = 0;
  std::uint64_t exp_seed = 0;
  std::vector<double> exp_grid;
  bool exp_plot = false, exp_round = false, exp_timing = false;
  CLI::App* exp = app.add_subcommand("experiment", "run a preset Monte Carlo sweep");
  exp->add_option("preset", exp_preset,
                  "threshold, corruption_range, sparsity, convergence, rounding, "
                  "additive_noise or custom");
  exp->add_option("--config", exp_config, "key = value config file");
  exp->add_option("--group", exp_group);
  exp->add_option("--n", exp_n);
  exp->add_option("--q", exp_q);
  exp->add_option("--p", exp_p);
  exp->add_option("--sigma", exp_sigma);
  exp->add_option("--gamma", exp_gamma, "convergence preset: p = gamma / sqrt(n)");
  exp->add_option("--trials", exp_trials);
  exp->add_option("--seed", exp_seed);
  exp->add_option("--sweep", exp_sweep, "custom preset: p, q, sigma or n");
  exp->add_option("--grid", exp_grid, "sweep grid values")->delimiter(',');
  exp->add_option("--threads", exp_threads, "worker threads");
  exp->add_option("--out", exp_out, "output directory");
  exp->add_flag("--plot", exp_plot, "emit SVG charts");
  exp->add_flag("--round", exp_round, "enable blockwise rounding");
  exp->add_flag("--timing", exp_timing, "record wall_seconds (breaks byte-identical reruns)");

  // rmt-check
  ModelFlags rmt_flags;
  rmt_flags.p = 0.0;
  std::string rmt_out = ".";
  CLI::App* rmt = app.add_subcommand("rmt-check", "spectrum of the normalized noise matrix");
  rmt_flags.attach(rmt);
  rmt->add_option("--out", rmt_out, "output directory");

  // schur-check
  std::string schur_group = "so3";
  std::size_t schur_samples = 100000;
  std::uint64_t schur_seed = 1;
  CLI::App* schur = app.add_subcommand("schur-check", "Monte Carlo Haar moment report");
  schur->add_option("--group", schur_group);
  schur->add_option("--samples", schur_samples);
  schur->add_option("--seed", schur_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sim) return run_simulate(sim_flags, sim_round, sim_out, sim_dump);
    if (*rmt) return run_rmt_check(rmt_flags, rmt_out);
    if (*schur) return run_schur_check(schur_group, schur_samples, schur_seed);

    // Precedence: built-in defaults < config file < command-line flags.
    ExperimentConfig cfg;
    if (!exp_config.empty()) cfg = gsync::harness::load_config_file(exp_config, cfg);
    if (exp->count("preset")) cfg.preset = gsync::harness::parse_preset(exp_preset);
    else if (exp_config.empty()) throw gsync::ConfigError("experiment: missing preset");
    if (exp->count("--group")) cfg.group = exp_group;
    if (exp->count("--n")) cfg.n = exp_n;
    if (exp->count("--q")) cfg.q = exp_q;
    if (exp->count("--p")) cfg.p = exp_p;
    if (exp->count("--sigma")) cfg.sigma = exp_sigma;
    if (exp->count("--gamma")) cfg.gamma = exp_gamma;
    if (exp->count("--trials")) cfg.trials = exp_trials;
    if (exp->count("--seed")) cfg.seed = exp_seed;
    if (exp->count("--sweep")) cfg.sweep = exp_sweep;
    if (exp->count("--grid")) cfg.grid = exp_grid;
    if (exp->count("--threads")) cfg.threads = exp_threads;
    if (exp->count("--out")) cfg.out_dir = exp_out;
    if (exp_plot) cfg.plot = true;
    if (exp_round) cfg.with_rounding = true;
    if (exp_timing) cfg.record_timing = true;
    return run_experiment_cmd(cfg);
  } catch (const gsync::ConfigError& e) {
    std::cerr << "sync: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gsync::InvalidArgument& e) {
    std::cerr << "sync: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "sync: failure: " << e.what() << '\n';
    return kExitCompute;
  }
}
