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

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gsync/errors.hpp"
#include "gsync/harness/trial.hpp"
#include "gsync/metrics.hpp"

namespace gsync::harness {

enum class Preset { Threshold, CorruptionRange, Sparsity, Convergence, Rounding, AdditiveNoise, Custom };

inline std::string preset_name(Preset p) {
  switch (p) {
    case Preset::Threshold: return "threshold";
    case Preset::CorruptionRange: return "corruption_range";
    case Preset::Sparsity: return "sparsity";
    case Preset::Convergence: return "convergence";
    case Preset::Rounding: return "rounding";
    case Preset::AdditiveNoise: return "additive_noise";
    case Preset::Custom: return "custom";
  }
  return "?";
}

inline Preset parse_preset(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '-', '_');
  for (Preset p : {Preset::Threshold, Preset::CorruptionRange, Preset::Sparsity,
                   Preset::Convergence, Preset::Rounding, Preset::AdditiveNoise, Preset::Custom}) {
    if (preset_name(p) == s) return p;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

/**
 * Declarative sweep definition.
 *
 * Unset optionals fall back to the preset defaults: threshold and rounding
 * sweep gamma over multiples of 1/sqrt(q) with p = gamma/sqrt(n);
 * corruption_range sweeps e with p = n^-e; sparsity sweeps e with
 * q = n^-e and p = 2 n^(-1/2 + e/2); convergence sweeps n with p = 5/sqrt(n);
 * additive_noise sweeps gamma with sigma = sqrt(p^2 n / gamma^2 + p - 1)
 * for each p in {3/sqrt(n), 2/n^(1/4), 1} unless p is set.
 */
struct ExperimentConfig {
  Preset preset = Preset::Threshold;
  std::string group = "so3";
  std::int64_t n = 400;
  int trials = 20;
  std::string sweep;                  // custom preset: p, q, sigma or n
  std::vector<double> grid;           // empty: preset default
  std::optional<double> p;
  double q = 1.0;
  double sigma = 0.0;
  std::optional<double> gamma;        // convergence: p = gamma / sqrt(n)
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int threads = 1;
  bool with_rounding = false;         // forced on by the rounding preset
  bool record_timing = false;
  bool plot = false;
};

/// One point of a sweep, with the model parameters shared by its trials.
struct GridPoint {
  std::string series;      // e.g. "p=0.15" for additive_noise, else empty
  double x = 0.0;          // value of the sweep variable
  ModelParams params;      // seed filled per trial
  double gamma_nominal = 0.0;
  double reference_mse = 0.0;  // value that squared deviations are taken against
};

struct GridAggregate {
  std::string series;
  double x = 0.0;
  std::size_t count = 0;   // trials with finite mse_proxy
  double mean_mse_proxy = kNaN, min_mse_proxy = kNaN, max_mse_proxy = kNaN;
  double mean_phi_hat = kNaN, min_phi_hat = kNaN, max_phi_hat = kNaN;
  double mean_mse_rounded = kNaN, min_mse_rounded = kNaN, max_mse_rounded = kNaN;
  double mean_theory_mse = kNaN;
  double reference_mse = kNaN;
  double mean_sq_dev_proxy = kNaN;  // mean (mse_proxy - reference)^2
  double mean_sq_dev_phi = kNaN;    // mean (phi_hat - reference)^2
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string sweep_variable;       // empty for a single (non-sweep) run
  std::vector<GridPoint> points;
  std::vector<TrialRecord> records;          // sorted by (point, trial)
  std::vector<TrialDiagnostics> diagnostics; // parallel to records
  std::vector<GridAggregate> aggregates;     // one per point
  std::vector<std::string> warnings;

  std::size_t failed_count() const {
    return static_cast<std::size_t>(std::count_if(
        diagnostics.begin(), diagnostics.end(), [](const TrialDiagnostics& d) { return d.failed; }));
  }
};

namespace detail {

inline std::string format_value(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline std::vector<double> range_grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (int k = 0;; ++k) {
    const double v = lo + step * k;
    if (v > hi + 1e-12) break;
    g.push_back(std::round(v * 1e12) / 1e12);
  }
  return g;
}

inline double sweep_variable_value(const ModelParams& m, std::string_view var) {
  if (var == "p") return m.p;
  if (var == "q") return m.q;
  if (var == "sigma") return m.sigma;
  return static_cast<double>(m.n);
}

}  // namespace detail

inline std::string default_sweep_variable(const ExperimentConfig& c) {
  switch (c.preset) {
    case Preset::Threshold:
    case Preset::Rounding:
    case Preset::AdditiveNoise: return "gamma";
    case Preset::CorruptionRange:
    case Preset::Sparsity: return "e";
    case Preset::Convergence: return "n";
    case Preset::Custom: return c.sweep;
  }
  return "";
}

/// Expands and validates a config into grid points. Throws ConfigError on
/// any invalid combination, before anything is computed.
inline std::vector<GridPoint> build_grid(const ExperimentConfig& c) {
  GroupSpec group = GroupSpec::special_orthogonal(3);
  try {
    group = GroupSpec::parse(c.group);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (c.n < 2) throw ConfigError("n must be >= 2");
  if (c.trials < 1) throw ConfigError("trials must be >= 1");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (!(c.q > 0.0 && c.q <= 1.0)) throw ConfigError("q must lie in (0, 1]");
  if (!(c.sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
  if (c.p && !(*c.p >= 0.0 && *c.p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
  const bool rounding = c.with_rounding || c.preset == Preset::Rounding;
  if (rounding && group.kind() == GroupKind::SpecialUnitary && group.dim() != 2) {
    throw ConfigError("blockwise rounding is not available for " + group.name());
  }

  const double n = static_cast<double>(c.n);
  const double root_n = std::sqrt(n);
  const int d = group.dim();
  std::vector<GridPoint> points;

  auto base = [&] {
    ModelParams m;
    m.group = group;
    m.n = c.n;
    m.q = c.q;
    m.sigma = c.sigma;
    m.p = c.p.value_or(1.0);
    return m;
  };
  auto plug_in_theory = [&](const ModelParams& m) {
    return theoretical_limit_mse(beta(m.p, m.q, m.sigma, static_cast<double>(m.n)).gamma, d);
  };
  auto check_p = [&](double p, double x) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError(preset_name(c.preset) + ": grid value " + detail::format_value(x) +
                        " gives p = " + detail::format_value(p) + " outside [0, 1]");
    }
  };

  switch (c.preset) {
    case Preset::Threshold:
    case Preset::Rounding: {
      const double gamma_star = 1.0 / std::sqrt(c.q);
      std::vector<double> grid = c.grid;
      if (grid.empty()) {
        for (double mult : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0}) {
          grid.push_back(mult * gamma_star);
        }
      }
      for (double g : grid) {
        if (!(g >= 0.0)) throw ConfigError("gamma grid values must be >= 0");
        ModelParams m = base();
        m.p = g / root_n;
        check_p(m.p, g);
        points.push_back({"", g, m, g, plug_in_theory(m)});
      }
      break;
    }
    case Preset::CorruptionRange: {
      std::vector<double> grid = c.grid.empty() ? detail::range_grid(0.0, 1.0, 0.1) : c.grid;
      for (double e : grid) {
        if (!(e >= 0.0)) throw ConfigError("corruption_range exponents must be >= 0");
        ModelParams m = base();
        m.p = std::pow(n, -e);
        points.push_back({"", e, m, m.p * std::sqrt(m.q * n), plug_in_theory(m)});
      }
      break;
    }
    case Preset::Sparsity: {
      constexpr double kProduct = 2.0;  // sqrt(n) p sqrt(q) held fixed
      std::vector<double> grid = c.grid;
      if (grid.empty()) {
        const double e_max = 1.0 - std::log(kProduct * kProduct) / std::log(n);
        grid = detail::range_grid(0.0, e_max, 0.1);
      }
      for (double e : grid) {
        if (!(e >= 0.0)) throw ConfigError("sparsity exponents must be >= 0");
        ModelParams m = base();
        m.q = std::pow(n, -e);
        m.p = kProduct * std::pow(n, -0.5 + 0.5 * e);
        if (m.p > 1.0) {
          throw ConfigError("sparsity: exponent " + detail::format_value(e) +
                            " violates the fixed-product constraint (p = " +
                            detail::format_value(m.p) + " > 1)");
        }
        points.push_back({"", e, m, kProduct, plug_in_theory(m)});
      }
      break;
    }
    case Preset::Convergence: {
      const double gamma = c.gamma.value_or(5.0);
      std::vector<double> grid =
          c.grid.empty() ? std::vector<double>{50, 100, 200, 400, 800, 1200} : c.grid;
      for (double nv : grid) {
        if (!(nv >= 2.0) || nv != std::floor(nv)) throw ConfigError("convergence: n grid must hold integers >= 2");
        ModelParams m = base();
        m.n = static_cast<std::int64_t>(nv);
        m.p = gamma / std::sqrt(nv);
        check_p(m.p, nv);
        const double gamma_eff = gamma * std::sqrt(m.q);
        // The n -> infinity limit: beta_n -> 1 / (gamma sqrt(q)) as p -> 0.
        points.push_back({"", nv, m, gamma_eff, theoretical_limit_mse(gamma_eff, d)});
      }
      break;
    }
    case Preset::AdditiveNoise: {
      std::vector<double> grid = c.grid.empty() ? detail::range_grid(0.5, 3.0, 0.5) : c.grid;
      std::vector<double> ps;
      if (c.p) ps = {*c.p};
      else ps = {3.0 / root_n, 2.0 / std::pow(n, 0.25), 1.0};
      for (double p : ps) {
        check_p(p, p);
        for (double g : grid) {
          if (!(g > 0.0)) throw ConfigError("additive_noise: gamma must be > 0");
          const double s2 = p * p * n / (g * g) + p - 1.0;
          if (s2 < 0.0) {
            throw ConfigError("additive_noise: (p = " + detail::format_value(p) + ", gamma = " +
                              detail::format_value(g) + ") needs p^2 n / gamma^2 + p - 1 >= 0");
          }
          ModelParams m = base();
          m.p = p;
          m.sigma = std::sqrt(s2);
          points.push_back({"p=" + detail::format_value(p), g, m, g, plug_in_theory(m)});
        }
      }
      break;
    }
    case Preset::Custom: {
      const std::string& var = c.sweep;
      if (var != "p" && var != "q" && var != "sigma" && var != "n") {
        throw ConfigError("custom preset needs sweep = p, q, sigma or n");
      }
      if (c.grid.empty()) throw ConfigError("custom preset needs a non-empty grid");
      for (double v : c.grid) {
        ModelParams m = base();
        if (var == "p") m.p = v;
        else if (var == "q") m.q = v;
        else if (var == "sigma") m.sigma = v;
        else m.n = static_cast<std::int64_t>(v);
        try {
          m.validate();
        } catch (const InvalidArgument& e) {
          throw ConfigError(std::string("custom grid: ") + e.what());
        }
        const double g = beta(m.p, m.q, m.sigma, static_cast<double>(m.n)).gamma;
        points.push_back({"", detail::sweep_variable_value(m, var), m, g, plug_in_theory(m)});
      }
      break;
    }
  }
  if (points.empty()) throw ConfigError("sweep grid is empty");
  return points;
}

/// Runs fn(i) for i in [0, count) on `width` threads. The first exception
/// thrown by any task is rethrown after all threads join.
inline void parallel_for(std::size_t count, int width, const std::function<void(std::size_t)>& fn) {
  if (width <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(width), count);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

namespace detail {

inline void aggregate(ExperimentResult& result) {
  const auto trials = static_cast<std::size_t>(result.config.trials);
  result.aggregates.clear();
  for (std::size_t pi = 0; pi < result.points.size(); ++pi) {
    const GridPoint& pt = result.points[pi];
    GridAggregate a;
    a.series = pt.series;
    a.x = pt.x;
    a.reference_mse = pt.reference_mse;
    auto summarize = [&](auto field, double& mean, double& lo, double& hi) {
      double sum = 0.0;
      std::size_t k = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        const double v = field(result.records[pi * trials + t]);
        if (!std::isfinite(v)) continue;
        sum += v;
        lo = k == 0 ? v : std::min(lo, v);
        hi = k == 0 ? v : std::max(hi, v);
        ++k;
      }
      if (k > 0) mean = sum / static_cast<double>(k);
      return k;
    };
    a.count = summarize([](const TrialRecord& r) { return r.mse_proxy; }, a.mean_mse_proxy,
                        a.min_mse_proxy, a.max_mse_proxy);
    summarize([](const TrialRecord& r) { return r.phi_hat; }, a.mean_phi_hat, a.min_phi_hat,
              a.max_phi_hat);
    summarize([](const TrialRecord& r) { return r.mse_rounded; }, a.mean_mse_rounded,
              a.min_mse_rounded, a.max_mse_rounded);
    double lo = 0, hi = 0;
    summarize([](const TrialRecord& r) { return r.theory_mse; }, a.mean_theory_mse, lo, hi);
    const double ref = pt.reference_mse;
    summarize([ref](const TrialRecord& r) { return (r.mse_proxy - ref) * (r.mse_proxy - ref); },
              a.mean_sq_dev_proxy, lo, hi);
    summarize([ref](const TrialRecord& r) { return (r.phi_hat - ref) * (r.phi_hat - ref); },
              a.mean_sq_dev_phi, lo, hi);
    result.aggregates.push_back(a);
  }
}

}  // namespace detail

/**
 * Expands the config, runs every (grid point, trial) pair on a pool of
 * config.threads workers and collects the records in (point, trial) order.
 * Trial t of every point uses seed = config.seed + t.
 */
inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       const SolverOptions& solver = {}) {
  ExperimentResult result;
  result.config = config;
  result.points = build_grid(config);
  result.sweep_variable = default_sweep_variable(config);

  for (const GridPoint& pt : result.points) {
    const double n = static_cast<double>(pt.params.n);
    const double log_n = std::log(n);
    if (pt.params.p * pt.params.q * n < log_n * log_n) {
      result.warnings.push_back("grid point " + detail::format_value(pt.x) +
                                ": q p n = " + detail::format_value(pt.params.p * pt.params.q * n) +
                                " is below log^2(n) = " + detail::format_value(log_n * log_n) +
                                "; the dense-graph asymptotics may not apply");
    }
  }

  const auto trials = static_cast<std::size_t>(config.trials);
  const std::size_t total = result.points.size() * trials;
  result.records.resize(total);
  result.diagnostics.resize(total);

  TrialOptions options;
  options.with_rounding = config.with_rounding || config.preset == Preset::Rounding;
  options.record_timing = config.record_timing;
  options.solver = solver;
  const std::string preset = preset_name(config.preset);

  parallel_for(total, config.threads, [&](std::size_t task) {
    const GridPoint& pt = result.points[task / trials];
    ModelParams params = pt.params;
    params.seed = config.seed + static_cast<std::uint64_t>(task % trials);
    TrialOutcome outcome = run_trial(params, options);
    outcome.record.preset = preset;
    outcome.record.gamma_nominal = pt.gamma_nominal;
    result.records[task] = std::move(outcome.record);
    result.diagnostics[task] = std::move(outcome.diagnostics);
  });

  detail::aggregate(result);
  return result;
}

/// Wraps a single trial as a (non-sweep) result for export.
inline ExperimentResult single_trial_result(const ExperimentConfig& config, TrialOutcome outcome) {
  ExperimentResult result;
  result.config = config;
  result.config.trials = 1;
  GridPoint pt;
  pt.x = 0.0;
  pt.gamma_nominal = outcome.record.gamma_nominal;
  pt.reference_mse = outcome.record.theory_mse;
  result.points.push_back(pt);
  result.records.push_back(std::move(outcome.record));
  result.diagnostics.push_back(std::move(outcome.diagnostics));
  detail::aggregate(result);
  return result;
}

}  // namespace gsync::harness
