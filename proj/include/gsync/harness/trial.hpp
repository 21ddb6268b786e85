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

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "gsync/instance.hpp"
#include "gsync/metrics.hpp"
#include "gsync/rounding.hpp"
#include "gsync/spectral.hpp"

namespace gsync::harness {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One persisted trial. Metric fields that could not be computed are NaN;
/// a degenerate risk estimate (lambda_{d+1} <= 0) shows as eta = inf,
/// phi_hat = 0.
struct TrialRecord {
  std::string preset = "custom";
  std::string group;
  std::int64_t n = 0;
  int d = 0;
  double p = 0.0;
  double q = 0.0;
  double sigma = 0.0;
  double gamma_nominal = 0.0;
  std::uint64_t seed = 0;
  double lambda_1 = kNaN;
  double lambda_d1 = kNaN;
  double eta = kNaN;
  double mse_proxy = kNaN;
  double phi_hat = kNaN;
  double mse_rounded = kNaN;
  double rounding_error = kNaN;
  double theory_mse = kNaN;
  double wall_seconds = 0.0;
};

/// Column names, in declaration order of TrialRecord.
inline constexpr std::array<std::string_view, 18> kTrialFields = {
    "preset",   "group",     "n",         "d",          "p",
    "q",        "sigma",     "gamma_nominal", "seed",   "lambda_1",
    "lambda_{d+1}", "eta",   "mse_proxy", "phi_hat",    "mse_rounded",
    "rounding_error", "theory_mse", "wall_seconds"};

/// In-memory extras that are not part of the persisted record.
struct TrialDiagnostics {
  bool failed = false;
  std::string failure;
  bool phi_degenerate = false;
  bool phi_unstable = false;
  double sum_sq_block_error = kNaN;  // sum_i D_i^2
  std::size_t degenerate_blocks = 0;
  double max_residual = kNaN;
};

struct TrialOutcome {
  TrialRecord record;
  TrialDiagnostics diagnostics;
};

struct TrialOptions {
  bool with_rounding = false;
  bool record_timing = false;
  SolverOptions solver{};
};

/**
 * generate -> synchronize -> metrics -> (optional) blockwise rounding.
 *
 * Deterministic in (params, options). Solver failures do not throw; they are
 * reported through diagnostics.failed with NaN metrics.
 */
inline TrialOutcome run_trial(const ModelParams& params, const TrialOptions& options = {}) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  TrialOutcome out;
  TrialRecord& rec = out.record;
  rec.group = params.group.name();
  rec.n = params.n;
  rec.d = params.group.dim();
  rec.p = params.p;
  rec.q = params.q;
  rec.sigma = params.sigma;
  rec.seed = params.seed;
  const Beta b = beta(params.p, params.q, params.sigma, static_cast<double>(params.n));
  rec.gamma_nominal = b.gamma;
  rec.theory_mse = theoretical_limit_mse(b.gamma, rec.d);

  with_scalar(params.group, [&]<typename Scalar>(std::type_identity<Scalar>) {
    const SyncInstance<Scalar> inst = generate_instance<Scalar>(params);
    SpectralResult<Scalar> spec;
    try {
      spec = spectral_synchronize(inst, options.solver);
    } catch (const ComputeError& e) {
      out.diagnostics.failed = true;
      out.diagnostics.failure = e.what();
      return;
    }
    out.diagnostics.max_residual = spec.residuals.maxCoeff();
    const Mat<Scalar> x = inst.truth_stack();
    rec.lambda_1 = spec.lambda_1();
    rec.lambda_d1 = spec.lambda_d1();
    const PhiHat phi = phi_hat(rec.lambda_1, rec.lambda_d1, rec.d);
    rec.eta = phi.eta;
    rec.phi_hat = phi.phi;
    out.diagnostics.phi_degenerate = phi.degenerate;
    out.diagnostics.phi_unstable = phi.unstable;
    rec.mse_proxy = mse_proxy(x, spec.x_tilde);

    if (options.with_rounding) {
      const RoundedEstimate<Scalar> rounded = blockwise_round(params.group, spec.x_tilde);
      rec.mse_rounded = mse_stacked(x, rounded.estimate_stack);
      rec.rounding_error = rounding_error(rounded.estimate_stack, spec.x_tilde);
      out.diagnostics.sum_sq_block_error = rounded.sum_squared_block_error();
      out.diagnostics.degenerate_blocks = rounded.degenerate_blocks;
    }
  });

  if (options.record_timing) {
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return out;
}

}  // namespace gsync::harness
