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

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsync/errors.hpp"
#include "gsync/harness/experiment.hpp"
#include "gsync/harness/trial.hpp"

namespace gsync::harness {

/// Thrown for file-system failures; the message names the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// %.17g, with non-finite values spelled nan, inf, -inf.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw InvalidArgument("csv: bad number '" + s + "'");
  }
  return v;
}

inline std::string csv_header() {
  std::string h;
  for (std::size_t i = 0; i < kTrialFields.size(); ++i) {
    if (i) h += ',';
    h += kTrialFields[i];
  }
  return h;
}

inline std::string csv_row(const TrialRecord& r) {
  std::string s = r.preset + ',' + r.group + ',' + std::to_string(r.n) + ',' +
                  std::to_string(r.d);
  for (double v : {r.p, r.q, r.sigma, r.gamma_nominal}) s += ',' + format_double(v);
  s += ',' + std::to_string(r.seed);
  for (double v : {r.lambda_1, r.lambda_d1, r.eta, r.mse_proxy, r.phi_hat, r.mse_rounded,
                   r.rounding_error, r.theory_mse, r.wall_seconds}) {
    s += ',' + format_double(v);
  }
  return s;
}

inline std::string to_csv(const std::vector<TrialRecord>& records) {
  std::string out = csv_header() + '\n';
  for (const auto& r : records) out += csv_row(r) + '\n';
  return out;
}

/// Inverse of to_csv. The header must match exactly.
inline std::vector<TrialRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) {
    throw InvalidArgument("csv: header does not match the trial record fields");
  }
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != kTrialFields.size()) {
      throw InvalidArgument("csv: expected " + std::to_string(kTrialFields.size()) +
                            " fields, got " + std::to_string(f.size()));
    }
    TrialRecord r;
    r.preset = f[0];
    r.group = f[1];
    r.n = std::stoll(f[2]);
    r.d = std::stoi(f[3]);
    r.p = parse_double(f[4]);
    r.q = parse_double(f[5]);
    r.sigma = parse_double(f[6]);
    r.gamma_nominal = parse_double(f[7]);
    r.seed = std::stoull(f[8]);
    double* tail[] = {&r.lambda_1, &r.lambda_d1, &r.eta, &r.mse_proxy, &r.phi_hat,
                      &r.mse_rounded, &r.rounding_error, &r.theory_mse, &r.wall_seconds};
    for (std::size_t k = 0; k < 9; ++k) *tail[k] = parse_double(f[9 + k]);
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
  f << text;
  f.flush();
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace detail

inline nlohmann::json record_json(const TrialRecord& r) {
  using detail::json_number;
  return nlohmann::json{
      {"preset", r.preset},
      {"group", r.group},
      {"n", r.n},
      {"d", r.d},
      {"p", json_number(r.p)},
      {"q", json_number(r.q)},
      {"sigma", json_number(r.sigma)},
      {"gamma_nominal", json_number(r.gamma_nominal)},
      {"seed", r.seed},
      {"lambda_1", json_number(r.lambda_1)},
      {"lambda_{d+1}", json_number(r.lambda_d1)},
      {"eta", json_number(r.eta)},
      {"mse_proxy", json_number(r.mse_proxy)},
      {"phi_hat", json_number(r.phi_hat)},
      {"mse_rounded", json_number(r.mse_rounded)},
      {"rounding_error", json_number(r.rounding_error)},
      {"theory_mse", json_number(r.theory_mse)},
      {"wall_seconds", json_number(r.wall_seconds)},
  };
}

inline nlohmann::json config_json(const ExperimentConfig& c) {
  using detail::json_number;
  nlohmann::json grid = nlohmann::json::array();
  for (double g : c.grid) grid.push_back(json_number(g));
  return {
      {"preset", preset_name(c.preset)},
      {"group", c.group},
      {"n", c.n},
      {"trials", c.trials},
      {"sweep", c.sweep},
      {"grid", grid},
      {"p", c.p ? json_number(*c.p) : nlohmann::json(nullptr)},
      {"q", json_number(c.q)},
      {"sigma", json_number(c.sigma)},
      {"gamma", c.gamma ? json_number(*c.gamma) : nlohmann::json(nullptr)},
      {"seed", c.seed},
      {"with_rounding", c.with_rounding || c.preset == Preset::Rounding},
  };
}

inline nlohmann::json result_json(const ExperimentResult& r) {
  using detail::json_number;
  nlohmann::json records = nlohmann::json::array();
  for (const auto& rec : r.records) records.push_back(record_json(rec));
  nlohmann::json aggregates = nlohmann::json::array();
  for (const auto& a : r.aggregates) {
    aggregates.push_back({
        {"series", a.series},
        {"x", json_number(a.x)},
        {"count", a.count},
        {"mean_mse_proxy", json_number(a.mean_mse_proxy)},
        {"min_mse_proxy", json_number(a.min_mse_proxy)},
        {"max_mse_proxy", json_number(a.max_mse_proxy)},
        {"mean_phi_hat", json_number(a.mean_phi_hat)},
        {"min_phi_hat", json_number(a.min_phi_hat)},
        {"max_phi_hat", json_number(a.max_phi_hat)},
        {"mean_mse_rounded", json_number(a.mean_mse_rounded)},
        {"min_mse_rounded", json_number(a.min_mse_rounded)},
        {"max_mse_rounded", json_number(a.max_mse_rounded)},
        {"mean_theory_mse", json_number(a.mean_theory_mse)},
        {"reference_mse", json_number(a.reference_mse)},
        {"mean_sq_dev_proxy", json_number(a.mean_sq_dev_proxy)},
        {"mean_sq_dev_phi", json_number(a.mean_sq_dev_phi)},
    });
  }
  nlohmann::json fields = nlohmann::json::array();
  for (auto f : kTrialFields) fields.push_back(std::string(f));
  return {{"config", config_json(r.config)},
          {"sweep_variable", r.sweep_variable},
          {"fields", fields},
          {"records", records},
          {"aggregates", aggregates},
          {"warnings", r.warnings}};
}

enum class ExportFormat { Csv, Json };

/// Writes results.csv or results.json into `dir` and returns the file path.
inline std::filesystem::path export_results(const ExperimentResult& result, ExportFormat format,
                                            const std::filesystem::path& dir) {
  if (format == ExportFormat::Csv) {
    const auto path = dir / "results.csv";
    detail::write_text(path, to_csv(result.records));
    return path;
  }
  const auto path = dir / "results.json";
  detail::write_text(path, result_json(result).dump(2) + '\n');
  return path;
}

}  // namespace gsync::harness
