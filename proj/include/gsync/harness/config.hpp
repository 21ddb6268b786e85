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
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gsync/errors.hpp"
#include "gsync/harness/experiment.hpp"

// Flat config files: one `key = value` per line, '#' starts a comment.
//
//   preset = threshold
//   group  = so3
//   n      = 400
//   grid   = 0.5, 1, 2
//
// Keys: preset group n trials sweep grid p q sigma gamma seed out threads
// rounding timing plot.

namespace gsync::harness {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double config_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
  return x;
}

inline long long config_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
  return x;
}

inline bool config_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + v + "'");
}

}  // namespace detail

/// Applies one key to the config. Unknown keys are a ConfigError.
inline void apply_config_value(ExperimentConfig& c, const std::string& key,
                               const std::string& value) {
  using namespace detail;
  if (key == "preset") c.preset = parse_preset(value);
  else if (key == "group") c.group = value;
  else if (key == "n") c.n = config_int(key, value);
  else if (key == "trials") c.trials = static_cast<int>(config_int(key, value));
  else if (key == "sweep") c.sweep = value;
  else if (key == "grid") {
    c.grid.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) c.grid.push_back(config_double(key, trim(item)));
  } else if (key == "p") c.p = config_double(key, value);
  else if (key == "q") c.q = config_double(key, value);
  else if (key == "sigma") c.sigma = config_double(key, value);
  else if (key == "gamma") c.gamma = config_double(key, value);
  else if (key == "seed") {
    const long long s = config_int(key, value);
    if (s < 0) throw ConfigError("config: seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "out") c.out_dir = value;
  else if (key == "threads") c.threads = static_cast<int>(config_int(key, value));
  else if (key == "rounding") c.with_rounding = config_bool(key, value);
  else if (key == "timing") c.record_timing = config_bool(key, value);
  else if (key == "plot") c.plot = config_bool(key, value);
  else throw ConfigError("config: unknown key '" + key + "'");
}

inline ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig c = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    apply_config_value(c, detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)));
  }
  return c;
}

inline ExperimentConfig load_config_file(const std::string& path, ExperimentConfig c = {}) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), std::move(c));
}

}  // namespace gsync::harness
