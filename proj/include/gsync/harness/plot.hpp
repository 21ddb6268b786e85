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
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsync/errors.hpp"
#include "gsync/harness/experiment.hpp"
#include "gsync/harness/export.hpp"

namespace gsync::harness {

/// Data of one chart: scatter points, mean curve and theory curve in
/// data coordinates, before any axis transform.
struct ChartData {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<std::pair<double, double>> scatter;
  std::vector<std::pair<double, double>> mean;
  std::vector<std::pair<double, double>> theory;
  std::optional<double> threshold_x;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::optional<double> threshold_for(const ExperimentConfig& c) {
  switch (c.preset) {
    case Preset::Threshold:
    case Preset::Rounding: return 1.0 / std::sqrt(c.q);
    case Preset::AdditiveNoise: return 1.0;
    case Preset::CorruptionRange: return 0.5;
    default: return std::nullopt;
  }
}

}  // namespace detail

/**
 * Splits a sweep result into charts, one per series. Values are the MSE
 * proxy divided by 2d (the rounded MSE for the rounding preset); the
 * convergence preset plots mean squared deviations from the limit instead.
 */
inline std::vector<ChartData> chart_data(const ExperimentResult& r) {
  if (r.sweep_variable.empty() || r.points.empty()) {
    throw Unsupported("emit_plot: result is not a sweep");
  }
  const auto trials = static_cast<std::size_t>(r.config.trials);
  const bool rounded = r.config.preset == Preset::Rounding;
  const bool convergence = r.config.preset == Preset::Convergence;

  std::map<std::string, ChartData> by_series;
  std::vector<std::string> order;
  for (std::size_t pi = 0; pi < r.points.size(); ++pi) {
    const GridPoint& pt = r.points[pi];
    const double norm = 2.0 * pt.params.group.dim();
    if (!by_series.count(pt.series)) {
      ChartData c;
      c.title = preset_name(r.config.preset) + " " + r.config.group +
                (pt.series.empty() ? "" : " " + pt.series);
      c.x_label = r.sweep_variable;
      c.log_y = convergence;
      c.y_label = convergence ? "squared deviation" : rounded ? "MSE / 2d" : "MSE proxy / 2d";
      c.threshold_x = detail::threshold_for(r.config);
      by_series[pt.series] = c;
      order.push_back(pt.series);
    }
    ChartData& c = by_series[pt.series];
    const GridAggregate& a = r.aggregates[pi];
    for (std::size_t t = 0; t < trials; ++t) {
      const TrialRecord& rec = r.records[pi * trials + t];
      double v = rounded ? rec.mse_rounded : rec.mse_proxy;
      if (convergence) v = (v - pt.reference_mse) * (v - pt.reference_mse);
      else v /= norm;
      if (std::isfinite(v)) c.scatter.emplace_back(pt.x, v);
    }
    if (convergence) {
      c.mean.emplace_back(pt.x, a.mean_sq_dev_proxy);
    } else {
      c.mean.emplace_back(pt.x, (rounded ? a.mean_mse_rounded : a.mean_mse_proxy) / norm);
      c.theory.emplace_back(pt.x, pt.reference_mse / norm);
    }
  }
  std::vector<ChartData> out;
  for (const auto& s : order) out.push_back(by_series[s]);
  return out;
}

/// Self-contained SVG for one chart.
inline std::string render_svg(const ChartData& c) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  auto ty = [&](double v) { return c.log_y ? std::log10(std::max(v, 1e-300)) : v; };

  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool first = true;
  auto extend = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y) || (c.log_y && y <= 0)) return;
    const double yy = ty(y);
    if (first) { x0 = x1 = x; y0 = y1 = yy; first = false; return; }
    x0 = std::min(x0, x); x1 = std::max(x1, x);
    y0 = std::min(y0, yy); y1 = std::max(y1, yy);
  };
  for (const auto* s : {&c.scatter, &c.mean, &c.theory}) {
    for (const auto& [x, y] : *s) extend(x, y);
  }
  if (c.threshold_x) {
    x0 = first ? *c.threshold_x : std::min(x0, *c.threshold_x);
    x1 = first ? *c.threshold_x : std::max(x1, *c.threshold_x);
  }
  if (!c.log_y && !first) { y0 = std::min(y0, 0.0); }
  // Pad degenerate ranges so a single point still yields a finite chart.
  if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const double ypad = 0.05 * (y1 - y0);
  y1 += ypad;
  if (c.log_y) y0 -= ypad;

  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };
  using detail::svg_num;

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(W) + "\" height=\"" +
       svg_num(H) + "\" viewBox=\"0 0 " + svg_num(W) + " " + svg_num(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + svg_num(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       detail::xml_escape(c.title) + "</text>\n";
  // Axes and ticks.
  s += "<g stroke=\"black\" fill=\"none\"><line x1=\"" + svg_num(L) + "\" y1=\"" + svg_num(H - B) +
       "\" x2=\"" + svg_num(W - R) + "\" y2=\"" + svg_num(H - B) + "\"/><line x1=\"" + svg_num(L) +
       "\" y1=\"" + svg_num(T) + "\" x2=\"" + svg_num(L) + "\" y2=\"" + svg_num(H - B) + "\"/></g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0;
    const double yv = y0 + (y1 - y0) * k / 5.0;
    const double xp = L + (W - L - R) * k / 5.0;
    const double yp = H - B - (H - T - B) * k / 5.0;
    s += "<text x=\"" + svg_num(xp) + "\" y=\"" + svg_num(H - B + 16) + "\" text-anchor=\"middle\">" +
         detail::tick_label(xv) + "</text>\n";
    s += "<text x=\"" + svg_num(L - 6) + "\" y=\"" + svg_num(yp + 4) + "\" text-anchor=\"end\">" +
         detail::tick_label(c.log_y ? std::pow(10.0, yv) : yv) + "</text>\n";
  }
  s += "<text x=\"" + svg_num((L + W - R) / 2) + "\" y=\"" + svg_num(H - 12) +
       "\" text-anchor=\"middle\">" + detail::xml_escape(c.x_label) + "</text>\n";
  s += "<text transform=\"translate(16," + svg_num((T + H - B) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + detail::xml_escape(c.y_label) +
       (c.log_y ? " (log scale)" : "") + "</text>\n</g>\n";

  if (c.threshold_x) {
    const double xp = px(*c.threshold_x);
    s += "<line class=\"threshold\" x1=\"" + svg_num(xp) + "\" y1=\"" + svg_num(T) + "\" x2=\"" +
         svg_num(xp) + "\" y2=\"" + svg_num(H - B) +
         "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  }
  auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const char* cls,
                      const char* colour) {
    std::string d;
    for (const auto& [x, y] : pts) {
      if (!std::isfinite(y) || (c.log_y && y <= 0)) continue;
      d += (d.empty() ? "" : " ") + svg_num(px(x)) + "," + svg_num(py(y));
    }
    if (d.empty()) return;
    s += std::string("<polyline class=\"") + cls + "\" fill=\"none\" stroke=\"" + colour +
         "\" stroke-width=\"2\" points=\"" + d + "\"/>\n";
  };
  polyline(c.theory, "theory", "firebrick");
  polyline(c.mean, "mean", "steelblue");

  s += "<g class=\"trials\" stroke=\"black\" stroke-width=\"1\">\n";
  for (const auto& [x, y] : c.scatter) {
    if (c.log_y && y <= 0) continue;
    const double a = px(x), b = py(y);
    s += "<path d=\"M" + svg_num(a - 3) + " " + svg_num(b - 3) + "L" + svg_num(a + 3) + " " +
         svg_num(b + 3) + "M" + svg_num(a - 3) + " " + svg_num(b + 3) + "L" + svg_num(a + 3) +
         " " + svg_num(b - 3) + "\"/>\n";
  }
  s += "</g>\n</svg>\n";
  return s;
}

/// Writes one SVG per series into `dir` and returns the paths.
inline std::vector<std::filesystem::path> emit_plot(const ExperimentResult& r,
                                                    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> paths;
  const auto charts = chart_data(r);
  for (std::size_t k = 0; k < charts.size(); ++k) {
    const std::string stem = preset_name(r.config.preset) +
                             (charts.size() > 1 ? "_" + std::to_string(k) : "");
    const auto path = dir / (stem + ".svg");
    detail::write_text(path, render_svg(charts[k]));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace gsync::harness
