// Copyright 2026 The ht-dpsco Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ht_dpsco/bench/plot.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "absl/strings/str_format.h"
#include "ht_dpsco/bench/analysis.h"

namespace ht_dpsco {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b",
                                    "#e377c2", "#7f7f7f"};

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double Transform(double v) const { return log ? std::log10(v) : v; }
  // Position in [0, 1] along the axis.
  double Fraction(double v) const {
    const double a = Transform(lo);
    const double b = Transform(hi);
    return b > a ? (Transform(v) - a) / (b - a) : 0.5;
  }
};

std::string XmlEscape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

absl::StatusOr<PlotKind> ParsePlotKind(const std::string& text) {
  if (text == "risk_vs_eps") return PlotKind::kRiskVsEps;
  if (text == "risk_vs_n") return PlotKind::kRiskVsN;
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown plot kind '%s' (risk_vs_eps or risk_vs_n)", text));
}

absl::StatusOr<std::string> RenderPlot(std::span<const ResultRow> rows,
                                       PlotKind kind) {
  const SeriesAxis series_axis =
      kind == PlotKind::kRiskVsN ? SeriesAxis::kN : SeriesAxis::kEpsilon;
  absl::StatusOr<std::map<std::string, std::vector<SeriesPoint>>> series =
      Summarize(rows, "algo", series_axis);
  if (!series.ok()) return series.status();
  Axis x{std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(), kind == PlotKind::kRiskVsN};
  Axis y{std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(), true};
  for (const auto& [name, points] : *series) {
    for (const SeriesPoint& p : points) {
      if (!(p.min > 0.0)) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "metric %g of '%s' cannot be drawn on a log axis", p.min, name));
      }
      x.lo = std::min(x.lo, p.x);
      x.hi = std::max(x.hi, p.x);
      y.lo = std::min(y.lo, p.min);
      y.hi = std::max(y.hi, p.max);
    }
  }
  if (!(x.lo <= x.hi)) {
    return absl::InvalidArgumentError(
        "results contain no successful rows to plot");
  }
  y.lo = std::pow(10.0, std::floor(std::log10(y.lo)));
  y.hi = std::pow(10.0, std::ceil(std::log10(y.hi)));
  if (y.hi <= y.lo) y.hi = y.lo * 10.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + x.Fraction(v) * plot_w; };
  auto py = [&](double v) { return kTop + (1.0 - y.Fraction(v)) * plot_h; };

  std::string svg = absl::StrFormat(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      "width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n"
      "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
      kWidth, kHeight, kWidth, kHeight);
  absl::StrAppendFormat(
      &svg,
      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
      "fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, plot_w, plot_h);

  for (double tick = y.lo; tick <= y.hi * 1.0000001; tick *= 10.0) {
    absl::StrAppendFormat(
        &svg,
        "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
        "stroke=\"#dddddd\"/>\n"
        "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" "
        "text-anchor=\"end\">%.0e</text>\n",
        kLeft, py(tick), kLeft + plot_w, py(tick), kLeft - 6.0,
        py(tick) + 4.0, tick);
  }
  std::vector<double> x_ticks;
  for (const auto& [name, points] : *series) {
    for (const SeriesPoint& p : points) x_ticks.push_back(p.x);
  }
  std::sort(x_ticks.begin(), x_ticks.end());
  x_ticks.erase(std::unique(x_ticks.begin(), x_ticks.end()), x_ticks.end());
  for (double tick : x_ticks) {
    absl::StrAppendFormat(
        &svg,
        "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
        "stroke=\"black\"/>\n"
        "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" "
        "text-anchor=\"middle\">%g</text>\n",
        px(tick), kTop + plot_h, px(tick), kTop + plot_h + 5.0, px(tick),
        kTop + plot_h + 18.0, tick);
  }
  const char* x_label =
      kind == PlotKind::kRiskVsN ? "sample size n" : "privacy budget epsilon";
  absl::StrAppendFormat(
      &svg,
      "<text x=\"%.2f\" y=\"%.2f\" font-size=\"13\" "
      "text-anchor=\"middle\">%s</text>\n"
      "<text x=\"%.2f\" y=\"%.2f\" font-size=\"13\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 %.2f %.2f)\">metric (median over seeds)</text>\n",
      kLeft + plot_w / 2.0, kHeight - 12.0, x_label, 16.0, kTop + plot_h / 2.0,
      16.0, kTop + plot_h / 2.0);

  int color = 0;
  for (const auto& [name, points] : *series) {
    const char* stroke = kPalette[color % std::size(kPalette)];
    std::string band;
    for (const SeriesPoint& p : points) {
      absl::StrAppendFormat(&band, "%.2f,%.2f ", px(p.x), py(p.max));
    }
    for (auto it = points.rbegin(); it != points.rend(); ++it) {
      absl::StrAppendFormat(&band, "%.2f,%.2f ", px(it->x), py(it->min));
    }
    std::string line;
    for (const SeriesPoint& p : points) {
      absl::StrAppendFormat(&line, "%.2f,%.2f ", px(p.x), py(p.median));
    }
    if (!band.empty()) band.pop_back();
    if (!line.empty()) line.pop_back();
    absl::StrAppendFormat(
        &svg,
        "<polygon points=\"%s\" fill=\"%s\" fill-opacity=\"0.15\" "
        "stroke=\"none\"/>\n"
        "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" "
        "stroke-width=\"2\"/>\n",
        band, stroke, line, stroke);
    const double legend_y = kTop + 14.0 + 18.0 * color;
    absl::StrAppendFormat(
        &svg,
        "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" "
        "stroke-width=\"2\"/>\n"
        "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">%s</text>\n",
        kWidth - kRight + 12.0, legend_y, kWidth - kRight + 36.0, legend_y,
        stroke, kWidth - kRight + 42.0, legend_y + 4.0, XmlEscape(name));
    ++color;
  }
  svg += "</svg>\n";
  return svg;
}

absl::Status EmitPlot(const std::string& csv_path, PlotKind kind,
                      const std::string& svg_path) {
  absl::StatusOr<ResultTable> table = ReadResultsFile(csv_path);
  if (!table.ok()) return table.status();
  absl::StatusOr<std::string> svg = RenderPlot(table->rows, kind);
  if (!svg.ok()) return svg.status();
  std::ofstream out(svg_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrFormat("cannot write plot to '%s'", svg_path));
  }
  out << *svg;
  return out ? absl::OkStatus()
             : absl::DataLossError(
                   absl::StrFormat("short write to '%s'", svg_path));
}

}  // namespace ht_dpsco
