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

#include "ht_dpsco/bench/analysis.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace ht_dpsco {

absl::StatusOr<RateFit> FitRate(
    std::span<const std::pair<double, double>> n_and_risk) {
  if (n_and_risk.size() < 3) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "rate fit needs at least 3 points, got %d", n_and_risk.size()));
  }
  RateFit fit;
  for (const auto& [n, risk] : n_and_risk) {
    if (!(n > 0.0) || !(risk > 0.0)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "rate fit needs positive n and risk, got (%g, %g)", n, risk));
    }
    fit.points.emplace_back(std::log(n), std::log(risk));
  }
  const double m = static_cast<double>(fit.points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [x, y] : fit.points) {
    mean_x += x / m;
    mean_y += y / m;
  }
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
    syy += (y - mean_y) * (y - mean_y);
  }
  if (!(sxx > 0.0)) {
    return absl::InvalidArgumentError("rate fit needs two distinct n values");
  }
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0)
                            : 1.0;
  return fit;
}

absl::StatusOr<double> LowerMedian(std::vector<double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("median of an empty set");
  }
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

absl::StatusOr<std::map<std::string, std::vector<SeriesPoint>>> Summarize(
    std::span<const ResultRow> rows, const std::string& group_column,
    SeriesAxis axis) {
  auto key_of = [&](const ResultRow& row) -> absl::StatusOr<std::string> {
    if (group_column == "algo") return row.algo;
    if (group_column == "loss") return row.loss;
    if (group_column == "n") return absl::StrCat(row.n);
    if (group_column == "d") return absl::StrCat(row.d);
    if (group_column == "eps") return absl::StrFormat("%.6g", row.eps);
    if (group_column == "seed") return absl::StrCat(row.seed);
    return absl::InvalidArgumentError(
        absl::StrFormat("cannot group by column '%s'", group_column));
  };
  std::map<std::string, std::map<double, std::vector<double>>> grouped;
  for (const ResultRow& row : rows) {
    absl::StatusOr<std::string> key = key_of(row);
    if (!key.ok()) return key.status();
    if (!row.final_metric.has_value()) continue;
    const double x =
        axis == SeriesAxis::kN ? static_cast<double>(row.n) : row.eps;
    grouped[*key][x].push_back(*row.final_metric);
  }
  std::map<std::string, std::vector<SeriesPoint>> out;
  for (auto& [key, by_x] : grouped) {
    std::vector<SeriesPoint>& series = out[key];
    for (auto& [x, values] : by_x) {
      SeriesPoint point;
      point.x = x;
      point.count = static_cast<int>(values.size());
      point.min = *std::min_element(values.begin(), values.end());
      point.max = *std::max_element(values.begin(), values.end());
      point.median = *LowerMedian(values);
      series.push_back(point);
    }
  }
  return out;
}

}  // namespace ht_dpsco
