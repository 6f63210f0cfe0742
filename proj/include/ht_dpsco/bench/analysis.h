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

#ifndef HT_DPSCO_BENCH_ANALYSIS_H_
#define HT_DPSCO_BENCH_ANALYSIS_H_

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "ht_dpsco/bench/csv.h"

namespace ht_dpsco {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  // (ln n, ln risk)
  std::vector<std::pair<double, double>> points;
};

// Ordinary least squares of ln(risk) on ln(n). Needs at least three points,
// positive values and two distinct n.
absl::StatusOr<RateFit> FitRate(
    std::span<const std::pair<double, double>> n_and_risk);

// Median with ties resolved downwards: element floor((m - 1) / 2) of the
// sorted values. Fails on an empty input.
absl::StatusOr<double> LowerMedian(std::vector<double> values);

// Summary of the seeds of one (series, x) cell.
struct SeriesPoint {
  double x = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

enum class SeriesAxis { kN, kEpsilon };

// Groups successful rows by the value of `group_column` (algo, loss, n, eps,
// seed or d) and, within each group, summarizes the metric per x value.
// Series and points are ordered by key and x.
absl::StatusOr<std::map<std::string, std::vector<SeriesPoint>>> Summarize(
    std::span<const ResultRow> rows, const std::string& group_column,
    SeriesAxis axis);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_BENCH_ANALYSIS_H_
