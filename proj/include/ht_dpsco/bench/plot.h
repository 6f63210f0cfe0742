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

#ifndef HT_DPSCO_BENCH_PLOT_H_
#define HT_DPSCO_BENCH_PLOT_H_

#include <span>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ht_dpsco/bench/csv.h"

namespace ht_dpsco {

enum class PlotKind { kRiskVsEps, kRiskVsN };

absl::StatusOr<PlotKind> ParsePlotKind(const std::string& text);

// SVG 1.1 document with one polyline per algorithm through the lower median
// of the metric over seeds, a shaded min-max band, and labelled axes. The y
// axis is logarithmic; x is logarithmic for n and linear for epsilon. The
// output depends only on the rows.
absl::StatusOr<std::string> RenderPlot(std::span<const ResultRow> rows,
                                       PlotKind kind);

// Reads `csv_path` and writes the rendered plot to `svg_path`.
absl::Status EmitPlot(const std::string& csv_path, PlotKind kind,
                      const std::string& svg_path);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_BENCH_PLOT_H_
