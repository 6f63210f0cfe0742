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

#ifndef HT_DPSCO_BENCH_CSV_H_
#define HT_DPSCO_BENCH_CSV_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace ht_dpsco {

// Column order of the results file.
inline constexpr const char* kResultColumns[] = {
    "algo", "loss",         "n",           "d",           "eps",
    "delta", "seed",        "final_metric", "wallclock_ms", "metadata_json"};

inline constexpr char kFailedMetric[] = "FAILED";

struct ResultRow {
  std::string algo;
  std::string loss;
  std::int64_t n = 0;
  std::int64_t d = 0;
  double eps = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  // Absent for failed cells.
  std::optional<double> final_metric;
  double wallclock_ms = 0.0;
  std::string metadata_json = "{}";
};

// RFC 4180 quoting: fields with commas or quotes are quoted and embedded
// quotes doubled. Line breaks become spaces so every record is one line.
std::string CsvEscape(const std::string& field);
std::string CsvHeader();
std::string FormatResultRow(const ResultRow& row);

// Splits one CSV record; fails on an unterminated quote.
absl::StatusOr<std::vector<std::string>> SplitCsvRecord(
    const std::string& line);

struct ResultTable {
  std::vector<ResultRow> rows;
  // Lines that could not be parsed (for example a record cut short by a
  // crash); they are skipped.
  int skipped_lines = 0;
};

// Reads a results file. The header must contain every result column.
absl::StatusOr<ResultTable> ReadResults(std::istream& in);
absl::StatusOr<ResultTable> ReadResultsFile(const std::string& path);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_BENCH_CSV_H_
