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

#include "ht_dpsco/bench/csv.h"

#include <algorithm>
#include <fstream>
#include <map>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"

namespace ht_dpsco {

std::string CsvEscape(const std::string& field) {
  std::string clean = field;
  std::replace(clean.begin(), clean.end(), '\n', ' ');
  std::replace(clean.begin(), clean.end(), '\r', ' ');
  if (clean.find_first_of(",\"") == std::string::npos) return clean;
  std::string out = "\"";
  for (char c : clean) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string CsvHeader() { return absl::StrJoin(kResultColumns, ","); }

std::string FormatResultRow(const ResultRow& row) {
  const std::string metric = row.final_metric.has_value()
                                 ? absl::StrFormat("%.10g", *row.final_metric)
                                 : std::string(kFailedMetric);
  return absl::StrJoin(
      {CsvEscape(row.algo), CsvEscape(row.loss), absl::StrCat(row.n),
       absl::StrCat(row.d), absl::StrFormat("%.10g", row.eps),
       absl::StrFormat("%.10g", row.delta), absl::StrCat(row.seed), metric,
       absl::StrFormat("%.3f", row.wallclock_ms), CsvEscape(row.metadata_json)},
      ",");
}

absl::StatusOr<std::vector<std::string>> SplitCsvRecord(
    const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) return absl::InvalidArgumentError("unterminated quoted field");
  return fields;
}

absl::StatusOr<ResultTable> ReadResults(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError("results file is empty (no header)");
  }
  absl::StatusOr<std::vector<std::string>> header = SplitCsvRecord(line);
  if (!header.ok()) return header.status();
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header->size(); ++i) position[(*header)[i]] = i;
  for (const char* column : kResultColumns) {
    if (!position.count(column)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("results file lacks column '%s'", column));
    }
  }
  ResultTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    absl::StatusOr<std::vector<std::string>> fields = SplitCsvRecord(line);
    if (!fields.ok() || fields->size() != header->size()) {
      ++table.skipped_lines;
      continue;
    }
    auto get = [&](const char* column) -> const std::string& {
      return (*fields)[position[column]];
    };
    ResultRow row;
    row.algo = get("algo");
    row.loss = get("loss");
    row.metadata_json = get("metadata_json");
    double metric = 0.0;
    const bool parsed =
        absl::SimpleAtoi(get("n"), &row.n) &&
        absl::SimpleAtoi(get("d"), &row.d) &&
        absl::SimpleAtod(get("eps"), &row.eps) &&
        absl::SimpleAtod(get("delta"), &row.delta) &&
        absl::SimpleAtoi(get("seed"), &row.seed) &&
        absl::SimpleAtod(get("wallclock_ms"), &row.wallclock_ms) &&
        (get("final_metric") == kFailedMetric ||
         absl::SimpleAtod(get("final_metric"), &metric));
    if (!parsed) {
      ++table.skipped_lines;
      continue;
    }
    if (get("final_metric") != kFailedMetric) row.final_metric = metric;
    table.rows.push_back(std::move(row));
  }
  return table;
}

absl::StatusOr<ResultTable> ReadResultsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrFormat("cannot open results file '%s'", path));
  }
  return ReadResults(in);
}

}  // namespace ht_dpsco
