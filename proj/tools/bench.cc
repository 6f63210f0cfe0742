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

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "ht_dpsco/bench/analysis.h"
#include "ht_dpsco/bench/config.h"
#include "ht_dpsco/bench/csv.h"
#include "ht_dpsco/bench/experiment.h"
#include "ht_dpsco/bench/plot.h"

namespace ht_dpsco {
namespace {

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << std::endl;
  return 1;
}

int RunFirstCell(const std::string& config_path) {
  absl::StatusOr<ExperimentConfig> config = ReadExperimentConfig(config_path);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<std::shared_ptr<const DataSource>> source =
      DataSource::Load(*config);
  if (!source.ok()) return Fail(source.status());
  CellOutcome outcome =
      RunCell(**source, config->algorithms.front(), config->n_values.front(),
              config->epsilons.front(), config->seeds.front());
  std::cout << CsvHeader() << '\n' << FormatResultRow(outcome.row) << '\n';
  if (!outcome.ok) {
    std::cerr << "cell failed: " << outcome.error << std::endl;
    return 1;
  }
  std::cout << outcome.record.ToJson(true).dump(2) << std::endl;
  return 0;
}

int Sweep(const std::string& config_path, int threads) {
  absl::StatusOr<ExperimentConfig> config = ReadExperimentConfig(config_path);
  if (!config.ok()) return Fail(config.status());
  RunOptions options;
  options.log = &std::cerr;
  options.threads = threads;
  absl::StatusOr<ExperimentSummary> summary = RunExperiment(*config, options);
  if (!summary.ok()) return Fail(summary.status());
  std::cout << absl::StrFormat("cells=%d resumed=%d failed=%d written=%d\n",
                               summary->total_cells, summary->resumed_cells,
                               summary->failed_cells, summary->rows.size());
  if (config->output_csv.empty()) {
    std::cout << CsvHeader() << '\n';
    for (const ResultRow& row : summary->rows) {
      std::cout << FormatResultRow(row) << '\n';
    }
  }
  return 0;
}

int Rates(const std::string& csv_path, const std::string& group) {
  absl::StatusOr<ResultTable> table = ReadResultsFile(csv_path);
  if (!table.ok()) return Fail(table.status());
  absl::StatusOr<std::map<std::string, std::vector<SeriesPoint>>> series =
      Summarize(table->rows, group, SeriesAxis::kN);
  if (!series.ok()) return Fail(series.status());
  std::cout << group << ",slope,intercept,r_squared,points\n";
  int status = 0;
  for (const auto& [name, points] : *series) {
    std::vector<std::pair<double, double>> medians;
    for (const SeriesPoint& point : points) {
      medians.emplace_back(point.x, point.median);
    }
    absl::StatusOr<RateFit> fit = FitRate(medians);
    if (!fit.ok()) {
      std::cerr << name << ": " << fit.status() << std::endl;
      status = 1;
      continue;
    }
    std::cout << absl::StrFormat("%s,%.6g,%.6g,%.6g,%d\n", CsvEscape(name),
                                 fit->slope, fit->intercept, fit->r_squared,
                                 fit->points.size());
  }
  return status;
}

int Plot(const std::string& csv_path, const std::string& kind_name,
         const std::string& out) {
  absl::StatusOr<PlotKind> kind = ParsePlotKind(kind_name);
  if (!kind.ok()) return Fail(kind.status());
  if (absl::Status s = EmitPlot(csv_path, *kind, out); !s.ok()) return Fail(s);
  std::cout << out << std::endl;
  return 0;
}

int Moments(const std::string& config_path, std::uint64_t seed) {
  absl::StatusOr<ExperimentConfig> config = ReadExperimentConfig(config_path);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<std::vector<MomentRow>> rows = MomentTable(*config, seed);
  if (!rows.ok()) return Fail(rows.status());
  std::cout << "k,m,r_hat,r_root\n";
  for (const MomentRow& row : *rows) {
    std::cout << absl::StrFormat("%d,%d,%.17g,%.17g\n", row.k, row.m,
                                 row.r_hat, row.r_root);
  }
  return 0;
}

}  // namespace
}  // namespace ht_dpsco

int main(int argc, char** argv) {
  CLI::App app{"Heavy-tailed DP-SCO experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string csv_path;
  std::string group = "algo";
  std::string kind = "risk_vs_n";
  std::string out = "plot.svg";
  int threads = 0;
  std::uint64_t seed = 1;

  CLI::App* run = app.add_subcommand("run", "Run the first cell of a config");
  run->add_option("config", config_path, "Experiment config")->required();
  CLI::App* sweep = app.add_subcommand("sweep", "Run the full sweep grid");
  sweep->add_option("config", config_path, "Experiment config")->required();
  sweep->add_option("--threads", threads, "Worker count (0 = all cores)");
  CLI::App* rates = app.add_subcommand("rates", "Fit log-log rates per group");
  rates->add_option("csv", csv_path, "Results CSV")->required();
  rates->add_option("--group", group, "Grouping column");
  CLI::App* plot = app.add_subcommand("plot", "Render an SVG plot");
  plot->add_option("csv", csv_path, "Results CSV")->required();
  plot->add_option("--kind", kind, "risk_vs_eps or risk_vs_n");
  plot->add_option("--out", out, "Output SVG path");
  CLI::App* moments =
      app.add_subcommand("moments", "Print the moment profile as CSV");
  moments->add_option("config", config_path, "Experiment config")->required();
  moments->add_option("--seed", seed, "Seed for the auxiliary sample");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return ht_dpsco::RunFirstCell(config_path);
  if (sweep->parsed()) return ht_dpsco::Sweep(config_path, threads);
  if (rates->parsed()) return ht_dpsco::Rates(csv_path, group);
  if (plot->parsed()) return ht_dpsco::Plot(csv_path, kind, out);
  return ht_dpsco::Moments(config_path, seed);
}
