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

#ifndef HT_DPSCO_BENCH_EXPERIMENT_H_
#define HT_DPSCO_BENCH_EXPERIMENT_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ht_dpsco/bench/config.h"
#include "ht_dpsco/bench/csv.h"
#include "ht_dpsco/core/geometry.h"
#include "ht_dpsco/data/dataset.h"
#include "ht_dpsco/estimator/moments.h"
#include "ht_dpsco/losses/loss.h"
#include "ht_dpsco/optim/run_record.h"

namespace ht_dpsco {

// Everything one cell trains and evaluates on.
struct Problem {
  std::unique_ptr<LossOracle> loss;
  // The constraint set W (always set by DataSource::Build).
  std::optional<ConstraintSet> set;
  Dataset train;
  // Public sample from the same source, used only for moment estimates.
  Dataset aux;
  // Held-out sample for the test metric; empty when the oracle knows the
  // excess risk in closed form.
  Dataset test;
  std::vector<std::string> warnings;
};

// Source data shared by all cells (the parsed libsvm files, if any).
class DataSource {
 public:
  static absl::StatusOr<std::shared_ptr<const DataSource>> Load(
      const ExperimentConfig& config);

  // Builds the problem for one (seed, n) pair. Deterministic in its inputs.
  absl::StatusOr<Problem> Build(std::uint64_t seed, std::int64_t n) const;

  const ExperimentConfig& config() const { return config_; }

 private:
  explicit DataSource(const ExperimentConfig& config) : config_(config) {}

  ExperimentConfig config_;
  bool use_file_ = false;
  Dataset pool_;
  std::optional<Dataset> test_pool_;
  std::vector<std::string> warnings_;
};

// Feature mean of the synthetic source.
Vector SyntheticMean(const DataConfig& data);

// Batch sizes whose r_{2k,m} the algorithm's schedule reads.
absl::StatusOr<std::vector<std::int64_t>> RequiredMomentBatchSizes(
    const AlgorithmConfig& algo, std::int64_t n);

// Hex FNV-1a hash of the config fingerprint, the algorithm and the cell
// coordinates.
std::string CellKey(const ExperimentConfig& config,
                    const AlgorithmConfig& algo, std::int64_t n,
                    const EpsilonSpec& eps, std::uint64_t seed);

struct CellOutcome {
  ResultRow row;
  RunRecord record;
  bool ok = false;
  std::string error;
};

// Runs one (algorithm, n, epsilon, seed) cell. Failures are reported in the
// outcome (FAILED row with the reason), never as an error status.
CellOutcome RunCell(const DataSource& source, const AlgorithmConfig& algo,
                    std::int64_t n, const EpsilonSpec& eps,
                    std::uint64_t seed);

struct RunOptions {
  // Progress lines ("cell i/N ...") go here when set.
  std::ostream* log = nullptr;
  // Overrides config.threads when positive.
  int threads = 0;
};

struct ExperimentSummary {
  int total_cells = 0;
  // Cells found complete in an existing results file.
  int resumed_cells = 0;
  int failed_cells = 0;
  // Rows produced by this invocation, in grid order.
  std::vector<ResultRow> rows;
};

// Executes the sweep grid algorithms x n x eps x seeds on a worker pool.
// Rows are appended to config.output_csv (when set) one flushed line per
// cell; cells whose key is already present are skipped.
absl::StatusOr<ExperimentSummary> RunExperiment(const ExperimentConfig& config,
                                                const RunOptions& options = {});

// Worker count: the requested value (hardware concurrency when 0), capped by
// HT_DPSCO_THREADS and by the number of cells.
int WorkerCount(int requested, int cells);

struct MomentRow {
  int k = 2;
  std::int64_t m = 1;
  double r_hat = 0.0;
  double r_root = 0.0;
};

// Expected empirical moments of orders k and 2k over dyadic batch sizes
// m = 1, 2, 4, ... up to weighted_n, on the auxiliary sample of `seed`.
absl::StatusOr<std::vector<MomentRow>> MomentTable(
    const ExperimentConfig& config, std::uint64_t seed);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_BENCH_EXPERIMENT_H_
