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

#include "ht_dpsco/bench/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ht_dpsco/losses/oracles.h"
#include "ht_dpsco/optim/dp_sgd.h"
#include "ht_dpsco/optim/lncgm.h"
#include "ht_dpsco/optim/pnca.h"
#include "ht_dpsco/optim/schedule.h"
#include "ht_dpsco/privacy/random.h"

namespace ht_dpsco {
namespace {

// Stream tags of the per-cell random path (seed, tag, n).
enum StreamTag : std::uint64_t {
  kTrainStream = 1,
  kAuxStream = 2,
  kTestStream = 3,
  kSplitStream = 4,
  kMomentStream = 5,
  kAlgorithmStream = 6,
};

std::uint64_t StreamSeed(std::uint64_t seed, StreamTag tag, std::int64_t n) {
  return RandomStream::Derive(seed, {tag, static_cast<std::uint64_t>(n)})
      .seed_material();
}

// "$NAME" reads the environment variable NAME; anything else is a path.
std::string ResolvePath(const std::string& path) {
  if (path.empty() || path[0] != '$') return path;
  const char* value = std::getenv(path.c_str() + 1);
  return value == nullptr ? std::string() : std::string(value);
}

void PadFeatures(Dataset& dataset, std::size_t d) {
  if (dataset.d >= d) return;
  for (Sample& sample : dataset.samples) {
    std::vector<double> values(sample.features.begin(), sample.features.end());
    values.resize(d, 0.0);
    sample.features = Vector(std::move(values));
  }
  dataset.d = d;
}

Dataset Slice(const Dataset& source, std::size_t begin, std::size_t end,
              const std::string& role) {
  Dataset out;
  out.d = source.d;
  out.name = absl::StrCat(source.name, "/", role);
  out.provenance.source = Provenance::Source::kDerived;
  out.provenance.generator = absl::StrCat(role, " of ", source.name);
  out.samples.assign(source.samples.begin() + begin,
                     source.samples.begin() + end);
  return out;
}

absl::StatusOr<std::unique_ptr<LossOracle>> MakeLoss(
    const ExperimentConfig& config, const ConstraintSet& set,
    const DataBounds& bounds) {
  const LossConfig& loss = config.loss;
  if (loss.id == "synthetic") {
    if (config.data.source != "synthetic") {
      return absl::InvalidArgumentError(
          "the synthetic loss needs the synthetic data source");
    }
    absl::StatusOr<std::unique_ptr<SyntheticTncOracle>> oracle =
        SyntheticTncOracle::Make(SyntheticMean(config.data), loss.theta, set);
    if (!oracle.ok()) return oracle.status();
    return std::unique_ptr<LossOracle>(*std::move(oracle));
  }
  if (loss.id == "l4") {
    absl::StatusOr<std::unique_ptr<L4RegressionOracle>> oracle =
        L4RegressionOracle::Make(set, bounds);
    if (!oracle.ok()) return oracle.status();
    return std::unique_ptr<LossOracle>(*std::move(oracle));
  }
  absl::StatusOr<std::unique_ptr<LogisticL2Oracle>> oracle =
      LogisticL2Oracle::Make(loss.lambda_reg, set, bounds);
  if (!oracle.ok()) return oracle.status();
  return std::unique_ptr<LossOracle>(*std::move(oracle));
}

DataBounds MergeBounds(const DataBounds& a, const DataBounds& b) {
  return {std::max(a.max_feature_norm, b.max_feature_norm),
          std::max(a.max_abs_label, b.max_abs_label)};
}

LocalizationOptions LocalizationFrom(const AlgorithmConfig& algo) {
  LocalizationOptions options;
  options.p = algo.p;
  options.initial_radius = algo.initial_radius;
  options.rule = algo.stepsize_rule == "fixed" ? StepsizeRule::kFixed
                                               : StepsizeRule::kTheory;
  options.stepsize_scale = algo.stepsize_scale;
  options.fixed_stepsize = algo.fixed_stepsize;
  options.regime =
      algo.regime == "warn" ? RegimePolicy::kWarn : RegimePolicy::kStrict;
  options.lncgm.noise = algo.noise_calibration == "stationary"
                            ? NoiseCalibration::kStationary
                            : NoiseCalibration::kTrajectory;
  options.lncgm.max_iterations = algo.max_iterations;
  options.lncgm.max_horizon = algo.max_horizon;
  return options;
}

PncaOptions PncaFrom(const AlgorithmConfig& algo) {
  PncaOptions options;
  options.iterations = algo.iterations;
  options.eta = algo.eta;
  options.shuffle.c_cal = algo.c_cal;
  options.shuffle.c_small = algo.c_small;
  options.initial_radius = algo.initial_radius;
  return options;
}

DpSgdOptions DpSgdFrom(const AlgorithmConfig& algo) {
  DpSgdOptions options;
  options.iterations = algo.iterations.value_or(options.iterations);
  options.batch_size = algo.batch_size;
  options.clip = algo.clip;
  options.stepsize = algo.stepsize;
  options.max_noise_multiplier = algo.max_noise_multiplier;
  options.non_private = algo.non_private;
  return options;
}

bool NeedsMoments(const AlgorithmConfig& algo) { return algo.id != "dpsgd"; }

bool NeedsWeightedMoment(const AlgorithmConfig& algo) {
  return (algo.id == "lncgm" || algo.id == "psa" || algo.id == "ilncgm") &&
         algo.stepsize_rule == "theory";
}

absl::StatusOr<MomentProfile> EstimateMoments(const ExperimentConfig& config,
                                              const AlgorithmConfig& algo,
                                              const Problem& problem,
                                              std::uint64_t seed,
                                              std::int64_t n) {
  absl::StatusOr<std::vector<std::int64_t>> sizes =
      RequiredMomentBatchSizes(algo, n);
  if (!sizes.ok()) return sizes.status();
  MomentProfileRequest request;
  request.k = config.moments.k;
  request.batch_sizes = *std::move(sizes);
  request.batches_per_size = config.moments.batches_per_size;
  if (NeedsWeightedMoment(algo)) {
    request.weighted_n =
        std::min<std::int64_t>(config.moments.weighted_n,
                               static_cast<std::int64_t>(problem.aux.size()));
  }
  RandomStream rng(StreamSeed(seed, kMomentStream, n));
  const std::vector<Vector> probes =
      SampleProbes(*problem.set, config.moments.probes, rng);
  return EstimateMomentProfile(problem.aux.samples, *problem.loss, request,
                               probes, rng);
}

absl::StatusOr<Vector> RunAlgorithm(const AlgorithmConfig& algo,
                                    const Problem& problem,
                                    const PrivacyBudget& budget,
                                    const MomentProfile& moments,
                                    RandomStream& rng, RunRecord* record) {
  const std::size_t d = problem.train.d;
  const Vector w0 = algo.w0.value_or(Vector(d));
  if (w0.dim() != d) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "w0 has dimension %d but the data has %d", w0.dim(), d));
  }
  const std::span<const Sample> data = problem.train.samples;
  const ConstraintSet& set = *problem.set;
  const LossOracle& loss = *problem.loss;
  if (algo.id == "lncgm") {
    const LocalizationOptions options = LocalizationFrom(algo);
    absl::StatusOr<PhaseSchedule> schedule = StandaloneLncgmSchedule(
        static_cast<std::int64_t>(data.size()), loss, budget, moments, d,
        options);
    if (!schedule.ok()) return schedule.status();
    return Lncgm(data, loss, set, w0, *schedule, budget, rng, options.lncgm,
                 record);
  }
  if (algo.id == "psa") {
    return PrivateStochasticApproximation(data, loss, set, w0, budget, moments,
                                          rng, LocalizationFrom(algo), record);
  }
  if (algo.id == "ilncgm") {
    return IteratedLncgm(data, loss, set, w0, algo.theta_bar, budget, moments,
                         rng, LocalizationFrom(algo), record);
  }
  if (algo.id == "pnca") {
    return PncaSgd(data, loss, set, w0, budget, moments, rng, PncaFrom(algo),
                   record);
  }
  if (algo.id == "ipnca") {
    return IteratedPncaSgd(data, loss, set, w0, algo.theta_bar, budget,
                           moments, rng, PncaFrom(algo), record);
  }
  return DpSgdBaseline(data, loss, set, w0, budget, rng, DpSgdFrom(algo),
                       record);
}

// Final metric plus the secondary metrics reported in the metadata.
absl::StatusOr<double> Evaluate(const Problem& problem, const Vector& w,
                                nlohmann::ordered_json& metrics) {
  if (std::optional<double> excess = problem.loss->ExcessRisk(w)) {
    metrics["excess_risk"] = *excess;
    return *excess;
  }
  if (problem.test.samples.empty()) {
    return absl::FailedPreconditionError(
        "no closed-form risk and no test sample to evaluate on");
  }
  const double m = static_cast<double>(problem.test.size());
  if (const auto* logistic =
          dynamic_cast<const LogisticL2Oracle*>(problem.loss.get())) {
    double cross_entropy = 0.0;
    double errors = 0.0;
    for (const Sample& s : problem.test.samples) {
      cross_entropy += logistic->CrossEntropy(w, s) / m;
      const double predicted = Dot(w, s.features) > 0.0 ? 1.0 : 0.0;
      if (predicted != s.label) errors += 1.0 / m;
    }
    metrics["test_cross_entropy"] = cross_entropy;
    metrics["test_misclassification"] = errors;
    return cross_entropy;
  }
  double fourth = 0.0;
  double squared = 0.0;
  for (const Sample& s : problem.test.samples) {
    const double r = Dot(w, s.features) - s.label;
    squared += r * r / m;
    fourth += r * r * r * r / m;
  }
  metrics["test_mean_fourth_power"] = fourth;
  metrics["test_mse"] = squared;
  return fourth;
}

struct Cell {
  const AlgorithmConfig* algo;
  std::int64_t n;
  EpsilonSpec eps;
  std::uint64_t seed;
  std::string key;
};

std::set<std::string> CompletedKeys(const ResultTable& table) {
  std::set<std::string> keys;
  for (const ResultRow& row : table.rows) {
    nlohmann::json meta = nlohmann::json::parse(row.metadata_json, nullptr,
                                                /*allow_exceptions=*/false);
    if (meta.is_object() && meta.contains("cell_key") &&
        meta["cell_key"].is_string()) {
      keys.insert(meta["cell_key"].get<std::string>());
    }
  }
  return keys;
}

}  // namespace

Vector SyntheticMean(const DataConfig& data) {
  if (data.mu.has_value()) return *data.mu;
  Vector mu(data.d);
  for (std::size_t i = 0; i < data.d; ++i) {
    mu[i] = 1.0 + 0.5 * static_cast<double>(i);
  }
  const double norm = Norm(mu);
  if (norm > 0.0) mu *= data.mu_norm / norm;
  return mu;
}

absl::StatusOr<std::shared_ptr<const DataSource>> DataSource::Load(
    const ExperimentConfig& config) {
  std::shared_ptr<DataSource> source(new DataSource(config));
  if (config.data.source != "libsvm") return source;
  const std::string path = ResolvePath(config.data.path);
  const bool available = !path.empty() && std::filesystem::exists(path);
  if (!available) {
    if (!config.data.allow_synthetic_fallback) {
      return absl::NotFoundError(absl::StrFormat(
          "libsvm input '%s' not found", path.empty() ? config.data.path : path));
    }
    source->warnings_.push_back(absl::StrFormat(
        "libsvm input '%s' unavailable; using the synthetic stand-in",
        config.data.path));
    return source;
  }
  LibsvmOptions options;
  if (config.data.d > 0) options.d_hint = config.data.d;
  options.binary_labels_to_01 = config.loss.id == "logistic";
  absl::StatusOr<Dataset> pool = ReadLibsvmFile(path, options);
  if (!pool.ok()) return pool.status();
  source->pool_ = *std::move(pool);
  const std::string test_path = ResolvePath(config.data.test_path);
  if (!test_path.empty()) {
    options.d_hint = source->pool_.d;
    absl::StatusOr<Dataset> test = ReadLibsvmFile(test_path, options);
    if (!test.ok()) return test.status();
    const std::size_t d = std::max(source->pool_.d, test->d);
    PadFeatures(source->pool_, d);
    PadFeatures(*test, d);
    source->test_pool_ = *std::move(test);
  }
  if (config.data.normalize) {
    NormalizeFeatures(source->pool_);
    if (source->test_pool_) NormalizeFeatures(*source->test_pool_);
  }
  source->use_file_ = true;
  return source;
}

absl::StatusOr<Problem> DataSource::Build(std::uint64_t seed,
                                          std::int64_t n) const {
  if (n < 1) return absl::InvalidArgumentError("cell needs n >= 1");
  Problem problem;
  problem.warnings = warnings_;
  if (use_file_) {
    const std::size_t held_out_needed =
        config_.data.aux_n + (test_pool_ ? 0 : 1);
    if (pool_.size() < static_cast<std::size_t>(n) + held_out_needed) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "libsvm file has %d samples; n = %d plus %d held out are needed",
          pool_.size(), n, held_out_needed));
    }
    RandomStream rng(StreamSeed(seed, kSplitStream, 0));
    absl::StatusOr<SplitResult> split =
        Split(pool_, static_cast<std::size_t>(n), rng);
    if (!split.ok()) return split.status();
    problem.train = std::move(split->train);
    const Dataset& rest = split->test;
    problem.aux = Slice(rest, 0, config_.data.aux_n, "aux");
    problem.test = test_pool_ ? *test_pool_
                              : Slice(rest, config_.data.aux_n, rest.size(),
                                      "test");
  } else {
    const Vector mu = SyntheticMean(config_.data);
    absl::StatusOr<Dataset> train = MaterializeSynthetic(
        config_.data.sampler, mu, static_cast<std::size_t>(n),
        StreamSeed(seed, kTrainStream, n));
    if (!train.ok()) return train.status();
    problem.train = *std::move(train);
    absl::StatusOr<Dataset> aux =
        MaterializeSynthetic(config_.data.sampler, mu, config_.data.aux_n,
                             StreamSeed(seed, kAuxStream, 0));
    if (!aux.ok()) return aux.status();
    problem.aux = *std::move(aux);
    if (config_.loss.id != "synthetic") {
      absl::StatusOr<Dataset> test =
          MaterializeSynthetic(config_.data.sampler, mu, config_.data.test_n,
                               StreamSeed(seed, kTestStream, 0));
      if (!test.ok()) return test.status();
      problem.test = *std::move(test);
    }
  }
  absl::StatusOr<ConstraintSet> set =
      ConstraintSet::MakeBall(Vector(problem.train.d), config_.loss.radius);
  if (!set.ok()) return set.status();
  problem.set = *std::move(set);
  // Constants are computed from public samples only.
  DataBounds bounds = ComputeBounds(problem.aux);
  if (!problem.test.samples.empty()) {
    bounds = MergeBounds(bounds, ComputeBounds(problem.test));
  }
  absl::StatusOr<std::unique_ptr<LossOracle>> loss =
      MakeLoss(config_, *problem.set, bounds);
  if (!loss.ok()) return loss.status();
  problem.loss = *std::move(loss);
  for (const Sample& sample : problem.train.samples) {
    if (absl::Status s = problem.loss->ValidateSample(sample); !s.ok()) {
      return s;
    }
  }
  return problem;
}

absl::StatusOr<std::vector<std::int64_t>> RequiredMomentBatchSizes(
    const AlgorithmConfig& algo, std::int64_t n) {
  std::vector<std::int64_t> sizes;
  if (algo.id == "lncgm") {
    sizes = LncgmBatchSizes(n);
  } else if (algo.id == "psa") {
    absl::StatusOr<EqualPartition> partition = PsaPartition(n);
    if (!partition.ok()) return partition.status();
    sizes = LncgmBatchSizes(partition->n0);
  } else if (algo.id == "ilncgm") {
    absl::StatusOr<GeometricPartition> partition =
        IteratedPartition(n, algo.theta_bar);
    if (!partition.ok()) return partition.status();
    for (std::int64_t stage_n : partition->sizes) {
      for (std::int64_t m : LncgmBatchSizes(stage_n)) sizes.push_back(m);
    }
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  return sizes;
}

std::string CellKey(const ExperimentConfig& config,
                    const AlgorithmConfig& algo, std::int64_t n,
                    const EpsilonSpec& eps, std::uint64_t seed) {
  const std::string text =
      absl::StrCat(config.Fingerprint(), "|algo=", algo.id, "|n=", n,
                   "|eps=", eps.ToString(), "|seed=", seed);
  return absl::StrFormat("%016x", Fnv1a(text));
}

CellOutcome RunCell(const DataSource& source, const AlgorithmConfig& algo,
                    std::int64_t n, const EpsilonSpec& eps,
                    std::uint64_t seed) {
  const ExperimentConfig& config = source.config();
  const auto start = std::chrono::steady_clock::now();
  CellOutcome outcome;
  ResultRow& row = outcome.row;
  row.algo = algo.id;
  row.loss = config.loss.id;
  row.n = n;
  row.d = static_cast<std::int64_t>(config.data.d);
  row.seed = seed;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  meta["cell_key"] = CellKey(config, algo, n, eps, seed);
  meta["eps_spec"] = eps.ToString();

  auto finish = [&](absl::Status status) {
    row.wallclock_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    if (!status.ok()) {
      outcome.ok = false;
      outcome.error = status.ToString();
      row.final_metric.reset();
      meta["error"] = outcome.error;
    }
    row.metadata_json = meta.dump();
    return outcome;
  };

  absl::StatusOr<double> delta = config.DeltaFor(n);
  if (!delta.ok()) return finish(delta.status());
  row.delta = *delta;
  row.eps = eps.Resolve(n, *delta);
  absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Make(row.eps, *delta);
  if (!budget.ok()) return finish(budget.status());

  absl::StatusOr<Problem> problem = source.Build(seed, n);
  if (!problem.ok()) return finish(problem.status());
  row.d = static_cast<std::int64_t>(problem->train.d);
  if (!problem->warnings.empty()) meta["warnings"] = problem->warnings;
  meta["data"] = problem->train.provenance.ToString();

  MomentProfile moments;
  if (NeedsMoments(algo)) {
    absl::StatusOr<MomentProfile> estimated =
        EstimateMoments(config, algo, *problem, seed, n);
    if (!estimated.ok()) return finish(estimated.status());
    moments = *std::move(estimated);
    meta["moments"] = {{"k", moments.k},
                       {"r_k", moments.r_k},
                       {"R2k_n", moments.R2k_n},
                       {"max_gradient_norm", moments.max_gradient_norm},
                       {"batch_sizes", moments.r2k_by_batch.size()},
                       {"wrapped", moments.wrapped}};
  }

  RandomStream rng(StreamSeed(seed, kAlgorithmStream, n));
  absl::StatusOr<Vector> w =
      RunAlgorithm(algo, *problem, *budget, moments, rng, &outcome.record);
  if (!w.ok()) return finish(w.status());
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  absl::StatusOr<double> metric = Evaluate(*problem, *w, metrics);
  if (!metric.ok()) return finish(metric.status());
  row.final_metric = *metric;
  outcome.ok = true;
  const Vector w0 = algo.w0.value_or(Vector(problem->train.d));
  if (std::optional<double> initial = problem->loss->ExcessRisk(w0)) {
    metrics["initial_excess_risk"] = *initial;
  }
  meta["metrics"] = metrics;
  meta["record"] = outcome.record.metadata;
  meta["phases"] = outcome.record.phases.size();
  const PrivacyBudget spent = outcome.record.TotalBudget();
  meta["budget_spent"] = {{"epsilon", spent.epsilon}, {"delta", spent.delta}};
  return finish(absl::OkStatus());
}

int WorkerCount(int requested, int cells) {
  int workers = requested > 0
                    ? requested
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("HT_DPSCO_THREADS")) {
    const int limit = std::atoi(cap);
    if (limit > 0) workers = std::min(workers, limit);
  }
  return std::max(1, std::min(workers, std::max(cells, 1)));
}

absl::StatusOr<ExperimentSummary> RunExperiment(const ExperimentConfig& config,
                                                const RunOptions& options) {
  absl::StatusOr<std::shared_ptr<const DataSource>> source =
      DataSource::Load(config);
  if (!source.ok()) return source.status();

  std::vector<Cell> cells;
  for (const AlgorithmConfig& algo : config.algorithms) {
    for (std::int64_t n : config.n_values) {
      for (const EpsilonSpec& eps : config.epsilons) {
        for (std::uint64_t seed : config.seeds) {
          cells.push_back(
              {&algo, n, eps, seed, CellKey(config, algo, n, eps, seed)});
        }
      }
    }
  }
  ExperimentSummary summary;
  summary.total_cells = static_cast<int>(cells.size());

  std::set<std::string> done;
  std::ofstream csv;
  if (!config.output_csv.empty()) {
    const bool exists = std::filesystem::exists(config.output_csv) &&
                        std::filesystem::file_size(config.output_csv) > 0;
    bool needs_newline = false;
    if (exists) {
      absl::StatusOr<ResultTable> table = ReadResultsFile(config.output_csv);
      if (!table.ok()) return table.status();
      done = CompletedKeys(*table);
      std::ifstream tail(config.output_csv, std::ios::binary);
      tail.seekg(-1, std::ios::end);
      char last = '\n';
      tail.get(last);
      needs_newline = last != '\n';
    }
    csv.open(config.output_csv, std::ios::app | std::ios::binary);
    if (!csv) {
      return absl::PermissionDeniedError(absl::StrFormat(
          "cannot open results file '%s' for appending", config.output_csv));
    }
    if (needs_newline) csv << '\n';
    if (!exists) csv << CsvHeader() << '\n' << std::flush;
  }
  std::ofstream trajectory;
  if (!config.trajectory_path.empty()) {
    trajectory.open(config.trajectory_path, std::ios::app | std::ios::binary);
    if (!trajectory) {
      return absl::PermissionDeniedError(absl::StrFormat(
          "cannot open trajectory file '%s'", config.trajectory_path));
    }
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (done.count(cells[i].key)) {
      ++summary.resumed_cells;
    } else {
      pending.push_back(i);
    }
  }

  std::vector<std::optional<ResultRow>> produced(cells.size());
  std::mutex writer;
  std::atomic<std::size_t> next{0};
  int finished = 0;
  auto work = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size()) return;
      const Cell& cell = cells[pending[slot]];
      CellOutcome outcome =
          RunCell(**source, *cell.algo, cell.n, cell.eps, cell.seed);
      std::lock_guard<std::mutex> lock(writer);
      if (csv.is_open()) csv << FormatResultRow(outcome.row) << '\n' << std::flush;
      if (trajectory.is_open() && outcome.ok) {
        nlohmann::ordered_json line = {{"cell_key", cell.key},
                                       {"algo", outcome.row.algo},
                                       {"n", outcome.row.n},
                                       {"eps", outcome.row.eps},
                                       {"seed", outcome.row.seed},
                                       {"record", outcome.record.ToJson(true)}};
        trajectory << line.dump() << '\n' << std::flush;
      }
      ++finished;
      if (!outcome.ok) ++summary.failed_cells;
      if (options.log != nullptr) {
        *options.log << absl::StrFormat(
                            "cell %d/%d %s n=%d eps=%.4g seed=%d %s (%.0f ms)",
                            finished, pending.size(), outcome.row.algo,
                            outcome.row.n, outcome.row.eps, outcome.row.seed,
                            outcome.ok ? "ok" : "FAILED: " + outcome.error,
                            outcome.row.wallclock_ms)
                     << std::endl;
      }
      produced[pending[slot]] = std::move(outcome.row);
    }
  };
  const int workers = WorkerCount(
      options.threads > 0 ? options.threads : config.threads,
      static_cast<int>(pending.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  for (std::optional<ResultRow>& row : produced) {
    if (row.has_value()) summary.rows.push_back(*std::move(row));
  }
  if (csv.is_open() && !csv) {
    return absl::DataLossError(
        absl::StrFormat("write to '%s' failed", config.output_csv));
  }
  return summary;
}

absl::StatusOr<std::vector<MomentRow>> MomentTable(
    const ExperimentConfig& config, std::uint64_t seed) {
  absl::StatusOr<std::shared_ptr<const DataSource>> source =
      DataSource::Load(config);
  if (!source.ok()) return source.status();
  const std::int64_t n = config.n_values.front();
  absl::StatusOr<Problem> problem = (*source)->Build(seed, n);
  if (!problem.ok()) return problem.status();
  RandomStream rng(StreamSeed(seed, kMomentStream, n));
  const std::vector<Vector> probes =
      SampleProbes(*problem->set, config.moments.probes, rng);
  const std::int64_t largest = std::min<std::int64_t>(
      config.moments.weighted_n, static_cast<std::int64_t>(problem->aux.size()));
  std::vector<MomentRow> rows;
  for (int k : {config.moments.k, 2 * config.moments.k}) {
    for (std::int64_t m = 1; m <= largest; m *= 2) {
      absl::StatusOr<MomentEstimate> estimate = ExpectedEmpiricalMoment(
          problem->aux.samples, *problem->loss, k, m,
          config.moments.batches_per_size, probes, rng);
      if (!estimate.ok()) return estimate.status();
      rows.push_back({k, m, estimate->raw, estimate->root});
    }
  }
  return rows;
}

}  // namespace ht_dpsco
