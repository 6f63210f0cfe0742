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

#ifndef HT_DPSCO_BENCH_CONFIG_H_
#define HT_DPSCO_BENCH_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ht_dpsco/losses/samplers.h"

namespace ht_dpsco {

enum class DeltaRule {
  // delta = fixed_delta for every n.
  kFixed,
  // delta = n^(-delta_power).
  kPower,
};

// One entry of the epsilon axis: a number, or the small-epsilon value
// sqrt(log(n / delta) / n) resolved per cell.
struct EpsilonSpec {
  bool small_regime = false;
  double value = 1.0;

  double Resolve(std::int64_t n, double delta) const;
  std::string ToString() const;
};

struct LossConfig {
  // synthetic | l4 | logistic
  std::string id = "synthetic";
  double theta = 2.0;
  double lambda_reg = 1e-3;
  // Radius of the origin centred l2 ball W.
  double radius = 1.0;
};

struct DataConfig {
  // synthetic | libsvm
  std::string source = "synthetic";
  std::size_t d = 2;
  // Mean of the feature distribution. When absent: mu_norm times the
  // normalized ramp (1, 1.5, 2, ...).
  std::optional<Vector> mu;
  double mu_norm = 0.5;
  SamplerSpec sampler;
  // Public sample from the same distribution used for moment estimation.
  std::size_t aux_n = 4096;
  // Held-out sample for the test metric (oracles without a closed form).
  std::size_t test_n = 4096;
  // libsvm inputs; `path` may name an environment variable via "$NAME".
  std::string path;
  std::string test_path;
  bool normalize = false;
  // Synthetic stand-in used when a libsvm path resolves to nothing.
  bool allow_synthetic_fallback = false;
};

struct MomentConfig {
  int k = 2;
  std::size_t probes = 32;
  std::int64_t batches_per_size = 2;
  std::int64_t weighted_n = 2048;
};

// Parameters of one algorithm in the sweep; unused keys are ignored by
// algorithms that do not read them.
struct AlgorithmConfig {
  // lncgm | psa | ilncgm | pnca | ipnca | dpsgd
  std::string id;
  double theta_bar = 2.0;
  double p = 1.0;
  double initial_radius = 1.0;
  // theory | fixed
  std::string stepsize_rule = "theory";
  double stepsize_scale = 1.0;
  double fixed_stepsize = 1.0;
  // trajectory | stationary
  std::string noise_calibration = "trajectory";
  std::optional<std::int64_t> max_iterations;
  std::optional<double> max_horizon;
  // strict | warn
  std::string regime = "strict";
  std::optional<std::int64_t> iterations;
  std::optional<double> eta;
  double c_cal = 1.0;
  double c_small = 1.0;
  std::int64_t batch_size = 64;
  double clip = 1.0;
  double stepsize = 0.1;
  std::optional<double> max_noise_multiplier;
  bool non_private = false;
  // Starting point; the origin when absent.
  std::optional<Vector> w0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<AlgorithmConfig> algorithms;
  LossConfig loss;
  DataConfig data;
  MomentConfig moments;
  std::vector<std::int64_t> n_values;
  std::vector<EpsilonSpec> epsilons;
  std::vector<std::uint64_t> seeds;
  DeltaRule delta_rule = DeltaRule::kPower;
  double delta_power = 1.1;
  double fixed_delta = 1e-5;
  std::string output_csv;
  std::string trajectory_path;
  // Worker count; 0 picks the hardware concurrency. HT_DPSCO_THREADS caps it.
  int threads = 0;

  absl::StatusOr<double> DeltaFor(std::int64_t n) const;
  // Canonical rendering of everything that determines a cell's result
  // (output paths and sweep axes excluded).
  std::string Fingerprint() const;
};

// Parses the INI text form:
//   [experiment]  name, algorithms, n, eps, seeds, delta_rule, delta_power,
//                 delta, output, trajectory, threads
//   [loss]        id, theta, lambda_reg, radius
//   [data]        source, d, mu, mu_norm, sampler, tail_index, scale,
//                 trunc_at, spike_p, spike_magnitude, labels, label_weights,
//                 label_noise, aux_n, test_n, path, test_path, normalize,
//                 synthetic_fallback
//   [moments]     k, probes, batches_per_size, weighted_n
//   [<algorithm>] one section per id listed in experiment.algorithms
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(const std::string& text);
absl::StatusOr<ExperimentConfig> ReadExperimentConfig(const std::string& path);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_BENCH_CONFIG_H_
