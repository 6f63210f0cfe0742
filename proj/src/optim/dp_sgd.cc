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

#include "ht_dpsco/optim/dp_sgd.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "absl/strings/str_format.h"
#include "ht_dpsco/estimator/clipped_mean.h"

namespace ht_dpsco {

absl::StatusOr<double> DpSgdSigma(const PrivacyBudget& budget,
                                  std::int64_t iterations,
                                  std::int64_t batch_size, double clip) {
  if (iterations < 1 || batch_size < 1 || !(clip > 0.0)) {
    return absl::InvalidArgumentError(
        "DP-SGD needs T >= 1, b >= 1 and C > 0");
  }
  absl::StatusOr<double> rho = DpToZcdp(budget);
  if (!rho.ok()) return rho.status();
  const double sensitivity = 2.0 * clip / static_cast<double>(batch_size);
  return sensitivity * std::sqrt(static_cast<double>(iterations) / (2.0 * *rho));
}

absl::StatusOr<Vector> DpSgdBaseline(std::span<const Sample> data,
                                     const LossOracle& loss,
                                     const ConstraintSet& set, const Vector& w0,
                                     const PrivacyBudget& budget,
                                     RandomStream& rng,
                                     const DpSgdOptions& options,
                                     RunRecord* record) {
  const std::int64_t n = static_cast<std::int64_t>(data.size());
  if (options.batch_size < 1 || options.batch_size > n) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "DP-SGD batch size %d must lie in [1, %d]", options.batch_size, n));
  }
  if (!(options.stepsize > 0.0)) {
    return absl::InvalidArgumentError("DP-SGD stepsize must be positive");
  }
  double sigma = 0.0;
  double rho = 0.0;
  if (!options.non_private) {
    absl::StatusOr<double> calibrated = DpSgdSigma(
        budget, options.iterations, options.batch_size, options.clip);
    if (!calibrated.ok()) return calibrated.status();
    sigma = *calibrated;
    rho = *DpToZcdp(budget);
    const double multiplier =
        sigma / (2.0 * options.clip / static_cast<double>(options.batch_size));
    if (options.max_noise_multiplier.has_value() &&
        multiplier > *options.max_noise_multiplier) {
      const double z = *options.max_noise_multiplier;
      const auto max_steps =
          static_cast<std::int64_t>(std::floor(2.0 * rho * z * z));
      return absl::FailedPreconditionError(absl::StrFormat(
          "budget (%g, %g) needs noise multiplier %g > %g for T = %d; "
          "max feasible T is %d",
          budget.epsilon, budget.delta, multiplier, z, options.iterations,
          max_steps));
    }
  }

  const ProjectionOptions projection{options.gd.projection_tol, std::nullopt};
  absl::StatusOr<Vector> start = ProjectSet(w0, set, projection);
  if (!start.ok()) return start.status();
  Vector w = *start;
  Vector grad(w.dim());
  std::vector<double> scratch;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng.engine());
  RandomStream noise_rng = rng.Fork(0);
  std::size_t cursor = 0;
  std::int64_t epochs = 1;
  std::vector<Sample> batch;
  std::size_t clipped = 0;
  for (std::int64_t t = 0; t < options.iterations; ++t) {
    if (cursor + static_cast<std::size_t>(options.batch_size) > order.size()) {
      std::shuffle(order.begin(), order.end(), rng.engine());
      cursor = 0;
      ++epochs;
    }
    batch.clear();
    for (std::int64_t j = 0; j < options.batch_size; ++j) {
      batch.push_back(data[order[cursor++]]);
    }
    clipped += ClippedGradientMean(loss, w, batch, options.clip, grad, scratch);
    if (sigma > 0.0) {
      for (double& g : grad) g += sigma * noise_rng.Normal();
    }
    w.AddScaled(-options.stepsize, grad);
    absl::StatusOr<Vector> projected = ProjectSet(w, set, projection);
    if (!projected.ok()) return projected.status();
    w = *std::move(projected);
    if (options.gd.observer) options.gd.observer(set, w);
  }

  if (record != nullptr) {
    record->algorithm = "dpsgd";
    record->final_iterate = w;
    PhaseTrace trace;
    trace.stage = "dpsgd";
    trace.row.index = 1;
    trace.row.batch_size = options.batch_size;
    trace.row.stepsize = options.stepsize;
    trace.row.iterations = options.iterations;
    trace.row.clip = options.clip;
    trace.row.noise = sigma;
    trace.iterations_run = options.iterations;
    trace.clipped_fraction =
        options.iterations == 0
            ? 0.0
            : static_cast<double>(clipped) /
                  static_cast<double>(options.iterations * options.batch_size);
    trace.noise_sigma = sigma;
    trace.noise_seed = noise_rng.seed_material();
    trace.epsilon = options.non_private ? 0.0 : budget.epsilon;
    trace.delta = options.non_private ? 0.0 : budget.delta;
    trace.output = w;
    record->phases.push_back(std::move(trace));
    record->metadata["zcdp_rho"] = rho;
    record->metadata["epochs"] = epochs;
    record->metadata["non_private"] = options.non_private;
  }
  return w;
}

}  // namespace ht_dpsco
