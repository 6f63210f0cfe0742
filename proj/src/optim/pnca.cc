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

#include "ht_dpsco/optim/pnca.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "ht_dpsco/estimator/clipped_mean.h"
#include "ht_dpsco/optim/batches.h"
#include "ht_dpsco/optim/schedule.h"

namespace ht_dpsco {
namespace {

absl::StatusOr<Vector> RunPnca(std::span<const Sample> data,
                               BatchDrawer& drawer, const LossOracle& loss,
                               const ConstraintSet& set, const Vector& w0,
                               const PrivacyBudget& budget,
                               const MomentProfile& moments,
                               const RandomStream& rng,
                               const PncaOptions& options,
                               const std::string& stage, int stage_index,
                               RunRecord* record) {
  const std::int64_t n = static_cast<std::int64_t>(drawer.remaining());
  const std::size_t d = w0.dim();
  if (d != set.dim()) {
    return absl::InvalidArgumentError("PNCA-SGD dimension mismatch");
  }
  if (n < 1) return absl::InvalidArgumentError("PNCA-SGD needs data");
  if (!(moments.r_k > 0.0) || moments.k < 2) {
    return absl::FailedPreconditionError(
        "PNCA-SGD needs a moment profile with r_k > 0 and k >= 2");
  }
  const double clip = PncaClip(moments.r_k, moments.k, budget, n, d);
  absl::StatusOr<ShuffleCalibration> calibration =
      ShuffleAmplifiedSigma(clip, budget, n, options.shuffle);
  if (!calibration.ok()) return calibration.status();

  const double diameter = set.diameter();
  std::int64_t steps = 0;
  if (options.iterations.has_value()) {
    steps = *options.iterations;
  } else {
    const double theory =
        PncaTheoryIterations(loss.smoothness_alpha(), diameter, moments.r_k,
                             moments.k, budget, n, d);
    steps = static_cast<std::int64_t>(std::ceil(theory));
  }
  steps = std::clamp<std::int64_t>(steps, 1, n);
  const std::int64_t batch_size = n / steps;
  const double batch_sigma =
      BatchMeanSigma(calibration->local_sigma, batch_size);
  double eta = 0.0;
  if (options.eta.has_value()) {
    eta = *options.eta;
  } else {
    const double spread = std::sqrt(
        moments.r_k * moments.r_k / static_cast<double>(batch_size) +
        static_cast<double>(d) * batch_sigma * batch_sigma);
    eta = std::max(4.0 * loss.smoothness_alpha(),
                   spread * std::pow(static_cast<double>(steps) + 2.0, 1.5) /
                       (std::sqrt(3.0) * diameter));
  }
  if (!(eta > 0.0)) {
    return absl::InvalidArgumentError("PNCA-SGD eta must be positive");
  }

  const ProjectionOptions projection{options.gd.projection_tol, std::nullopt};
  absl::StatusOr<Vector> start = ProjectSet(w0, set, projection);
  if (!start.ok()) return start.status();
  Vector w_prev = *start;
  Vector w_ag = w_prev;
  Vector grad(d);
  std::vector<double> scratch;
  RandomStream noise_rng = rng.Fork(static_cast<std::uint64_t>(stage_index));
  std::size_t clipped = 0;
  std::size_t evaluated = 0;
  for (std::int64_t t = 1; t <= steps; ++t) {
    const double alpha = AccelerationWeight(t);
    const double prox = ProxCoefficient(eta, t);
    Vector w_md = (1.0 - alpha) * w_ag;
    w_md.AddScaled(alpha, w_prev);
    absl::StatusOr<std::vector<std::size_t>> indices =
        t == steps ? drawer.TakeRest()
                   : drawer.Take(static_cast<std::size_t>(batch_size));
    if (!indices.ok()) return indices.status();
    const std::vector<Sample> batch = Gather(data, *indices);
    clipped += ClippedGradientMean(loss, w_md, batch, clip, grad, scratch);
    evaluated += batch.size();
    const double sigma = BatchMeanSigma(
        calibration->local_sigma, static_cast<std::int64_t>(batch.size()));
    for (double& g : grad) g += sigma * noise_rng.Normal();
    Vector moved = w_prev;
    moved.AddScaled(-alpha / prox, grad);
    absl::StatusOr<Vector> projected = ProjectSet(moved, set, projection);
    if (!projected.ok()) return projected.status();
    w_prev = *std::move(projected);
    w_ag *= 1.0 - alpha;
    w_ag.AddScaled(alpha, w_prev);
    if (options.gd.observer) {
      options.gd.observer(set, w_prev);
      options.gd.observer(set, w_ag);
    }
  }

  if (record != nullptr) {
    PhaseTrace trace;
    trace.stage = stage;
    trace.row.index = stage_index;
    trace.row.batch_size = batch_size;
    trace.row.stepsize = eta;
    trace.row.iterations = steps;
    trace.row.radius = diameter / 2.0;
    trace.row.clip = clip;
    trace.row.noise = batch_sigma;
    trace.iterations_run = steps;
    trace.clipped_fraction =
        evaluated == 0 ? 0.0
                       : static_cast<double>(clipped) /
                             static_cast<double>(evaluated);
    trace.noise_sigma = batch_sigma;
    trace.noise_seed = noise_rng.seed_material();
    trace.epsilon = budget.epsilon;
    trace.delta = budget.delta;
    trace.output = w_ag;
    record->phases.push_back(std::move(trace));

    nlohmann::ordered_json calib;
    calib["local_sigma"] = calibration->local_sigma;
    calib["local_epsilon"] = calibration->local_epsilon;
    calib["local_delta"] = calibration->local_delta;
    calib["max_feasible_epsilon"] = calibration->max_feasible_epsilon;
    calib["c_cal"] = options.shuffle.c_cal;
    calib["batch_sigma"] = batch_sigma;
    // sqrt(C^2 T log(1/delta) / (n^2 eps^2)) without the calibration constant.
    calib["sigma_bare_form"] =
        clip * std::sqrt(static_cast<double>(steps) *
                         std::log(1.0 / budget.delta)) /
        (static_cast<double>(n) * budget.epsilon);
    calib["n"] = n;
    calib["steps"] = steps;
    calib["eta"] = eta;
    record->metadata["calibration"][stage] = std::move(calib);
    record->metadata["alpha_1"] = 1.0;
  }
  return w_ag;
}

}  // namespace

double BatchMeanSigma(double local_sigma, std::int64_t batch_size) {
  return local_sigma / std::sqrt(static_cast<double>(batch_size));
}

absl::StatusOr<Vector> PncaSgd(std::span<const Sample> data,
                               const LossOracle& loss, const ConstraintSet& set,
                               const Vector& w0, const PrivacyBudget& budget,
                               const MomentProfile& moments, RandomStream& rng,
                               const PncaOptions& options, RunRecord* record) {
  BatchDrawer drawer(data.size(), rng);
  absl::StatusOr<Vector> out =
      RunPnca(data, drawer, loss, set, w0, budget, moments, rng.Fork(0),
              options, "pnca", 1, record);
  if (out.ok() && record != nullptr) {
    record->algorithm = "pnca";
    record->final_iterate = *out;
    record->metadata["samples_used"] = drawer.consumed();
  }
  return out;
}

absl::StatusOr<Vector> IteratedPncaSgd(
    std::span<const Sample> data, const LossOracle& loss,
    const ConstraintSet& set, const Vector& w0, double theta_bar,
    const PrivacyBudget& budget, const MomentProfile& moments,
    RandomStream& rng, const PncaOptions& options, RunRecord* record) {
  absl::StatusOr<GeometricPartition> partition = IteratedPartition(
      static_cast<std::int64_t>(data.size()), theta_bar, options.base2_logs);
  if (!partition.ok()) return partition.status();
  BatchDrawer drawer(data.size(), rng);
  const RandomStream noise_root = rng.Fork(0);
  Vector w = w0;
  double radius = options.initial_radius;
  std::vector<double> radii;
  for (int t = 1; t <= partition->stages; ++t) {
    absl::StatusOr<BatchDrawer> subset =
        drawer.Subset(static_cast<std::size_t>(partition->sizes[t - 1]));
    if (!subset.ok()) return subset.status();
    absl::StatusOr<Vector> next =
        RunPnca(data, *subset, loss, set, w, budget, moments, noise_root,
                options, absl::StrFormat("ipnca/%d", t), t, record);
    if (!next.ok()) return next.status();
    w = *std::move(next);
    radii.push_back(radius);
    radius /= 2.0;
  }
  if (record != nullptr) {
    record->algorithm = "ipnca";
    record->final_iterate = w;
    record->metadata["stages"] = partition->stages;
    record->metadata["stage_sizes"] = partition->sizes;
    record->metadata["partition_logs"] = partition->base2_logs ? "log2" : "ln";
    record->metadata["stage_radii"] = radii;
    record->metadata["samples_used"] = drawer.consumed();
  }
  return w;
}

}  // namespace ht_dpsco
