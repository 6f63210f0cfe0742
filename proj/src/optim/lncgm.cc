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

#include "ht_dpsco/optim/lncgm.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace ht_dpsco {
namespace {

// set ∩ ball, or `set` itself when the two do not meet.
ConstraintSet LocalizedSet(const ConstraintSet& set, const Ball& ball,
                           bool* fell_back) {
  absl::StatusOr<ConstraintSet> local = set.IntersectWith(ball);
  if (local.ok()) {
    *fell_back = false;
    return *std::move(local);
  }
  *fell_back = true;
  return set;
}

void RecordScheduleNotes(const PhaseSchedule& schedule,
                         const LncgmOptions& options,
                         const PrivacyBudget& budget, RunRecord* record) {
  if (record == nullptr) return;
  nlohmann::ordered_json& meta = record->metadata;
  // Guarantee stated for this calibration: (epsilon^2, delta), reported
  // as is next to the input budget.
  meta["stated_guarantee"] = {{"epsilon", budget.epsilon * budget.epsilon},
                              {"delta", budget.delta}};
  meta["noise_calibration"] = options.noise == NoiseCalibration::kStationary
                                  ? "stationary"
                                  : "trajectory";
  if (options.max_iterations.has_value()) {
    meta["iteration_cap"] = *options.max_iterations;
  }
  if (options.max_horizon.has_value()) {
    meta["horizon_cap"] = *options.max_horizon;
  }
  meta["lipschitz_plugin"] = schedule.lipschitz_plugin;
  if (!schedule.regime_violations.empty()) {
    nlohmann::ordered_json& list = meta["regime_violations"];
    if (!list.is_array()) list = nlohmann::ordered_json::array();
    for (const std::string& v : schedule.regime_violations) {
      if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
    }
  }
}

struct StageSetup {
  double lipschitz = 1.0;
  bool plugin = false;
};

absl::StatusOr<PhaseSchedule> StageSchedule(
    std::int64_t stage_n, double eta, const LocalizationOptions& options,
    const PrivacyBudget& budget, const LossOracle& loss,
    const MomentProfile& moments, std::size_t d, const StageSetup& setup) {
  LncgmScheduleParams params;
  params.n = stage_n;
  params.eta = eta;
  params.p = options.p;
  params.budget = budget;
  params.d = d;
  params.lipschitz = setup.lipschitz;
  params.lipschitz_plugin = setup.plugin;
  params.smoothness = loss.smoothness_alpha();
  params.regime = options.regime;
  return LncgmSchedule(params, moments);
}

absl::StatusOr<double> StageEta(const LocalizationOptions& options,
                                double radius, std::int64_t stage_n,
                                std::int64_t total_n,
                                const PrivacyBudget& budget,
                                const MomentProfile& moments, std::size_t d,
                                const StageSetup& setup) {
  if (options.rule == StepsizeRule::kFixed) {
    if (!(options.fixed_stepsize > 0.0)) {
      return absl::InvalidArgumentError("fixed stepsize must be positive");
    }
    return options.fixed_stepsize * radius / options.initial_radius;
  }
  if (!(moments.R2k_n > 0.0)) {
    return absl::FailedPreconditionError(
        "theory stepsize needs the weighted moment R_{2k,n} in the profile");
  }
  StageStepParams params;
  params.radius = radius;
  params.stage_n = stage_n;
  params.total_n = total_n;
  params.p = options.p;
  params.k = moments.k;
  params.R2k_n = moments.R2k_n;
  params.lipschitz = setup.lipschitz;
  params.epsilon = budget.epsilon;
  params.d = d;
  return options.stepsize_scale * StageStepsize(params);
}

PhaseTrace StageTrace(std::string stage, int index, std::int64_t stage_n,
                      double eta, double radius, const PrivacyBudget& budget,
                      const Vector& output) {
  PhaseTrace trace;
  trace.stage = std::move(stage);
  trace.row.index = index;
  trace.row.batch_size = stage_n;
  trace.row.stepsize = eta;
  trace.row.radius = radius;
  trace.epsilon = budget.epsilon;
  trace.delta = budget.delta;
  trace.output = output;
  return trace;
}

}  // namespace

absl::StatusOr<Vector> LncgmFromDrawer(
    std::span<const Sample> data, BatchDrawer& drawer, const LossOracle& loss,
    const ConstraintSet& set, const Vector& w0, const PhaseSchedule& schedule,
    const PrivacyBudget& budget, const RandomStream& rng,
    const LncgmOptions& options, std::string_view stage, RunRecord* record) {
  if (w0.dim() != set.dim()) {
    return absl::InvalidArgumentError("LNC-GM dimension mismatch");
  }
  RecordScheduleNotes(schedule, options, budget, record);
  const double log_inv_delta = std::log(1.0 / budget.delta);
  const ProjectionOptions projection{options.gd.projection_tol, std::nullopt};
  Vector w = w0;
  for (const PhaseRow& row : schedule.rows) {
    absl::StatusOr<std::vector<std::size_t>> indices =
        drawer.Take(static_cast<std::size_t>(row.batch_size));
    if (!indices.ok()) {
      return absl::FailedPreconditionError(absl::StrCat(
          "schedule does not fit the dataset: ", indices.status().message()));
    }
    const std::vector<Sample> batch = Gather(data, *indices);
    std::int64_t steps = std::min(
        row.iterations, options.max_iterations.value_or(row.iterations));
    if (options.max_horizon.has_value()) {
      const double horizon_steps = std::ceil(*options.max_horizon / row.stepsize);
      if (horizon_steps < static_cast<double>(steps)) {
        steps = static_cast<std::int64_t>(horizon_steps);
      }
    }

    PhaseTrace trace;
    trace.stage = absl::StrFormat("%slncgm/%d", std::string(stage), row.index);
    trace.row = row;
    GdResult solved;
    double radius = row.radius;
    while (true) {
      bool fell_back = false;
      const ConstraintSet phase_set =
          LocalizedSet(set, Ball{w, radius}, &fell_back);
      absl::StatusOr<Vector> start = ProjectSet(w, phase_set, projection);
      if (!start.ok()) return start.status();
      absl::StatusOr<GdResult> gd = ClippedRegularizedGd(
          batch, loss, phase_set, steps, row.stepsize, row.clip,
          row.regularization, w, *start, options.gd);
      if (!gd.ok()) return gd.status();
      solved = *std::move(gd);
      trace.set_fallback = fell_back;
      const bool touches = !fell_back && steps > 0 &&
                           radius > 1e3 * options.gd.projection_tol &&
                           Distance(solved.w, w) >=
                               radius * (1.0 - 1e-9) - options.gd.projection_tol;
      if (!schedule.lipschitz_plugin || !touches) break;
      if (trace.radius_doublings >= options.max_radius_doublings) {
        return absl::FailedPreconditionError(absl::StrFormat(
            "phase %d optimum stays on the localization ball after %d radius "
            "doublings (radius %g)",
            row.index, trace.radius_doublings, radius));
      }
      radius *= 2.0;
      ++trace.radius_doublings;
    }
    trace.row.radius = radius;
    trace.iterations_run = solved.iterations;
    trace.clipped_fraction = solved.clipped_fraction;

    double sigma = row.noise;
    if (options.noise == NoiseCalibration::kTrajectory) {
      const double horizon =
          std::min(row.stepsize * static_cast<double>(steps),
                   1.0 / row.regularization);
      sigma = std::min(sigma, 8.0 * row.clip * std::sqrt(log_inv_delta) *
                                  horizon /
                                  (static_cast<double>(row.batch_size) *
                                   budget.epsilon));
    }
    RandomStream noise_rng = rng.Fork(static_cast<std::uint64_t>(row.index));
    trace.noise_seed = noise_rng.seed_material();
    trace.noise_sigma = sigma;
    w = AddGaussian(solved.w, sigma, noise_rng);
    trace.epsilon = budget.epsilon;
    trace.delta = budget.delta;
    trace.output = w;
    if (record != nullptr) record->phases.push_back(std::move(trace));
  }
  return w;
}

absl::StatusOr<Vector> Lncgm(std::span<const Sample> data,
                             const LossOracle& loss, const ConstraintSet& set,
                             const Vector& w0, const PhaseSchedule& schedule,
                             const PrivacyBudget& budget, RandomStream& rng,
                             const LncgmOptions& options, RunRecord* record) {
  if (schedule.total_batch_size() > static_cast<std::int64_t>(data.size())) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "schedule needs %d samples but the dataset has %d",
        schedule.total_batch_size(), data.size()));
  }
  BatchDrawer drawer(data.size(), rng);
  const RandomStream noise_root = rng.Fork(0);
  absl::StatusOr<Vector> out = LncgmFromDrawer(
      data, drawer, loss, set, w0, schedule, budget, noise_root, options, "",
      record);
  if (out.ok() && record != nullptr) {
    record->algorithm = "lncgm";
    record->final_iterate = *out;
    record->metadata["samples_used"] = drawer.consumed();
  }
  return out;
}

absl::StatusOr<double> LipschitzForRadii(const LossOracle& loss,
                                         const MomentProfile& moments,
                                         bool* plugin) {
  if (loss.lipschitz().has_value()) {
    *plugin = false;
    return *loss.lipschitz();
  }
  if (!(moments.max_gradient_norm > 0.0)) {
    return absl::FailedPreconditionError(
        "no Lipschitz constant: the loss has none and the moment profile "
        "carries no gradient-norm estimate");
  }
  *plugin = true;
  return moments.max_gradient_norm;
}

absl::StatusOr<PhaseSchedule> StandaloneLncgmSchedule(
    std::int64_t n, const LossOracle& loss, const PrivacyBudget& budget,
    const MomentProfile& moments, std::size_t d,
    const LocalizationOptions& options) {
  if (!(options.initial_radius > 0.0)) {
    return absl::InvalidArgumentError("initial radius must be positive");
  }
  StageSetup setup;
  absl::StatusOr<double> lipschitz =
      LipschitzForRadii(loss, moments, &setup.plugin);
  if (!lipschitz.ok()) return lipschitz.status();
  setup.lipschitz = *lipschitz;
  absl::StatusOr<double> eta = StageEta(options, options.initial_radius, n, n,
                                        budget, moments, d, setup);
  if (!eta.ok()) return eta.status();
  return StageSchedule(n, *eta, options, budget, loss, moments, d, setup);
}

absl::StatusOr<Vector> PrivateStochasticApproximation(
    std::span<const Sample> data, const LossOracle& loss,
    const ConstraintSet& set, const Vector& w1, const PrivacyBudget& budget,
    const MomentProfile& moments, RandomStream& rng,
    const LocalizationOptions& options, RunRecord* record) {
  const std::int64_t n = static_cast<std::int64_t>(data.size());
  absl::StatusOr<EqualPartition> partition = PsaPartition(n);
  if (!partition.ok()) return partition.status();
  if (!(options.initial_radius > 0.0)) {
    return absl::InvalidArgumentError("initial radius must be positive");
  }
  StageSetup setup;
  absl::StatusOr<double> lipschitz =
      LipschitzForRadii(loss, moments, &setup.plugin);
  if (!lipschitz.ok()) return lipschitz.status();
  setup.lipschitz = *lipschitz;

  BatchDrawer drawer(data.size(), rng);
  Vector w_hat = w1;
  double radius = options.initial_radius;
  for (std::int64_t l = 1; l <= partition->m; ++l) {
    absl::StatusOr<BatchDrawer> subset =
        drawer.Subset(static_cast<std::size_t>(partition->n0));
    if (!subset.ok()) return subset.status();
    absl::StatusOr<double> eta = StageEta(options, radius, partition->n0, n,
                                          budget, moments, w1.dim(), setup);
    if (!eta.ok()) return eta.status();
    absl::StatusOr<PhaseSchedule> schedule = StageSchedule(
        partition->n0, *eta, options, budget, loss, moments, w1.dim(), setup);
    if (!schedule.ok()) return schedule.status();
    bool fell_back = false;
    const ConstraintSet stage_set =
        LocalizedSet(set, Ball{w_hat, radius}, &fell_back);
    const std::string stage = absl::StrFormat("psa/%d/", l);
    absl::StatusOr<Vector> next = LncgmFromDrawer(
        data, *subset, loss, stage_set, w_hat, *schedule, budget,
        rng.Fork(static_cast<std::uint64_t>(l)), options.lncgm, stage, record);
    if (!next.ok()) return next.status();
    w_hat = *std::move(next);
    if (record != nullptr) {
      PhaseTrace trace = StageTrace(absl::StrFormat("psa/%d", l),
                                    static_cast<int>(l), partition->n0, *eta,
                                    radius, budget, w_hat);
      trace.set_fallback = fell_back;
      record->phases.push_back(std::move(trace));
    }
    radius /= 2.0;
  }
  if (record != nullptr) {
    record->algorithm = "psa";
    record->final_iterate = w_hat;
    record->metadata["stages"] = partition->m;
    record->metadata["stage_n"] = partition->n0;
    record->metadata["stepsize_rule"] =
        options.rule == StepsizeRule::kTheory ? "theory" : "fixed";
    record->metadata["samples_used"] = drawer.consumed();
  }
  return w_hat;
}

absl::StatusOr<Vector> IteratedLncgm(std::span<const Sample> data,
                                     const LossOracle& loss,
                                     const ConstraintSet& set, const Vector& w0,
                                     double theta_bar,
                                     const PrivacyBudget& budget,
                                     const MomentProfile& moments,
                                     RandomStream& rng,
                                     const LocalizationOptions& options,
                                     RunRecord* record) {
  const std::int64_t n = static_cast<std::int64_t>(data.size());
  absl::StatusOr<GeometricPartition> partition =
      IteratedPartition(n, theta_bar, options.base2_logs);
  if (!partition.ok()) return partition.status();
  if (!(options.initial_radius > 0.0)) {
    return absl::InvalidArgumentError("initial radius must be positive");
  }
  StageSetup setup;
  absl::StatusOr<double> lipschitz =
      LipschitzForRadii(loss, moments, &setup.plugin);
  if (!lipschitz.ok()) return lipschitz.status();
  setup.lipschitz = *lipschitz;

  BatchDrawer drawer(data.size(), rng);
  Vector w = w0;
  double radius = options.initial_radius;
  for (int t = 1; t <= partition->stages; ++t) {
    const std::int64_t stage_n = partition->sizes[t - 1];
    absl::StatusOr<BatchDrawer> subset =
        drawer.Subset(static_cast<std::size_t>(stage_n));
    if (!subset.ok()) return subset.status();
    absl::StatusOr<double> eta = StageEta(options, radius, stage_n, n, budget,
                                          moments, w0.dim(), setup);
    if (!eta.ok()) return eta.status();
    absl::StatusOr<PhaseSchedule> schedule = StageSchedule(
        stage_n, *eta, options, budget, loss, moments, w0.dim(), setup);
    if (!schedule.ok()) return schedule.status();
    const std::string stage = absl::StrFormat("ilncgm/%d/", t);
    absl::StatusOr<Vector> next = LncgmFromDrawer(
        data, *subset, loss, set, w, *schedule, budget,
        rng.Fork(static_cast<std::uint64_t>(t)), options.lncgm, stage, record);
    if (!next.ok()) return next.status();
    w = *std::move(next);
    if (record != nullptr) {
      record->phases.push_back(StageTrace(absl::StrFormat("ilncgm/%d", t), t,
                                          stage_n, *eta, radius, budget, w));
    }
    radius /= 2.0;
  }
  if (record != nullptr) {
    record->algorithm = "ilncgm";
    record->final_iterate = w;
    record->metadata["stages"] = partition->stages;
    record->metadata["stage_sizes"] = partition->sizes;
    record->metadata["partition_logs"] = partition->base2_logs ? "log2" : "ln";
    record->metadata["stepsize_rule"] =
        options.rule == StepsizeRule::kTheory ? "theory" : "fixed";
    record->metadata["samples_used"] = drawer.consumed();
  }
  return w;
}

}  // namespace ht_dpsco
