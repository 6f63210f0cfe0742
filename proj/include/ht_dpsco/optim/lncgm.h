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

#ifndef HT_DPSCO_OPTIM_LNCGM_H_
#define HT_DPSCO_OPTIM_LNCGM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "absl/status/statusor.h"
#include "ht_dpsco/core/geometry.h"
#include "ht_dpsco/estimator/moments.h"
#include "ht_dpsco/losses/loss.h"
#include "ht_dpsco/optim/batches.h"
#include "ht_dpsco/optim/clipped_gd.h"
#include "ht_dpsco/optim/run_record.h"
#include "ht_dpsco/optim/schedule.h"
#include "ht_dpsco/privacy/calibration.h"
#include "ht_dpsco/privacy/random.h"

namespace ht_dpsco {

// Sensitivity used for the output noise of a localized phase.
enum class NoiseCalibration {
  // 2 C_i / (n_i lambda_i): the bound for a fully converged phase; gives the
  // scheduled sigma_i.
  kStationary,
  // (2 C_i / n_i) eta_i min(T, 1 / (eta_i lambda_i)) for the T steps actually
  // run; never larger than kStationary.
  kTrajectory,
};

struct LncgmOptions {
  // Caps every phase's T_i (the scheduled value stays in the trace).
  std::optional<std::int64_t> max_iterations;
  // Caps every phase's T_i at ceil(max_horizon / eta_i), so eta_i T_i stays
  // at most max_horizon whatever the stepsize.
  std::optional<double> max_horizon;
  NoiseCalibration noise = NoiseCalibration::kStationary;
  // Plug-in Lipschitz radii are doubled while the phase optimum touches the
  // localization ball, at most this many times.
  int max_radius_doublings = 3;
  GdOptions gd;
};

// Localized noisy clipped gradient method: phase i draws a fresh batch of
// n_i samples, runs clipped regularized GD over set ∩ B(w_{i-1}, D_i)
// starting from the projection of w_{i-1}, and adds N(0, sigma_i^2 I).
absl::StatusOr<Vector> Lncgm(std::span<const Sample> data,
                             const LossOracle& loss, const ConstraintSet& set,
                             const Vector& w0, const PhaseSchedule& schedule,
                             const PrivacyBudget& budget, RandomStream& rng,
                             const LncgmOptions& options = {},
                             RunRecord* record = nullptr);

// As Lncgm, drawing batches from `drawer` (indices into `data`); phase traces
// are labelled "<stage>/lncgm/<i>".
absl::StatusOr<Vector> LncgmFromDrawer(
    std::span<const Sample> data, BatchDrawer& drawer, const LossOracle& loss,
    const ConstraintSet& set, const Vector& w0, const PhaseSchedule& schedule,
    const PrivacyBudget& budget, const RandomStream& rng,
    const LncgmOptions& options, std::string_view stage, RunRecord* record);

enum class StepsizeRule {
  // The stage stepsize formula (StageStepsize) times `stepsize_scale`.
  kTheory,
  // fixed_stepsize * R_{l-1} / R_0.
  kFixed,
};

struct LocalizationOptions {
  double p = 1.0;
  double initial_radius = 1.0;
  StepsizeRule rule = StepsizeRule::kTheory;
  double stepsize_scale = 1.0;
  double fixed_stepsize = 1.0;
  RegimePolicy regime = RegimePolicy::kStrict;
  // Log base of the geometric partition (iterated variants only).
  bool base2_logs = true;
  LncgmOptions lncgm;
};

// Lipschitz constant for the radii: the loss's own, else the plug-in
// max_gradient_norm of the moment profile.
absl::StatusOr<double> LipschitzForRadii(const LossOracle& loss,
                                         const MomentProfile& moments,
                                         bool* plugin);

// Equal-partition localization: stage l runs LNC-GM on n0 fresh samples over
// set ∩ B(w_{l-1}, R_{l-1}) and halves the radius.
// Schedule of a standalone LNC-GM run over n samples. The base stepsize is
// chosen by `options` exactly as for the first stage of the localized
// variants (radius `options.initial_radius`, stage size n).
absl::StatusOr<PhaseSchedule> StandaloneLncgmSchedule(
    std::int64_t n, const LossOracle& loss, const PrivacyBudget& budget,
    const MomentProfile& moments, std::size_t d,
    const LocalizationOptions& options);

absl::StatusOr<Vector> PrivateStochasticApproximation(
    std::span<const Sample> data, const LossOracle& loss,
    const ConstraintSet& set, const Vector& w1, const PrivacyBudget& budget,
    const MomentProfile& moments, RandomStream& rng,
    const LocalizationOptions& options = {}, RunRecord* record = nullptr);

// Geometric-partition localization: stage t runs LNC-GM on n_t fresh samples
// over `set`, with the stage stepsize computed at the halving radius.
absl::StatusOr<Vector> IteratedLncgm(std::span<const Sample> data,
                                     const LossOracle& loss,
                                     const ConstraintSet& set, const Vector& w0,
                                     double theta_bar,
                                     const PrivacyBudget& budget,
                                     const MomentProfile& moments,
                                     RandomStream& rng,
                                     const LocalizationOptions& options = {},
                                     RunRecord* record = nullptr);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_OPTIM_LNCGM_H_
