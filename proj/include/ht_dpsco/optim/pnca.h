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

#ifndef HT_DPSCO_OPTIM_PNCA_H_
#define HT_DPSCO_OPTIM_PNCA_H_

#include <cstdint>
#include <optional>
#include <span>

#include "absl/status/statusor.h"
#include "ht_dpsco/core/geometry.h"
#include "ht_dpsco/estimator/moments.h"
#include "ht_dpsco/losses/loss.h"
#include "ht_dpsco/optim/clipped_gd.h"
#include "ht_dpsco/optim/run_record.h"
#include "ht_dpsco/privacy/calibration.h"
#include "ht_dpsco/privacy/random.h"

namespace ht_dpsco {

struct PncaOptions {
  // Number of steps T; defaults to PncaTheoryIterations rounded up and
  // clamped to [1, n].
  std::optional<std::int64_t> iterations;
  // Base prox parameter eta of eta_t = 4 eta / (t(t+1)). Defaults to
  //   max{4 beta, s (T+2)^(3/2) / (sqrt(3) D)}
  // with beta the smoothness, D the set diameter and s^2 = r_k^2 / b +
  // d sigma^2 the variance proxy of one noisy clipped batch mean.
  std::optional<double> eta;
  ShuffleOptions shuffle;
  // Initial radius R_0 of the iterated variant (recorded, never enforced).
  double initial_radius = 1.0;
  bool base2_logs = true;
  GdOptions gd;
};

// Noise of one batch mean: sigma_1 / sqrt(b) for the per-report sigma_1.
double BatchMeanSigma(double local_sigma, std::int64_t batch_size);

// Shuffled noisy clipped accelerated SGD. The data are permuted once and
// split into T batches of floor(n/T) samples (leftovers join the last batch);
// step t evaluates the clipped batch mean at
//   w_md = (1 - alpha_t) w_ag + alpha_t w_{t-1},
// adds N(0, (sigma_1 / sqrt(b_t))^2 I), sets
//   w_t = Pi_set(w_{t-1} - (alpha_t / eta_t) g)
// and w_ag = alpha_t w_t + (1 - alpha_t) w_ag. Returns w_ag after T steps.
absl::StatusOr<Vector> PncaSgd(std::span<const Sample> data,
                               const LossOracle& loss, const ConstraintSet& set,
                               const Vector& w0, const PrivacyBudget& budget,
                               const MomentProfile& moments, RandomStream& rng,
                               const PncaOptions& options = {},
                               RunRecord* record = nullptr);

// Runs PncaSgd on the stages of the geometric partition, each started at the
// previous stage's output.
absl::StatusOr<Vector> IteratedPncaSgd(
    std::span<const Sample> data, const LossOracle& loss,
    const ConstraintSet& set, const Vector& w0, double theta_bar,
    const PrivacyBudget& budget, const MomentProfile& moments,
    RandomStream& rng, const PncaOptions& options = {},
    RunRecord* record = nullptr);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_OPTIM_PNCA_H_
