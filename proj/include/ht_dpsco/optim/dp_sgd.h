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

#ifndef HT_DPSCO_OPTIM_DP_SGD_H_
#define HT_DPSCO_OPTIM_DP_SGD_H_

#include <cstdint>
#include <optional>
#include <span>

#include "absl/status/statusor.h"
#include "ht_dpsco/core/geometry.h"
#include "ht_dpsco/losses/loss.h"
#include "ht_dpsco/optim/clipped_gd.h"
#include "ht_dpsco/optim/run_record.h"
#include "ht_dpsco/privacy/calibration.h"
#include "ht_dpsco/privacy/random.h"

namespace ht_dpsco {

struct DpSgdOptions {
  std::int64_t iterations = 100;
  std::int64_t batch_size = 64;
  double clip = 1.0;
  double stepsize = 0.1;
  // Largest allowed sigma / sensitivity; budgets needing more noise than
  // this for the requested T are rejected.
  std::optional<double> max_noise_multiplier;
  // Skip privacy calibration entirely (sigma = 0).
  bool non_private = false;
  GdOptions gd;
};

// Per-step noise of T Gaussian steps with sensitivity 2C/b composing under
// zCDP to the (epsilon, delta) budget:
//   sigma = (2C/b) sqrt(T / (2 rho)),
//   rho = (sqrt(log(1/delta) + epsilon) - sqrt(log(1/delta)))^2.
absl::StatusOr<double> DpSgdSigma(const PrivacyBudget& budget,
                                  std::int64_t iterations,
                                  std::int64_t batch_size, double clip);

// Minibatch SGD with per-sample clipping and Gaussian noise; batches are
// contiguous slices of a permutation that is redrawn every epoch. Returns
// the final projected iterate.
absl::StatusOr<Vector> DpSgdBaseline(std::span<const Sample> data,
                                     const LossOracle& loss,
                                     const ConstraintSet& set, const Vector& w0,
                                     const PrivacyBudget& budget,
                                     RandomStream& rng,
                                     const DpSgdOptions& options = {},
                                     RunRecord* record = nullptr);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_OPTIM_DP_SGD_H_
