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

#ifndef HT_DPSCO_OPTIM_CLIPPED_GD_H_
#define HT_DPSCO_OPTIM_CLIPPED_GD_H_

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "ht_dpsco/core/geometry.h"
#include "ht_dpsco/core/vector.h"
#include "ht_dpsco/losses/loss.h"
#include "ht_dpsco/optim/run_record.h"

namespace ht_dpsco {

struct GdOptions {
  double projection_tol = kDefaultProjectionTolerance;
  IterateObserver observer;
};

struct GdResult {
  Vector w;
  std::int64_t iterations = 0;
  // Fraction of per-sample gradients that were clipped, over all steps.
  double clipped_fraction = 0.0;
};

// T steps of
//   w <- Pi_set[w - eta (ClippedMean(grad f(w, x_j)) + lambda (w - center))]
// from `start`, which must lie in `set`. Noise is the caller's job.
absl::StatusOr<GdResult> ClippedRegularizedGd(
    std::span<const Sample> batch, const LossOracle& loss,
    const ConstraintSet& set, std::int64_t iterations, double eta, double clip,
    double lambda_reg, const Vector& center, const Vector& start,
    const GdOptions& options = {});

}  // namespace ht_dpsco

#endif  // HT_DPSCO_OPTIM_CLIPPED_GD_H_
