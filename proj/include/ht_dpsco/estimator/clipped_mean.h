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

#ifndef HT_DPSCO_ESTIMATOR_CLIPPED_MEAN_H_
#define HT_DPSCO_ESTIMATOR_CLIPPED_MEAN_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ht_dpsco/core/vector.h"
#include "ht_dpsco/losses/loss.h"

namespace ht_dpsco {

// (1/n) sum_i Pi_C(z_i): the mean of the inputs after projecting each onto
// the l2 ball of radius C.
absl::StatusOr<Vector> ClippedMean(std::span<const Vector> z, double clip);

// Bias certificate r^(k) / ((k-1) C^(k-1)) for the clipped mean of vectors
// whose norm has raw k-th moment r^(k).
absl::StatusOr<double> ClippedMeanBiasBound(double raw_moment, int k,
                                            double clip);

// Clipped mean of per-sample gradients at `w`, written to `out`. Returns the
// number of gradients that were clipped. `scratch` is reused between calls.
// Preconditions (non-empty batch, clip > 0) are the caller's job; this runs
// inside the optimizers' inner loops.
std::size_t ClippedGradientMean(const LossOracle& loss, const Vector& w,
                                std::span<const Sample> batch, double clip,
                                Vector& out, std::vector<double>& scratch);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_ESTIMATOR_CLIPPED_MEAN_H_
