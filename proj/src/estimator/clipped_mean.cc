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

#include "ht_dpsco/estimator/clipped_mean.h"

#include <cmath>

#include "absl/strings/str_format.h"
#include "ht_dpsco/core/geometry.h"

namespace ht_dpsco {

absl::StatusOr<Vector> ClippedMean(std::span<const Vector> z, double clip) {
  if (z.empty()) {
    return absl::InvalidArgumentError("ClippedMean needs a non-empty input");
  }
  if (!(clip > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("clip threshold must be positive, got %g", clip));
  }
  const std::size_t d = z.front().dim();
  Vector sum(d);
  std::vector<double> scratch(d);
  for (const Vector& item : z) {
    if (item.dim() != d) {
      return absl::InvalidArgumentError("ClippedMean inputs differ in size");
    }
    if (!item.IsFinite()) {
      return absl::InvalidArgumentError("ClippedMean input is not finite");
    }
    std::copy(item.begin(), item.end(), scratch.begin());
    ClipToNorm(scratch, clip);
    for (std::size_t i = 0; i < d; ++i) sum[i] += scratch[i];
  }
  sum *= 1.0 / static_cast<double>(z.size());
  return sum;
}

absl::StatusOr<double> ClippedMeanBiasBound(double raw_moment, int k,
                                            double clip) {
  if (!(raw_moment > 0.0)) {
    return absl::InvalidArgumentError("moment must be positive");
  }
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("moment order must be at least 2, got %d", k));
  }
  if (!(clip > 0.0)) {
    return absl::InvalidArgumentError("clip threshold must be positive");
  }
  return raw_moment / ((k - 1) * std::pow(clip, k - 1));
}

std::size_t ClippedGradientMean(const LossOracle& loss, const Vector& w,
                                std::span<const Sample> batch, double clip,
                                Vector& out, std::vector<double>& scratch) {
  const std::size_t d = w.dim();
  if (out.dim() != d) out = Vector(d);
  std::fill(out.begin(), out.end(), 0.0);
  scratch.resize(d);
  std::size_t clipped = 0;
  for (const Sample& sample : batch) {
    loss.GradientInto(w, sample, scratch);
    if (ClipToNorm(scratch, clip)) ++clipped;
    for (std::size_t i = 0; i < d; ++i) out[i] += scratch[i];
  }
  out *= 1.0 / static_cast<double>(batch.size());
  return clipped;
}

}  // namespace ht_dpsco
