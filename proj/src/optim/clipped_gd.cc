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

#include "ht_dpsco/optim/clipped_gd.h"

#include <vector>

#include "absl/strings/str_format.h"
#include "ht_dpsco/estimator/clipped_mean.h"

namespace ht_dpsco {

absl::StatusOr<GdResult> ClippedRegularizedGd(
    std::span<const Sample> batch, const LossOracle& loss,
    const ConstraintSet& set, std::int64_t iterations, double eta, double clip,
    double lambda_reg, const Vector& center, const Vector& start,
    const GdOptions& options) {
  if (iterations < 0 || !(eta > 0.0) || !(clip > 0.0) || !(lambda_reg >= 0.0)) {
    return absl::InvalidArgumentError(
        "clipped GD needs T >= 0, eta > 0, C > 0 and lambda >= 0");
  }
  if (iterations > 0 && batch.empty()) {
    return absl::InvalidArgumentError("clipped GD needs a nonempty batch");
  }
  if (start.dim() != set.dim() || center.dim() != set.dim()) {
    return absl::InvalidArgumentError("clipped GD dimension mismatch");
  }
  if (!set.Contains(start, options.projection_tol)) {
    return absl::InvalidArgumentError("clipped GD start point is outside the set");
  }
  const double blowup = 1e6 * std::max(set.diameter(), 1.0);
  const ProjectionOptions projection{options.projection_tol, std::nullopt};

  GdResult result;
  result.w = start;
  Vector grad(start.dim());
  std::vector<double> scratch;
  std::size_t clipped = 0;
  for (std::int64_t t = 0; t < iterations; ++t) {
    clipped += ClippedGradientMean(loss, result.w, batch, clip, grad, scratch);
    if (lambda_reg > 0.0) {
      for (std::size_t j = 0; j < grad.dim(); ++j) {
        grad[j] += lambda_reg * (result.w[j] - center[j]);
      }
    }
    result.w.AddScaled(-eta, grad);
    absl::StatusOr<Vector> projected = ProjectSet(result.w, set, projection);
    if (!projected.ok()) return projected.status();
    result.w = *std::move(projected);
    if (!result.w.IsFinite() || Norm(result.w) > blowup) {
      return absl::InternalError(absl::StrFormat(
          "numerical failure: iterate norm %g at step %d exceeds %g",
          Norm(result.w), t + 1, blowup));
    }
    if (options.observer) options.observer(set, result.w);
  }
  result.iterations = iterations;
  if (iterations > 0) {
    result.clipped_fraction =
        static_cast<double>(clipped) /
        (static_cast<double>(iterations) * static_cast<double>(batch.size()));
  }
  return result;
}

}  // namespace ht_dpsco
