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

#include "ht_dpsco/core/tnc.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"

namespace ht_dpsco {

absl::StatusOr<TncSpec> TncSpec::Make(double theta, double lambda) {
  if (!(theta > 1.0) || !std::isfinite(theta)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("TNC theta must exceed 1, got %g", theta));
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("TNC lambda must be positive, got %g", lambda));
  }
  return TncSpec{theta, lambda};
}

absl::StatusOr<TncReport> VerifyTnc(
    const std::function<double(const Vector&)>& risk, const Vector& w_star,
    const TncSpec& spec, std::span<const Vector> probes) {
  if (probes.empty()) {
    return absl::InvalidArgumentError("VerifyTnc needs at least one probe");
  }
  const double f_star = risk(w_star);
  TncReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();
  for (const Vector& w : probes) {
    const double dist = Distance(w, w_star);
    if (dist < kTncDegenerateRadius) continue;
    const double ratio = (risk(w) - f_star) / std::pow(dist, spec.theta);
    report.min_ratio = std::min(report.min_ratio, ratio);
    ++report.probes_used;
  }
  if (report.probes_used == 0) {
    return absl::InvalidArgumentError(
        "every TNC probe coincides with the minimizer");
  }
  report.holds = report.min_ratio >= spec.lambda;
  return report;
}

}  // namespace ht_dpsco
