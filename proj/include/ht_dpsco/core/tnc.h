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

#ifndef HT_DPSCO_CORE_TNC_H_
#define HT_DPSCO_CORE_TNC_H_

#include <cstddef>
#include <functional>
#include <span>

#include "absl/status/statusor.h"
#include "ht_dpsco/core/vector.h"

namespace ht_dpsco {

// Growth condition F(w) - F(w*) >= lambda * ||w - w*||^theta.
struct TncSpec {
  double theta = 2.0;
  double lambda = 1.0;

  static absl::StatusOr<TncSpec> Make(double theta, double lambda);
  // A lambda-strongly-convex risk satisfies (2, lambda/2).
  static TncSpec FromStrongConvexity(double strong_convexity) {
    return {2.0, strong_convexity / 2.0};
  }
};

struct TncReport {
  double min_ratio = 0.0;
  bool holds = false;
  std::size_t probes_used = 0;
};

// Probes closer than this to w* are skipped; the condition is vacuous there.
inline constexpr double kTncDegenerateRadius = 1e-9;

// Smallest observed ratio (F(w) - F(w*)) / ||w - w*||^theta over `probes`
// and whether it reaches spec.lambda. InvalidArgument when every probe is
// degenerate.
absl::StatusOr<TncReport> VerifyTnc(
    const std::function<double(const Vector&)>& risk, const Vector& w_star,
    const TncSpec& spec, std::span<const Vector> probes);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_CORE_TNC_H_
