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

#include "ht_dpsco/privacy/calibration.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"

namespace ht_dpsco {
namespace {

bool PositiveFinite(double x) { return x > 0.0 && std::isfinite(x); }

// eps_0 as a function of the central epsilon; increasing in epsilon.
double LocalEpsilon(double clip, double epsilon, double delta, std::int64_t n,
                    double c_cal, double* local_sigma, double* local_delta) {
  PrivacyBudget budget{epsilon, delta};
  const double sigma = ShuffleSigmaFormula(clip, budget, n, c_cal);
  const double delta0 =
      (delta / 2.0) / (std::exp(epsilon) * static_cast<double>(n));
  if (local_sigma != nullptr) *local_sigma = sigma;
  if (local_delta != nullptr) *local_delta = delta0;
  return 2.0 * std::sqrt(2.0) * clip * std::sqrt(std::log(1.0 / delta0)) /
         sigma;
}

}  // namespace

absl::StatusOr<PrivacyBudget> PrivacyBudget::Make(double epsilon,
                                                  double delta) {
  if (!PositiveFinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive, got %g", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  return PrivacyBudget{epsilon, delta};
}

absl::StatusOr<ZcdpBudget> ZcdpBudget::Make(double rho) {
  if (!PositiveFinite(rho)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("rho must be positive, got %g", rho));
  }
  return ZcdpBudget{rho};
}

absl::StatusOr<double> GaussianSigma(double sensitivity,
                                     const PrivacyBudget& budget) {
  if (!(sensitivity >= 0.0) || !std::isfinite(sensitivity)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "sensitivity must be non-negative, got %g", sensitivity));
  }
  if (!(budget.epsilon > 0.0 && budget.epsilon <= 1.0)) {
    return absl::OutOfRangeError(absl::StrFormat(
        "Gaussian mechanism needs 0 < epsilon <= 1, got %g", budget.epsilon));
  }
  if (!(budget.delta > 0.0 && budget.delta <= 1.0)) {
    return absl::OutOfRangeError(absl::StrFormat(
        "Gaussian mechanism needs 0 < delta <= 1, got %g", budget.delta));
  }
  return 4.0 * sensitivity * std::sqrt(std::log(1.0 / budget.delta)) /
         budget.epsilon;
}

absl::StatusOr<double> ClippedMeanSensitivity(double clip, std::int64_t n) {
  if (!PositiveFinite(clip)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("clip threshold must be positive, got %g", clip));
  }
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("batch size must be at least 1, got %d", n));
  }
  return 2.0 * clip / static_cast<double>(n);
}

absl::StatusOr<double> ZcdpToDp(const ZcdpBudget& budget, double delta) {
  if (!PositiveFinite(budget.rho)) {
    return absl::InvalidArgumentError("rho must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  return budget.rho + 2.0 * std::sqrt(budget.rho * std::log(1.0 / delta));
}

absl::StatusOr<double> DpToZcdp(const PrivacyBudget& budget) {
  if (!PositiveFinite(budget.epsilon) ||
      !(budget.delta > 0.0 && budget.delta < 1.0)) {
    return absl::InvalidArgumentError("invalid (epsilon, delta) budget");
  }
  const double log_inv_delta = std::log(1.0 / budget.delta);
  const double root =
      std::sqrt(log_inv_delta + budget.epsilon) - std::sqrt(log_inv_delta);
  return root * root;
}

double GaussianZcdp(double sensitivity, double sigma) {
  return sensitivity * sensitivity / (2.0 * sigma * sigma);
}

double ShuffleSigmaFormula(double clip, const PrivacyBudget& budget,
                           std::int64_t n, double c_cal) {
  const double nd = static_cast<double>(n);
  return c_cal * clip *
         std::sqrt(std::log(2.0 / budget.delta) * std::log(nd / budget.delta)) /
         (budget.epsilon * std::sqrt(nd));
}

absl::StatusOr<ShuffleCalibration> ShuffleAmplifiedSigma(
    double clip, const PrivacyBudget& budget, std::int64_t n,
    const ShuffleOptions& options) {
  if (!PositiveFinite(clip)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("clip threshold must be positive, got %g", clip));
  }
  if (n < 1) {
    return absl::InvalidArgumentError("n must be positive");
  }
  if (!PositiveFinite(options.c_cal) || !PositiveFinite(options.c_small)) {
    return absl::InvalidArgumentError("c_cal and c_small must be positive");
  }
  if (absl::Status s = PrivacyBudget::Make(budget.epsilon, budget.delta).status();
      !s.ok()) {
    return s;
  }
  const double nd = static_cast<double>(n);
  const double delta_hat = budget.delta / 2.0;
  if (nd < 16.0 * std::log(2.0 / delta_hat)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "shuffle amplification needs n >= 16 log(2/delta_hat) = %g, got n = %d",
        16.0 * std::log(2.0 / delta_hat), n));
  }

  // eps_0 is increasing in epsilon, so bisect for the eps_0 = 1/2 boundary.
  const double regime_cap =
      std::min(1.0, options.c_small * std::sqrt(std::log(nd / budget.delta) / nd));
  double lo = 0.0;
  double hi = regime_cap;
  if (LocalEpsilon(clip, hi, budget.delta, n, options.c_cal, nullptr,
                   nullptr) > 0.5) {
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (LocalEpsilon(clip, mid, budget.delta, n, options.c_cal, nullptr,
                       nullptr) <= 0.5) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    hi = lo;
  }
  ShuffleCalibration out;
  out.max_feasible_epsilon = hi;
  out.local_epsilon = LocalEpsilon(clip, budget.epsilon, budget.delta, n,
                                   options.c_cal, &out.local_sigma,
                                   &out.local_delta);
  if (budget.epsilon > regime_cap) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "epsilon %g is outside the shuffling regime; max feasible epsilon is "
        "%.6g",
        budget.epsilon, out.max_feasible_epsilon));
  }
  if (out.local_epsilon > 0.5) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "local randomizer budget %.4g exceeds 1/2; max feasible epsilon is "
        "%.6g (raise c_cal to enlarge it)",
        out.local_epsilon, out.max_feasible_epsilon));
  }
  return out;
}

Vector AddGaussian(const Vector& v, double sigma, RandomStream& rng) {
  Vector out = v;
  if (sigma == 0.0) return out;
  for (double& x : out) x += sigma * rng.Normal();
  return out;
}

}  // namespace ht_dpsco
