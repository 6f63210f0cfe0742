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

#ifndef HT_DPSCO_PRIVACY_CALIBRATION_H_
#define HT_DPSCO_PRIVACY_CALIBRATION_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "ht_dpsco/core/vector.h"
#include "ht_dpsco/privacy/random.h"

namespace ht_dpsco {

// Approximate (epsilon, delta)-DP budget.
struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;

  static absl::StatusOr<PrivacyBudget> Make(double epsilon, double delta);
};

// rho-zCDP budget.
struct ZcdpBudget {
  double rho = 1.0;

  static absl::StatusOr<ZcdpBudget> Make(double rho);
};

// Per-coordinate Gaussian standard deviation
//   sigma = 4 * sensitivity * sqrt(log(1/delta)) / epsilon,
// defined for 0 < epsilon, delta <= 1.
absl::StatusOr<double> GaussianSigma(double sensitivity,
                                     const PrivacyBudget& budget);

// l2 sensitivity 2C/n of the mean of n vectors clipped to norm C under
// replacement of one element.
absl::StatusOr<double> ClippedMeanSensitivity(double clip, std::int64_t n);

// rho-zCDP implies (rho + 2 sqrt(rho log(1/delta)), delta)-DP.
absl::StatusOr<double> ZcdpToDp(const ZcdpBudget& budget, double delta);

// Largest rho whose DP conversion at `delta` does not exceed `epsilon`:
// rho = (sqrt(log(1/delta) + epsilon) - sqrt(log(1/delta)))^2.
absl::StatusOr<double> DpToZcdp(const PrivacyBudget& budget);

// Gaussian mechanism with sensitivity Delta and std sigma is
// Delta^2 / (2 sigma^2)-zCDP.
double GaussianZcdp(double sensitivity, double sigma);

// Noise calibration for shuffled Gaussian local randomizers.
struct ShuffleCalibration {
  // Per-report standard deviation sigma_1.
  double local_sigma = 0.0;
  // Local randomizer budget eps_0 = 2 sqrt(2) C sqrt(log(1/delta_0)) / sigma_1.
  double local_epsilon = 0.0;
  // delta_0 = (delta/2) / (e^epsilon n).
  double local_delta = 0.0;
  // Largest epsilon for which eps_0 <= 1/2 still holds at (C, n, c_cal).
  double max_feasible_epsilon = 0.0;
};

struct ShuffleOptions {
  // Collapses the constants hidden in the O(.) calibration.
  double c_cal = 1.0;
  // Regime constant: epsilon <= c_small * sqrt(log(n/delta)/n).
  double c_small = 1.0;
};

// The raw calibration
//   sigma_1 = c_cal * C * sqrt(log(2/delta) * log(n/delta)) / (epsilon sqrt(n))
// without any feasibility checks.
double ShuffleSigmaFormula(double clip, const PrivacyBudget& budget,
                           std::int64_t n, double c_cal);

// Calibrates sigma_1 and checks the amplification preconditions: the epsilon
// regime, n >= 16 log(4/delta), and eps_0 <= 1/2. Violations return
// FailedPrecondition naming the largest feasible epsilon.
absl::StatusOr<ShuffleCalibration> ShuffleAmplifiedSigma(
    double clip, const PrivacyBudget& budget, std::int64_t n,
    const ShuffleOptions& options = {});

// v + N(0, sigma^2 I) drawn from `rng`.
Vector AddGaussian(const Vector& v, double sigma, RandomStream& rng);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_PRIVACY_CALIBRATION_H_
