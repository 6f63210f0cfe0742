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

#ifndef HT_DPSCO_OPTIM_SCHEDULE_H_
#define HT_DPSCO_OPTIM_SCHEDULE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ht_dpsco/estimator/moments.h"
#include "ht_dpsco/privacy/calibration.h"

namespace ht_dpsco {

// How theory preconditions that the inputs violate are handled: kStrict
// returns FailedPrecondition, kWarn records the violation and continues.
enum class RegimePolicy { kStrict, kWarn };

struct PhaseRow {
  int index = 0;
  std::int64_t batch_size = 0;
  double stepsize = 0.0;
  double regularization = 0.0;
  std::int64_t iterations = 0;
  // D_i for localized phases, R_l for outer stages.
  double radius = 0.0;
  double clip = 0.0;
  double noise = 0.0;
};

struct PhaseSchedule {
  std::vector<PhaseRow> rows;
  // Theory preconditions the inputs violate (kWarn only).
  std::vector<std::string> regime_violations;
  // The radii use a plug-in Lipschitz estimate rather than a known L_f.
  bool lipschitz_plugin = false;

  std::int64_t total_batch_size() const;
};

struct LncgmScheduleParams {
  std::int64_t n = 0;
  double eta = 1.0;
  double p = 1.0;
  PrivacyBudget budget;
  std::size_t d = 1;
  // Lipschitz constant (or plug-in estimate) for D_i = 2 L_f / lambda_i.
  double lipschitz = 1.0;
  bool lipschitz_plugin = false;
  // Smoothness for the eta_i <= 1/alpha check; skipped when absent.
  std::optional<double> smoothness;
  RegimePolicy regime = RegimePolicy::kStrict;
};

// Batch sizes n_i = floor(n / 2^i), i = 1..floor(log2 n), whose r_{2k,n_i}
// the schedule needs.
std::vector<std::int64_t> LncgmBatchSizes(std::int64_t n);

// Rows i = 1..floor(log2 n) with
//   n_i = floor(n / 2^i), eta_i = eta / 4^i,
//   lambda_1 = 1 / (eta_1 n_1^(2p)), lambda_i = 1 / (eta_i n_i^p) for i >= 2,
//   T_i = ceil((2 / (lambda_i eta_i)) ln(n_i^2)), D_i = 2 L_f / lambda_i,
//   C_i = r_{2k,n_i} (eps n_i / sqrt(d log(1/delta) ln n))^(1/k),
//   sigma_i = 8 C_i sqrt(log(1/delta)) / (n_i lambda_i eps).
absl::StatusOr<PhaseSchedule> LncgmSchedule(const LncgmScheduleParams& params,
                                            const MomentProfile& moments);

// Equal partition of the outer localization loop:
//   m = floor(log2(2n / log2 n) / 2) - 1, n0 = floor(n / m).
struct EqualPartition {
  std::int64_t m = 0;
  std::int64_t n0 = 0;
};
absl::StatusOr<EqualPartition> PsaPartition(std::int64_t n);

// Geometric partition of the iterated algorithms:
//   l = floor(log_tb(2) * log log n),
//   n_i = floor(2^(i-1) n / (log n)^(log_tb(2)^2)).
// With `base2_logs` the logs are log2, otherwise natural.
struct GeometricPartition {
  int stages = 0;
  std::vector<std::int64_t> sizes;
  bool base2_logs = true;
};
absl::StatusOr<GeometricPartition> IteratedPartition(std::int64_t n,
                                                     double theta_bar,
                                                     bool base2_logs = true);

// Outer-stage stepsize
//   (R / m^(p/2)) min{1/L, (eps m / sqrt(d ln n_total))^((k-1)/k) /
//   (R2k m^((p+1)/2)), 1 / (m^((p-1)/2) L^2 sqrt(ln m ln(1/beta)))}
// with m the stage sample size and beta = 1/n_total.
struct StageStepParams {
  double radius = 1.0;
  std::int64_t stage_n = 1;
  std::int64_t total_n = 1;
  double p = 1.0;
  int k = 2;
  double R2k_n = 1.0;
  double lipschitz = 1.0;
  double epsilon = 1.0;
  std::size_t d = 1;
};
double StageStepsize(const StageStepParams& params);

// Clip threshold r_k (eps n / sqrt(d log(1/delta)))^(1/k) of the
// accelerated method.
double PncaClip(double r_k, int k, const PrivacyBudget& budget,
                std::int64_t n, std::size_t d);

// Iteration count
//   min{sqrt(beta D / r_k) (eps n / sqrt(d log(1/delta)))^((k-1)/(2k)),
//       sqrt(beta D / r_k) n^(1/4)}
// before rounding.
double PncaTheoryIterations(double smoothness, double diameter, double r_k,
                            int k, const PrivacyBudget& budget, std::int64_t n,
                            std::size_t d);

// Step parameters of the accelerated method: alpha_1 = 1 and
// alpha_t = 2/(t+2) for t >= 2; eta_t = 4 eta / (t(t+1)).
double AccelerationWeight(std::int64_t t);
double ProxCoefficient(double eta, std::int64_t t);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_OPTIM_SCHEDULE_H_
