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

#include "ht_dpsco/optim/schedule.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"

namespace ht_dpsco {
namespace {

std::int64_t CeilToCount(double x) {
  if (!(x > 0.0)) return 0;
  const double capped =
      std::min(std::ceil(x),
               static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2));
  return static_cast<std::int64_t>(capped);
}

absl::Status Violation(RegimePolicy policy, std::string message,
                       std::vector<std::string>& sink) {
  if (policy == RegimePolicy::kStrict) {
    return absl::FailedPreconditionError(message);
  }
  sink.push_back(std::move(message));
  return absl::OkStatus();
}

}  // namespace

std::int64_t PhaseSchedule::total_batch_size() const {
  std::int64_t total = 0;
  for (const PhaseRow& row : rows) total += row.batch_size;
  return total;
}

std::vector<std::int64_t> LncgmBatchSizes(std::int64_t n) {
  std::vector<std::int64_t> sizes;
  if (n < 2) return sizes;
  const int levels = static_cast<int>(std::floor(std::log2(static_cast<double>(n))));
  for (int i = 1; i <= levels; ++i) sizes.push_back(n >> i);
  return sizes;
}

absl::StatusOr<PhaseSchedule> LncgmSchedule(const LncgmScheduleParams& params,
                                            const MomentProfile& moments) {
  if (params.n < 4) {
    return absl::InvalidArgumentError(
        absl::StrFormat("LNC-GM needs n >= 4, got %d", params.n));
  }
  if (!(params.eta > 0.0) || !(params.p >= 1.0) || params.d == 0 ||
      !(params.lipschitz > 0.0)) {
    return absl::InvalidArgumentError(
        "LNC-GM needs eta > 0, p >= 1, d >= 1 and a positive Lipschitz bound");
  }
  const double eps = params.budget.epsilon;
  const double log_inv_delta = std::log(1.0 / params.budget.delta);
  PhaseSchedule schedule;
  schedule.lipschitz_plugin = params.lipschitz_plugin;
  if (eps > std::sqrt(log_inv_delta)) {
    absl::Status s = Violation(
        params.regime,
        absl::StrFormat("epsilon %g exceeds sqrt(log(1/delta)) = %g", eps,
                        std::sqrt(log_inv_delta)),
        schedule.regime_violations);
    if (!s.ok()) return s;
  }
  if (params.smoothness.has_value() && params.eta / 4.0 > 1.0 / *params.smoothness) {
    absl::Status s = Violation(
        params.regime,
        absl::StrFormat("stepsize eta_1 = %g exceeds 1/alpha = %g",
                        params.eta / 4.0, 1.0 / *params.smoothness),
        schedule.regime_violations);
    if (!s.ok()) return s;
  }

  const std::vector<std::int64_t> sizes = LncgmBatchSizes(params.n);
  std::vector<std::int64_t> missing;
  for (std::int64_t m : sizes) {
    if (!moments.r2k(m).has_value()) missing.push_back(m);
  }
  if (!missing.empty()) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "moment profile lacks r_{2k,m} for batch sizes m = {%s}; required: {%s}",
        absl::StrJoin(missing, ","), absl::StrJoin(sizes, ",")));
  }

  const double k = static_cast<double>(moments.k);
  const double clip_denominator =
      std::sqrt(static_cast<double>(params.d) * log_inv_delta *
                std::log(static_cast<double>(params.n)));
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    const int i = static_cast<int>(j) + 1;
    const double n_i = static_cast<double>(sizes[j]);
    PhaseRow row;
    row.index = i;
    row.batch_size = sizes[j];
    row.stepsize = params.eta * std::pow(4.0, -i);
    const double exponent = i == 1 ? 2.0 * params.p : params.p;
    row.regularization = 1.0 / (row.stepsize * std::pow(n_i, exponent));
    row.iterations = CeilToCount(2.0 / (row.regularization * row.stepsize) *
                                 std::log(n_i * n_i));
    row.radius = 2.0 * params.lipschitz / row.regularization;
    row.clip = *moments.r2k(sizes[j]) *
               std::pow(eps * n_i / clip_denominator, 1.0 / k);
    row.noise = 8.0 * row.clip * std::sqrt(log_inv_delta) /
                (n_i * row.regularization * eps);
    schedule.rows.push_back(row);
  }
  return schedule;
}

absl::StatusOr<EqualPartition> PsaPartition(std::int64_t n) {
  auto partition = [](std::int64_t size) {
    const double log_n = std::log2(static_cast<double>(size));
    EqualPartition out;
    out.m = static_cast<std::int64_t>(
                std::floor(0.5 * std::log2(2.0 * size / log_n))) -
            1;
    out.n0 = out.m >= 1 ? size / out.m : 0;
    return out;
  };
  if (n >= 2) {
    EqualPartition out = partition(n);
    if (out.m >= 1) return out;
  }
  std::int64_t required = std::max<std::int64_t>(n, 2);
  while (partition(required).m < 1) ++required;
  return absl::FailedPreconditionError(absl::StrFormat(
      "dataset too small: n = %d gives no localization stage; need n >= %d",
      n, required));
}

absl::StatusOr<GeometricPartition> IteratedPartition(std::int64_t n,
                                                     double theta_bar,
                                                     bool base2_logs) {
  if (!(theta_bar > 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("theta_bar must exceed 1, got %g", theta_bar));
  }
  auto log_fn = [base2_logs](double x) {
    return base2_logs ? std::log2(x) : std::log(x);
  };
  const double log_tb_2 = std::log(2.0) / std::log(theta_bar);
  GeometricPartition out;
  out.base2_logs = base2_logs;
  if (n >= 3) {
    const double log_n = log_fn(static_cast<double>(n));
    if (log_n > 1.0) {
      out.stages = static_cast<int>(std::floor(log_tb_2 * log_fn(log_n)));
      const double divisor = std::pow(log_n, log_tb_2 * log_tb_2);
      std::int64_t total = 0;
      for (int i = 1; i <= out.stages; ++i) {
        const std::int64_t size = static_cast<std::int64_t>(
            std::floor(std::ldexp(static_cast<double>(n), i - 1) / divisor));
        out.sizes.push_back(size);
        total += size;
      }
      const bool all_positive =
          std::all_of(out.sizes.begin(), out.sizes.end(),
                      [](std::int64_t s) { return s > 0; });
      if (out.stages >= 1 && all_positive && total <= n) return out;
    }
  }
  return absl::FailedPreconditionError(absl::StrFormat(
      "dataset too small: n = %d admits no geometric partition for "
      "theta_bar = %g",
      n, theta_bar));
}

double StageStepsize(const StageStepParams& params) {
  const double m = static_cast<double>(params.stage_n);
  const double n = static_cast<double>(params.total_n);
  const double k = static_cast<double>(params.k);
  const double lipschitz_term = 1.0 / params.lipschitz;
  const double moment_term =
      std::pow(params.epsilon * m /
                   std::sqrt(static_cast<double>(params.d) * std::log(n)),
               (k - 1.0) / k) /
      (params.R2k_n * std::pow(m, (params.p + 1.0) / 2.0));
  const double log_term = std::sqrt(std::max(std::log(m), 1e-12) * std::log(n));
  const double confidence_term =
      1.0 / (std::pow(m, (params.p - 1.0) / 2.0) * params.lipschitz *
             params.lipschitz * log_term);
  return params.radius / std::pow(m, params.p / 2.0) *
         std::min({lipschitz_term, moment_term, confidence_term});
}

double PncaClip(double r_k, int k, const PrivacyBudget& budget,
                std::int64_t n, std::size_t d) {
  const double scale = budget.epsilon * static_cast<double>(n) /
                       std::sqrt(static_cast<double>(d) *
                                 std::log(1.0 / budget.delta));
  return r_k * std::pow(scale, 1.0 / static_cast<double>(k));
}

double PncaTheoryIterations(double smoothness, double diameter, double r_k,
                            int k, const PrivacyBudget& budget, std::int64_t n,
                            std::size_t d) {
  const double prefactor = std::sqrt(smoothness * diameter / r_k);
  const double kd = static_cast<double>(k);
  const double scale = budget.epsilon * static_cast<double>(n) /
                       std::sqrt(static_cast<double>(d) *
                                 std::log(1.0 / budget.delta));
  return std::min(prefactor * std::pow(scale, (kd - 1.0) / (2.0 * kd)),
                  prefactor * std::pow(static_cast<double>(n), 0.25));
}

double AccelerationWeight(std::int64_t t) {
  return t <= 1 ? 1.0 : 2.0 / (static_cast<double>(t) + 2.0);
}

double ProxCoefficient(double eta, std::int64_t t) {
  const double td = static_cast<double>(t);
  return 4.0 * eta / (td * (td + 1.0));
}

}  // namespace ht_dpsco
