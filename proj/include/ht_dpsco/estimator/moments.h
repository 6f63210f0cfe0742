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

#ifndef HT_DPSCO_ESTIMATOR_MOMENTS_H_
#define HT_DPSCO_ESTIMATOR_MOMENTS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ht_dpsco/core/geometry.h"
#include "ht_dpsco/core/vector.h"
#include "ht_dpsco/losses/loss.h"
#include "ht_dpsco/privacy/random.h"

namespace ht_dpsco {

// Empirical moment of one batch: the sup over `probes` of
// (1/m) sum_i ||grad f(w, x_i)||^k. The probe sup under-estimates the sup
// over the whole constraint set.
struct MomentEstimate {
  int k = 2;
  std::int64_t m = 1;
  double raw = 0.0;   // k-th power moment
  double root = 0.0;  // raw^(1/k)
};

absl::StatusOr<MomentEstimate> EmpiricalMoment(std::span<const Sample> batch,
                                               const LossOracle& loss, int k,
                                               std::span<const Vector> probes);

// Per-sample sup_{w in probes} ||grad f(w, x)||^k; the m = 1 moment is the
// mean of these values.
std::vector<double> PerSampleSupPowers(std::span<const Sample> samples,
                                       const LossOracle& loss, int k,
                                       std::span<const Vector> probes);

struct WeightedMoment {
  // sqrt(sum_i 2^-i r_{k,n_i}^2)
  double value = 0.0;
  // One entry per dyadic batch size n_i = floor(n / 2^i), i = 1..l.
  std::vector<MomentEstimate> by_batch_size;
  // Set when the dataset ran out and batches were re-drawn from a fresh
  // permutation.
  bool wrapped = false;
};

// Estimates the expected empirical moment r_{k,n_i} for n_i = floor(2^-i n),
// i = 1..floor(log2 n), by averaging EmpiricalMoment over ceil(n / n_i)
// disjoint batches, then combines them as sqrt(sum 2^-i r_{k,n_i}^2).
absl::StatusOr<WeightedMoment> WeightedMomentR(std::span<const Sample> dataset,
                                               const LossOracle& loss, int k,
                                               std::int64_t n,
                                               std::span<const Vector> probes,
                                               RandomStream& rng);

// Expected empirical moment r_{k,m} = (E r_hat_m^(k))^(1/k) estimated from
// `batches` disjoint batches of size m.
absl::StatusOr<MomentEstimate> ExpectedEmpiricalMoment(
    std::span<const Sample> dataset, const LossOracle& loss, int k,
    std::int64_t m, std::int64_t batches, std::span<const Vector> probes,
    RandomStream& rng, bool* wrapped = nullptr);

// Moment summary consumed by the clip-threshold formulas.
struct MomentProfile {
  int k = 2;
  // r_k = (E sup_w ||grad f(w, x)||^k)^(1/k)
  double r_k = 0.0;
  // batch size m -> r_{2k, m}
  std::map<std::int64_t, double> r2k_by_batch;
  // R_{2k, n}
  double R2k_n = 0.0;
  // Largest per-sample sup gradient norm seen; plug-in Lipschitz estimate.
  double max_gradient_norm = 0.0;
  bool wrapped = false;
  std::size_t probe_count = 0;

  // r_{2k,m} for an exact batch size, if it was estimated.
  std::optional<double> r2k(std::int64_t m) const;
};

struct MomentProfileRequest {
  int k = 2;
  // Batch sizes whose r_{2k,m} is required.
  std::vector<std::int64_t> batch_sizes;
  // n for R_{2k,n}; skipped when zero.
  std::int64_t weighted_n = 0;
  // Number of disjoint batches averaged per batch size (at least 1).
  std::int64_t batches_per_size = 4;
};

absl::StatusOr<MomentProfile> EstimateMomentProfile(
    std::span<const Sample> dataset, const LossOracle& loss,
    const MomentProfileRequest& request, std::span<const Vector> probes,
    RandomStream& rng);

// `count` points drawn uniformly from the set (rejection from its smallest
// ball, projected as a fallback).
std::vector<Vector> SampleProbes(const ConstraintSet& set, std::size_t count,
                                 RandomStream& rng);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_ESTIMATOR_MOMENTS_H_
