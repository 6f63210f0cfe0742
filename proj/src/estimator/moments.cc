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

#include "ht_dpsco/estimator/moments.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "absl/strings/str_format.h"

namespace ht_dpsco {
namespace {

// Hands out disjoint index batches from a permutation, re-permuting when the
// dataset is exhausted.
class IndexBatcher {
 public:
  IndexBatcher(std::size_t n, RandomStream& rng) : order_(n), rng_(rng) {
    Reshuffle();
  }

  std::vector<std::size_t> Next(std::size_t m) {
    if (cursor_ + m > order_.size()) {
      Reshuffle();
      wrapped_ = true;
    }
    std::vector<std::size_t> out(order_.begin() + cursor_,
                                 order_.begin() + cursor_ + m);
    cursor_ += m;
    return out;
  }

  bool wrapped() const { return wrapped_; }

 private:
  void Reshuffle() {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng_.engine());
    cursor_ = 0;
  }

  std::vector<std::size_t> order_;
  RandomStream& rng_;
  std::size_t cursor_ = 0;
  bool wrapped_ = false;
};

double PowerK(double norm, int k) { return std::pow(norm, k); }

absl::Status CheckMomentInputs(int k, std::span<const Vector> probes) {
  if (k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("moment order must be positive, got %d", k));
  }
  if (probes.empty()) {
    return absl::InvalidArgumentError("moment estimation needs probe points");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<MomentEstimate> EmpiricalMoment(std::span<const Sample> batch,
                                               const LossOracle& loss, int k,
                                               std::span<const Vector> probes) {
  if (batch.empty()) {
    return absl::InvalidArgumentError("moment estimation needs a batch");
  }
  if (absl::Status s = CheckMomentInputs(k, probes); !s.ok()) return s;
  std::vector<double> grad(probes.front().dim());
  double best = 0.0;
  for (const Vector& w : probes) {
    double sum = 0.0;
    for (const Sample& sample : batch) {
      loss.GradientInto(w, sample, grad);
      sum += PowerK(Norm(grad), k);
    }
    best = std::max(best, sum / static_cast<double>(batch.size()));
  }
  return MomentEstimate{k, static_cast<std::int64_t>(batch.size()), best,
                        std::pow(best, 1.0 / k)};
}

std::vector<double> PerSampleSupPowers(std::span<const Sample> samples,
                                       const LossOracle& loss, int k,
                                       std::span<const Vector> probes) {
  std::vector<double> out(samples.size(), 0.0);
  if (probes.empty()) return out;
  std::vector<double> grad(probes.front().dim());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (const Vector& w : probes) {
      loss.GradientInto(w, samples[i], grad);
      out[i] = std::max(out[i], PowerK(Norm(grad), k));
    }
  }
  return out;
}

absl::StatusOr<MomentEstimate> ExpectedEmpiricalMoment(
    std::span<const Sample> dataset, const LossOracle& loss, int k,
    std::int64_t m, std::int64_t batches, std::span<const Vector> probes,
    RandomStream& rng, bool* wrapped) {
  if (absl::Status s = CheckMomentInputs(k, probes); !s.ok()) return s;
  if (m < 1 || batches < 1) {
    return absl::InvalidArgumentError("batch size and count must be positive");
  }
  if (static_cast<std::size_t>(m) > dataset.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "batch size %d exceeds dataset size %d", m, dataset.size()));
  }
  IndexBatcher batcher(dataset.size(), rng);
  std::vector<Sample> batch;
  double total = 0.0;
  for (std::int64_t b = 0; b < batches; ++b) {
    batch.clear();
    for (std::size_t index : batcher.Next(static_cast<std::size_t>(m))) {
      batch.push_back(dataset[index]);
    }
    absl::StatusOr<MomentEstimate> one = EmpiricalMoment(batch, loss, k, probes);
    if (!one.ok()) return one.status();
    total += one->raw;
  }
  if (wrapped != nullptr) *wrapped = *wrapped || batcher.wrapped();
  const double raw = total / static_cast<double>(batches);
  return MomentEstimate{k, m, raw, std::pow(raw, 1.0 / k)};
}

absl::StatusOr<WeightedMoment> WeightedMomentR(std::span<const Sample> dataset,
                                               const LossOracle& loss, int k,
                                               std::int64_t n,
                                               std::span<const Vector> probes,
                                               RandomStream& rng) {
  if (absl::Status s = CheckMomentInputs(k, probes); !s.ok()) return s;
  if (n < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("weighted moment needs n >= 2, got %d", n));
  }
  if (dataset.size() < static_cast<std::size_t>(n)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dataset has %d samples, fewer than n = %d", dataset.size(), n));
  }
  const int levels = static_cast<int>(std::floor(std::log2(static_cast<double>(n))));
  WeightedMoment out;
  double weighted = 0.0;
  for (int i = 1; i <= levels; ++i) {
    const std::int64_t n_i = n >> i;
    if (n_i == 0) continue;
    const std::int64_t batches = (n + n_i - 1) / n_i;
    absl::StatusOr<MomentEstimate> estimate = ExpectedEmpiricalMoment(
        dataset.first(static_cast<std::size_t>(n)), loss, k, n_i, batches,
        probes, rng, &out.wrapped);
    if (!estimate.ok()) return estimate.status();
    weighted += std::ldexp(estimate->root * estimate->root, -i);
    out.by_batch_size.push_back(*estimate);
  }
  out.value = std::sqrt(weighted);
  return out;
}

std::optional<double> MomentProfile::r2k(std::int64_t m) const {
  auto it = r2k_by_batch.find(m);
  if (it == r2k_by_batch.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<MomentProfile> EstimateMomentProfile(
    std::span<const Sample> dataset, const LossOracle& loss,
    const MomentProfileRequest& request, std::span<const Vector> probes,
    RandomStream& rng) {
  if (request.k < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("moment order k must be at least 2, got %d", request.k));
  }
  if (absl::Status s = CheckMomentInputs(request.k, probes); !s.ok()) return s;
  if (dataset.empty()) {
    return absl::InvalidArgumentError("moment estimation needs data");
  }
  MomentProfile profile;
  profile.k = request.k;
  profile.probe_count = probes.size();

  const std::vector<double> sup_powers =
      PerSampleSupPowers(dataset, loss, 2 * request.k, probes);
  double sum_2k = 0.0;
  double sum_k = 0.0;
  for (double p : sup_powers) {
    sum_2k += p;
    sum_k += std::sqrt(p);
    profile.max_gradient_norm =
        std::max(profile.max_gradient_norm, std::pow(p, 0.5 / request.k));
  }
  const double count = static_cast<double>(sup_powers.size());
  profile.r_k = std::pow(sum_k / count, 1.0 / request.k);
  profile.r2k_by_batch[1] = std::pow(sum_2k / count, 0.5 / request.k);

  const std::int64_t batches = std::max<std::int64_t>(1, request.batches_per_size);
  for (std::int64_t m : request.batch_sizes) {
    if (m < 1) {
      return absl::InvalidArgumentError("batch sizes must be positive");
    }
    if (profile.r2k_by_batch.count(m)) continue;
    const std::int64_t usable = std::min<std::int64_t>(
        m, static_cast<std::int64_t>(dataset.size()));
    absl::StatusOr<MomentEstimate> estimate =
        ExpectedEmpiricalMoment(dataset, loss, 2 * request.k, usable, batches,
                                probes, rng, &profile.wrapped);
    if (!estimate.ok()) return estimate.status();
    // Batches larger than the auxiliary data reuse its largest estimate; the
    // expected moment is non-increasing in m so this over-estimates.
    profile.r2k_by_batch[m] = estimate->root;
  }
  if (request.weighted_n >= 2) {
    const std::int64_t n = std::min<std::int64_t>(
        request.weighted_n, static_cast<std::int64_t>(dataset.size()));
    absl::StatusOr<WeightedMoment> weighted =
        WeightedMomentR(dataset, loss, 2 * request.k, n, probes, rng);
    if (!weighted.ok()) return weighted.status();
    profile.R2k_n = weighted->value;
    profile.wrapped = profile.wrapped || weighted->wrapped;
  }
  return profile;
}

std::vector<Vector> SampleProbes(const ConstraintSet& set, std::size_t count,
                                 RandomStream& rng) {
  const std::span<const Ball> balls = set.balls();
  const Ball* smallest = &balls.front();
  for (const Ball& ball : balls) {
    if (ball.radius < smallest->radius) smallest = &ball;
  }
  const std::size_t d = set.dim();
  auto draw_in_ball = [&]() {
    Vector direction(d);
    double norm = 0.0;
    while (norm == 0.0) {
      for (double& x : direction) x = rng.Normal();
      norm = Norm(direction);
    }
    const double radius =
        smallest->radius * std::pow(rng.Uniform(), 1.0 / static_cast<double>(d));
    direction *= radius / norm;
    direction += smallest->center;
    return direction;
  };
  std::vector<Vector> probes;
  probes.reserve(count);
  while (probes.size() < count) {
    Vector candidate = draw_in_ball();
    for (int attempt = 0; attempt < 100 && !set.Contains(candidate, 0.0);
         ++attempt) {
      candidate = draw_in_ball();
    }
    if (!set.Contains(candidate, 0.0)) {
      absl::StatusOr<Vector> projected = ProjectSet(candidate, set);
      if (projected.ok()) candidate = *std::move(projected);
    }
    probes.push_back(std::move(candidate));
  }
  return probes;
}

}  // namespace ht_dpsco
