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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "ht_dpsco/estimator/clipped_mean.h"
#include "ht_dpsco/estimator/moments.h"
#include "ht_dpsco/losses/samplers.h"
#include "ht_dpsco/privacy/random.h"

namespace ht_dpsco {
namespace {

// f(w, x) = <w, x>: the gradient is x wherever it is evaluated.
class LinearLoss final : public LossOracle {
 public:
  std::string name() const override { return "linear"; }
  double Value(const Vector& w, const Sample& s) const override {
    return Dot(w, s.features);
  }
  void GradientInto(const Vector&, const Sample& s,
                    std::span<double> out) const override {
    std::copy(s.features.begin(), s.features.end(), out.begin());
  }
};

// f(w, x) = ||w - x||^2 / 2 with gradient w - x.
class QuadraticLoss final : public LossOracle {
 public:
  std::string name() const override { return "quadratic"; }
  double Value(const Vector& w, const Sample& s) const override {
    const double dist = Distance(w, s.features);
    return 0.5 * dist * dist;
  }
  void GradientInto(const Vector& w, const Sample& s,
                    std::span<double> out) const override {
    for (std::size_t i = 0; i < w.dim(); ++i) out[i] = w[i] - s.features[i];
  }
};

TEST(ClippedMeanTest, Examples) {
  const std::vector<Vector> one = {Vector{3.0, 4.0}};
  EXPECT_EQ(*ClippedMean(one, 5.0), (Vector{3.0, 4.0}));
  const std::vector<Vector> two = {Vector{6.0, 8.0}, Vector{0.0, 0.0}};
  const Vector mean = *ClippedMean(two, 5.0);
  EXPECT_DOUBLE_EQ(mean[0], 1.5);
  EXPECT_DOUBLE_EQ(mean[1], 2.0);
  const std::vector<Vector> copies(100, Vector{1.0, 0.0});
  const Vector clipped = *ClippedMean(copies, 0.5);
  EXPECT_NEAR(clipped[0], 0.5, 1e-15);
  EXPECT_EQ(clipped[1], 0.0);
}

TEST(ClippedMeanTest, Errors) {
  EXPECT_EQ(ClippedMean({}, 1.0).status().code(),
            absl::StatusCode::kInvalidArgument);
  const std::vector<Vector> z = {Vector{1.0}};
  EXPECT_FALSE(ClippedMean(z, 0.0).ok());
  const std::vector<Vector> ragged = {Vector{1.0}, Vector{1.0, 2.0}};
  EXPECT_FALSE(ClippedMean(ragged, 1.0).ok());
}

TEST(ClippedMeanTest, NormBoundPlainMeanAndPermutationInvariance) {
  RandomStream rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 1 + trial % 4;
    const int n = 1 + trial % 13;
    std::vector<Vector> z;
    double max_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      Vector v(d);
      for (double& x : v) x = 3.0 * rng.Normal();
      max_norm = std::max(max_norm, Norm(v));
      z.push_back(v);
    }
    const double clip = 0.1 + 4.0 * rng.Uniform();
    const Vector mean = *ClippedMean(z, clip);
    EXPECT_LE(Norm(mean), clip * (1.0 + 1e-12));
    std::vector<Vector> shuffled = z;
    std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
    EXPECT_LE(Distance(*ClippedMean(shuffled, clip), mean), 1e-12);
    const Vector plain = *ClippedMean(z, max_norm + 1.0);
    Vector expected(d);
    for (const Vector& v : z) expected.AddScaled(1.0 / n, v);
    EXPECT_LE(Distance(plain, expected), 1e-12);
  }
}

TEST(BiasBoundTest, Examples) {
  EXPECT_DOUBLE_EQ(*ClippedMeanBiasBound(1.0, 2, 10.0), 0.1);
  EXPECT_DOUBLE_EQ(*ClippedMeanBiasBound(8.0, 3, 2.0), 1.0);
  EXPECT_LT(*ClippedMeanBiasBound(1.0, 2, 1e12), 1e-11);
  EXPECT_FALSE(ClippedMeanBiasBound(1.0, 1, 1.0).ok());
  EXPECT_FALSE(ClippedMeanBiasBound(0.0, 2, 1.0).ok());
  EXPECT_FALSE(ClippedMeanBiasBound(1.0, 2, 0.0).ok());
}

TEST(BiasBoundTest, ParetoMonteCarloWithinBound) {
  // x = mu + R u with R ~ Pareto(scale 1, tail 3): E||x||^2 = ||mu||^2 + 3.
  const Vector mu{1.0, 0.5, 0.0};
  SamplerSpec spec;
  spec.kind = NoiseKind::kPareto;
  spec.tail_index = 3.0;
  spec.scale = 1.0;
  HeavyTailedSampler sampler = *HeavyTailedSampler::Make(spec, mu, 31);
  const double r2 = Dot(mu, mu) + sampler.NoiseMoment(2.0);
  EXPECT_NEAR(sampler.NoiseMoment(2.0), 3.0, 1e-12);
  const int draws = 20000;
  std::vector<Vector> xs;
  for (int i = 0; i < draws; ++i) xs.push_back(sampler.Next().features);
  for (double clip : {2.0, 5.0}) {
    Vector mean(3);
    Vector second(3);
    for (const Vector& x : xs) {
      Vector c = x;
      ClipToNorm(c.values(), clip);
      mean.AddScaled(1.0 / draws, c);
      for (int j = 0; j < 3; ++j) second[j] += c[j] * c[j] / draws;
    }
    double se2 = 0.0;
    for (int j = 0; j < 3; ++j) se2 += (second[j] - mean[j] * mean[j]) / draws;
    const double bias = Distance(mean, mu);
    EXPECT_LE(bias, *ClippedMeanBiasBound(r2, 2, clip) + 3.0 * std::sqrt(se2));
  }
}

std::vector<Sample> Samples(const std::vector<Vector>& xs) {
  std::vector<Sample> out;
  for (const Vector& x : xs) out.push_back({x, 0.0});
  return out;
}

TEST(EmpiricalMomentTest, GradientIndependentOfW) {
  const LinearLoss loss;
  const std::vector<Sample> batch =
      Samples({Vector{1.0, 0.0}, Vector{0.0, 2.0}, Vector{3.0, 4.0}});
  const std::vector<Vector> probes = {Vector{0.0, 0.0}, Vector{5.0, -1.0}};
  const MomentEstimate e = *EmpiricalMoment(batch, loss, 2, probes);
  EXPECT_DOUBLE_EQ(e.raw, (1.0 + 4.0 + 25.0) / 3.0);
  EXPECT_DOUBLE_EQ(e.root, std::sqrt(10.0));
  EXPECT_EQ(e.m, 3);
}

TEST(EmpiricalMomentTest, SingleSampleSingleProbe) {
  const QuadraticLoss loss;
  const std::vector<Sample> batch = Samples({Vector{1.0, 1.0}});
  const std::vector<Vector> probes = {Vector{4.0, 5.0}};
  const MomentEstimate e = *EmpiricalMoment(batch, loss, 3, probes);
  EXPECT_NEAR(e.raw, 125.0, 1e-12);
}

TEST(EmpiricalMomentTest, QuadraticMatchesBruteForce) {
  const QuadraticLoss loss;
  const std::vector<Sample> batch = Samples({Vector{1.0, 0.0}, Vector{-1.0, 2.0}});
  const std::vector<Vector> probes = {Vector{0.0, 0.0}, Vector{2.0, 1.0},
                                      Vector{-3.0, 0.5}};
  double best = 0.0;
  for (const Vector& w : probes) {
    double sum = 0.0;
    for (const Sample& s : batch) {
      const double r = Distance(w, s.features);
      sum += r * r * r * r;
    }
    best = std::max(best, sum / 2.0);
  }
  EXPECT_NEAR(EmpiricalMoment(batch, loss, 4, probes)->raw, best, 1e-12);
}

TEST(EmpiricalMomentTest, Errors) {
  const LinearLoss loss;
  const std::vector<Vector> probes = {Vector{0.0}};
  EXPECT_FALSE(EmpiricalMoment({}, loss, 2, probes).ok());
  const std::vector<Sample> batch = Samples({Vector{1.0}});
  EXPECT_FALSE(EmpiricalMoment(batch, loss, 2, {}).ok());
}

TEST(WeightedMomentTest, ConstantNormClosedForm) {
  const LinearLoss loss;
  const double c = 1.5;
  std::vector<Vector> xs;
  RandomStream rng(8);
  for (int i = 0; i < 64; ++i) {
    const double angle = 6.283185307179586 * rng.Uniform();
    xs.push_back(Vector{c * std::cos(angle), c * std::sin(angle)});
  }
  const std::vector<Sample> data = Samples(xs);
  const std::vector<Vector> probes = {Vector{0.0, 0.0}};
  const WeightedMoment r = *WeightedMomentR(data, loss, 4, 64, probes, rng);
  EXPECT_NEAR(r.value, c * std::sqrt(1.0 - std::pow(2.0, -6.0)), 1e-12);
  EXPECT_EQ(r.by_batch_size.size(), 6u);
  EXPECT_FALSE(r.wrapped);
}

TEST(WeightedMomentTest, TwoSamplesSingleTerm) {
  const LinearLoss loss;
  const std::vector<Sample> data = Samples({Vector{2.0}, Vector{2.0}});
  const std::vector<Vector> probes = {Vector{0.0}};
  RandomStream rng(1);
  const WeightedMoment r = *WeightedMomentR(data, loss, 2, 2, probes, rng);
  EXPECT_NEAR(r.value, 2.0 / std::sqrt(2.0), 1e-12);
}

TEST(WeightedMomentTest, Errors) {
  const LinearLoss loss;
  const std::vector<Sample> data = Samples({Vector{1.0}, Vector{1.0}});
  const std::vector<Vector> probes = {Vector{0.0}};
  RandomStream rng(1);
  EXPECT_FALSE(WeightedMomentR(data, loss, 2, 4, probes, rng).ok());
  EXPECT_FALSE(WeightedMomentR(data, loss, 2, 1, probes, rng).ok());
}

TEST(MomentProfileTest, OrderingAndLookups) {
  SamplerSpec spec;
  spec.kind = NoiseKind::kPareto;
  spec.tail_index = 9.0;
  HeavyTailedSampler sampler = *HeavyTailedSampler::Make(spec, Vector{0.5, 0.0}, 3);
  std::vector<Sample> data;
  for (int i = 0; i < 4096; ++i) data.push_back(sampler.Next());
  const QuadraticLoss loss;
  const ConstraintSet set = *ConstraintSet::MakeBall(Vector{0.0, 0.0}, 1.0);
  RandomStream rng(17);
  const std::vector<Vector> probes = SampleProbes(set, 16, rng);
  ASSERT_EQ(probes.size(), 16u);
  for (const Vector& p : probes) EXPECT_TRUE(set.Contains(p, 1e-12));
  MomentProfileRequest request;
  request.k = 2;
  request.batch_sizes = {2, 4, 8};
  request.weighted_n = 1024;
  request.batches_per_size = 8;
  const MomentProfile profile =
      *EstimateMomentProfile(data, loss, request, probes, rng);
  EXPECT_GT(profile.r_k, 0.0);
  ASSERT_TRUE(profile.r2k(1).has_value());
  ASSERT_TRUE(profile.r2k(8).has_value());
  EXPECT_FALSE(profile.r2k(16).has_value());
  EXPECT_LE(profile.R2k_n, *profile.r2k(1));
  EXPECT_LE(*profile.r2k(8), *profile.r2k(1) * 1.05);
  EXPECT_GE(profile.max_gradient_norm, profile.r_k);
  request.k = 1;
  EXPECT_FALSE(EstimateMomentProfile(data, loss, request, probes, rng).ok());
}

// The expected empirical moment of a batch of size 2m cannot exceed the
// one of size m; checked with a 95% interval over independent batches.
TEST(MomentHalvingTest, NonIncreasingInBatchSize) {
  SamplerSpec spec;
  spec.kind = NoiseKind::kPareto;
  spec.tail_index = 6.0;
  HeavyTailedSampler sampler = *HeavyTailedSampler::Make(spec, Vector{0.3, -0.2}, 12);
  const QuadraticLoss loss;
  const std::vector<Vector> probes = {Vector{0.0, 0.0}, Vector{0.7, 0.0},
                                      Vector{0.0, -0.7}, Vector{-0.5, 0.5}};
  std::vector<double> means;
  std::vector<double> errors;
  for (int m : {1, 2, 4, 8, 16}) {
    const int batches = 4000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int b = 0; b < batches; ++b) {
      std::vector<Sample> batch;
      for (int i = 0; i < m; ++i) batch.push_back(sampler.Next());
      const double e = EmpiricalMoment(batch, loss, 2, probes)->raw;
      sum += e;
      sum_sq += e * e;
    }
    const double mean = sum / batches;
    means.push_back(mean);
    errors.push_back(std::sqrt((sum_sq / batches - mean * mean) / batches));
  }
  for (std::size_t i = 1; i < means.size(); ++i) {
    const double slack =
        1.96 * std::sqrt(errors[i] * errors[i] + errors[i - 1] * errors[i - 1]);
    EXPECT_LE(means[i], means[i - 1] + slack) << "step " << i;
  }
}

}  // namespace
}  // namespace ht_dpsco
