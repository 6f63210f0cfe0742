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

#include <cmath>
#include <memory>
#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "ht_dpsco/core/tnc.h"
#include "ht_dpsco/losses/oracles.h"
#include "ht_dpsco/losses/samplers.h"
#include "ht_dpsco/privacy/random.h"
#include "oracles.h"

namespace ht_dpsco {
namespace {

ConstraintSet Ball2(double radius, std::size_t d = 2) {
  return *ConstraintSet::MakeBall(Vector(d), radius);
}

TEST(L4OracleTest, Examples) {
  auto loss = *L4RegressionOracle::Make(Ball2(1.0), {1.0, 0.0});
  const Sample fit{Vector{1.0, 0.0}, 0.0};
  EXPECT_EQ(loss->Value(Vector{0.0, 0.0}, fit), 0.0);
  EXPECT_EQ(loss->Gradient(Vector{0.0, 0.0}, fit), (Vector{0.0, 0.0}));
  EXPECT_EQ(loss->Value(Vector{1.0, 0.0}, fit), 1.0);
  EXPECT_EQ(loss->Gradient(Vector{1.0, 0.0}, fit), (Vector{4.0, 0.0}));
}

TEST(L4OracleTest, SmoothnessFromBounds) {
  auto loss = *L4RegressionOracle::Make(Ball2(1.0), {2.0, 0.5});
  // 12 (D max||x|| + max|y|)^2 max||x||^2 with D = 2.
  EXPECT_DOUBLE_EQ(loss->smoothness_alpha(), 12.0 * 4.5 * 4.5 * 4.0);
  EXPECT_FALSE(L4RegressionOracle::Make(Ball2(1.0), {-1.0, 0.0}).ok());
}

TEST(LogisticOracleTest, Examples) {
  auto loss = *LogisticL2Oracle::Make(0.1, Ball2(5.0), {1.0, 1.0});
  const Sample s{Vector{0.3, -2.0}, 1.0};
  EXPECT_NEAR(loss->Value(Vector{0.0, 0.0}, s), std::log(2.0), 1e-15);
  const Vector g = loss->Gradient(Vector{0.0, 0.0}, s);
  EXPECT_NEAR(g[0], -0.5 * 0.3, 1e-15);
  EXPECT_NEAR(g[1], -0.5 * -2.0, 1e-15);

  auto unit = *LogisticL2Oracle::Make(1.0, Ball2(5.0), {1.0, 1.0});
  const Sample zero{Vector{0.0, 0.0}, 0.0};
  EXPECT_NEAR(unit->Value(Vector{1.0, 0.0}, zero), std::log(2.0) + 0.5, 1e-15);
  EXPECT_EQ(unit->Gradient(Vector{1.0, 0.0}, zero), (Vector{1.0, 0.0}));
}

TEST(LogisticOracleTest, ConstantsAndValidation) {
  auto loss = *LogisticL2Oracle::Make(0.2, Ball2(3.0), {2.0, 1.0});
  EXPECT_DOUBLE_EQ(loss->smoothness_alpha(), 4.0 / 4.0 + 0.2);
  ASSERT_TRUE(loss->tnc().has_value());
  EXPECT_DOUBLE_EQ(loss->tnc()->theta, 2.0);
  EXPECT_DOUBLE_EQ(loss->tnc()->lambda, 0.1);
  EXPECT_FALSE(loss->ValidateSample({Vector{1.0, 0.0}, -1.0}).ok());
  EXPECT_FALSE(loss->ValidateSample({Vector{1.0, 0.0}, 0.5}).ok());
  EXPECT_TRUE(loss->ValidateSample({Vector{1.0, 0.0}, 1.0}).ok());
  EXPECT_FALSE(LogisticL2Oracle::Make(0.0, Ball2(1.0), {}).ok());
}

TEST(LogisticOracleTest, CrossEntropyIsStableForLargeMargins) {
  auto loss = *LogisticL2Oracle::Make(0.1, Ball2(1000.0), {1.0, 1.0});
  const Sample s{Vector{1.0, 0.0}, 1.0};
  EXPECT_NEAR(loss->CrossEntropy(Vector{800.0, 0.0}, s), 0.0, 1e-300);
  EXPECT_NEAR(loss->CrossEntropy(Vector{-800.0, 0.0}, s), 800.0, 1e-9);
}

TEST(LogisticOracleTest, GradientNormBound) {
  auto loss = *LogisticL2Oracle::Make(0.3, Ball2(4.0, 3), {2.0, 1.0});
  RandomStream rng(6);
  for (int i = 0; i < 200; ++i) {
    const Vector w = testing::UniformInBall(3, 4.0, rng);
    const Sample s{testing::UniformInBall(3, 2.0, rng),
                   static_cast<double>(rng.NextU64() & 1)};
    EXPECT_LE(Norm(loss->Gradient(w, s)),
              Norm(s.features) + 0.3 * Norm(w) + 1e-12);
  }
}

TEST(LogisticOracleTest, StrongConvexityGivesTnc) {
  auto loss = *LogisticL2Oracle::Make(0.5, Ball2(3.0), {1.0, 1.0});
  std::vector<Sample> data;
  RandomStream rng(13);
  for (int i = 0; i < 50; ++i) {
    data.push_back({testing::UniformInBall(2, 1.0, rng),
                    static_cast<double>(rng.NextU64() & 1)});
  }
  auto risk = [&](const Vector& w) {
    double total = 0.0;
    for (const Sample& s : data) total += loss->Value(w, s);
    return total / data.size();
  };
  // Minimize the empirical risk by gradient descent.
  Vector w(2);
  for (int t = 0; t < 5000; ++t) {
    Vector g(2);
    for (const Sample& s : data) g.AddScaled(1.0 / data.size(), loss->Gradient(w, s));
    w.AddScaled(-1.0, g);
  }
  std::vector<Vector> probes;
  for (int i = 0; i < 100; ++i) probes.push_back(w + testing::UniformInBall(2, 2.0, rng));
  absl::StatusOr<TncReport> report = VerifyTnc(risk, w, *loss->tnc(), probes);
  ASSERT_TRUE(report.ok());
  EXPECT_TRUE(report->holds) << report->min_ratio;
}

TEST(SyntheticOracleTest, MinimizerExamples) {
  auto theta2 = *SyntheticTncOracle::Make(Vector{0.3, 0.4}, 2.0, Ball2(1.0));
  EXPECT_EQ(theta2->known_minimizer(), (Vector{0.3, 0.4}));
  auto theta4 =
      *SyntheticTncOracle::Make(Vector{8.0, 0.0}, 4.0, Ball2(10.0));
  EXPECT_NEAR(Norm(theta4->known_minimizer()), 2.0, 1e-12);
  EXPECT_NEAR(theta4->known_minimizer()[0], 2.0, 1e-12);
  // F(w*) = -||mu||^(theta/(theta-1)) (1 - 1/theta)
  EXPECT_NEAR(theta4->optimal_value(), -std::pow(8.0, 4.0 / 3.0) * 0.75, 1e-12);
}

TEST(SyntheticOracleTest, OptimalValueAgreesWithNumericMinimization) {
  const Vector mu{1.0, -2.0, 0.5};
  auto loss = *SyntheticTncOracle::Make(mu, 3.0, Ball2(5.0, 3));
  Vector w(3);
  for (int t = 0; t < 20000; ++t) {
    Vector g = loss->Gradient(w, {mu, 0.0});
    w.AddScaled(-0.05, g);
    w = *ProjectBall(w, 5.0);
  }
  EXPECT_LE(Distance(w, loss->known_minimizer()), 1e-6);
  EXPECT_NEAR(loss->PopulationRisk(w), loss->optimal_value(), 1e-10);
}

TEST(SyntheticOracleTest, ClippedByDomain) {
  auto loss = *SyntheticTncOracle::Make(Vector{3.0, 0.0}, 2.0, Ball2(1.0));
  EXPECT_EQ(loss->known_minimizer(), (Vector{1.0, 0.0}));
  EXPECT_NEAR(*loss->ExcessRisk(Vector{1.0, 0.0}), 0.0, 1e-15);
  EXPECT_GT(*loss->ExcessRisk(Vector{0.0, 1.0}), 0.0);
}

TEST(SyntheticOracleTest, Errors) {
  EXPECT_EQ(SyntheticTncOracle::Make(Vector{1.0, 0.0}, 1.5, Ball2(1.0))
                .status()
                .code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_FALSE(SyntheticTncOracle::Make(Vector{0.0, 0.0}, 2.0, Ball2(1.0)).ok());
  EXPECT_FALSE(SyntheticTncOracle::Make(Vector{1.0}, 2.0, Ball2(1.0)).ok());
}

// All three oracles: analytic gradients match central differences, and
// per-sample losses are convex along random chords.
TEST(OracleGradientTest, FiniteDifferencesAndConvexity) {
  RandomStream rng(99);
  const std::size_t d = 4;
  const ConstraintSet set = Ball2(1.0, d);
  std::vector<std::unique_ptr<LossOracle>> oracles;
  oracles.push_back(*L4RegressionOracle::Make(set, {1.0, 1.0}));
  oracles.push_back(*LogisticL2Oracle::Make(0.05, set, {1.0, 1.0}));
  Vector mu(d, 0.3);
  oracles.push_back(*SyntheticTncOracle::Make(mu, 2.0, set));
  oracles.push_back(*SyntheticTncOracle::Make(mu, 4.0, set));
  for (const auto& loss : oracles) {
    for (int probe = 0; probe < 100; ++probe) {
      const Vector w = testing::UniformInBall(d, 1.0, rng);
      Sample s{testing::UniformInBall(d, 1.0, rng),
               static_cast<double>(rng.NextU64() & 1)};
      EXPECT_LT(testing::FiniteDifferenceError(*loss, w, s), 1e-5)
          << loss->name();
      const Vector v = testing::UniformInBall(d, 1.0, rng);
      const Vector mid = 0.5 * (w + v);
      EXPECT_LE(loss->Value(mid, s),
                0.5 * (loss->Value(w, s) + loss->Value(v, s)) + 1e-9)
          << loss->name();
    }
  }
}

TEST(L4OracleTest, EmpiricalTncRatioPositive) {
  const ConstraintSet set = Ball2(1.0, 2);
  auto loss = *L4RegressionOracle::Make(set, {2.0, 2.0});
  RandomStream rng(41);
  const Vector w_true{0.4, -0.3};
  std::vector<Sample> data;
  for (int i = 0; i < 200; ++i) {
    const Vector x = testing::UniformInBall(2, 1.0, rng);
    data.push_back({x, Dot(w_true, x)});
  }
  auto risk = [&](const Vector& w) {
    double total = 0.0;
    for (const Sample& s : data) total += loss->Value(w, s);
    return total / data.size();
  };
  std::vector<Vector> probes;
  for (int i = 0; i < 100; ++i) {
    probes.push_back(*ProjectBall(w_true + testing::UniformInBall(2, 1.0, rng), 1.0));
  }
  absl::StatusOr<TncReport> report = VerifyTnc(risk, w_true, {4.0, 1e-4}, probes);
  ASSERT_TRUE(report.ok());
  EXPECT_GT(report->min_ratio, 0.0);
}

TEST(SamplerTest, SpecRoundTrip) {
  SamplerSpec spec;
  spec.kind = NoiseKind::kRademacherSpike;
  spec.spike_p = 0.25;
  spec.spike_magnitude = 3.0;
  spec.label_kind = LabelKind::kLinear;
  spec.label_weights = Vector{1.0, -0.5};
  spec.label_noise = 0.1;
  absl::StatusOr<SamplerSpec> parsed = SamplerSpec::FromString(spec.ToString());
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(parsed->ToString(), spec.ToString());
  EXPECT_FALSE(SamplerSpec::FromString("kind=cauchy").ok());
}

TEST(SamplerTest, SpikeWithCertainProbability) {
  SamplerSpec spec;
  spec.kind = NoiseKind::kRademacherSpike;
  spec.spike_p = 1.0;
  spec.spike_magnitude = 2.0;
  const Vector mu{1.0, -1.0, 0.0, 0.5};
  HeavyTailedSampler sampler = *HeavyTailedSampler::Make(spec, mu, 4);
  Vector mean(4);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const Vector x = sampler.Next().features;
    EXPECT_NEAR(Distance(x, mu), 2.0, 1e-12);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(std::abs(x[j] - mu[j]), 1.0, 1e-12);
    }
    mean.AddScaled(1.0 / draws, x);
  }
  // Per coordinate standard error is 1 / sqrt(draws).
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(mean[j], mu[j], 3.0 / std::sqrt(draws));
  }
  EXPECT_DOUBLE_EQ(sampler.NoiseMoment(3.0), 8.0);
}

TEST(SamplerTest, ParetoMomentMatchesClosedForm) {
  SamplerSpec spec;
  spec.kind = NoiseKind::kPareto;
  spec.tail_index = 8.0;
  spec.scale = 0.5;
  const Vector mu{0.0, 0.0};
  HeavyTailedSampler sampler = *HeavyTailedSampler::Make(spec, mu, 10);
  const double analytic = 8.0 * std::pow(0.5, 2.0) / (8.0 - 2.0);
  EXPECT_DOUBLE_EQ(sampler.NoiseMoment(2.0), analytic);
  double total = 0.0;
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) {
    const double r = Norm(sampler.Next().features);
    total += r * r;
  }
  EXPECT_NEAR(total / draws, analytic, 0.1 * analytic);
  EXPECT_TRUE(std::isinf(sampler.NoiseMoment(8.0)));
}

TEST(SamplerTest, TruncatedGaussianRespectsTruncation) {
  SamplerSpec spec;
  spec.kind = NoiseKind::kTruncatedGaussian;
  spec.scale = 2.0;
  spec.trunc_at = 1.0;
  const Vector mu{0.5, -0.5, 0.0};
  HeavyTailedSampler sampler = *HeavyTailedSampler::Make(spec, mu, 12);
  for (int i = 0; i < 10000; ++i) {
    const Vector x = sampler.Next().features;
    for (std::size_t j = 0; j < 3; ++j) EXPECT_LE(std::abs(x[j] - mu[j]), 1.0);
  }
}

TEST(SamplerTest, DeterministicPerSeedAndValidated) {
  SamplerSpec spec;
  HeavyTailedSampler a = *HeavyTailedSampler::Make(spec, Vector{1.0}, 5);
  HeavyTailedSampler b = *HeavyTailedSampler::Make(spec, Vector{1.0}, 5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.Next().features, b.Next().features);
  spec.spike_p = 0.0;
  spec.kind = NoiseKind::kRademacherSpike;
  EXPECT_FALSE(HeavyTailedSampler::Make(spec, Vector{1.0}, 5).ok());
  SamplerSpec labelled;
  labelled.label_kind = LabelKind::kLogistic;
  labelled.label_weights = Vector{1.0, 2.0};
  EXPECT_FALSE(HeavyTailedSampler::Make(labelled, Vector{1.0}, 5).ok());
}

}  // namespace
}  // namespace ht_dpsco
