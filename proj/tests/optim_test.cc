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
#include <cstdint>
#include <memory>
#include <set>
#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "ht_dpsco/estimator/clipped_mean.h"
#include "ht_dpsco/losses/oracles.h"
#include "ht_dpsco/losses/samplers.h"
#include "ht_dpsco/optim/batches.h"
#include "ht_dpsco/optim/clipped_gd.h"
#include "ht_dpsco/optim/dp_sgd.h"
#include "ht_dpsco/optim/lncgm.h"
#include "ht_dpsco/optim/pnca.h"
#include "ht_dpsco/optim/run_record.h"
#include "ht_dpsco/optim/schedule.h"

namespace ht_dpsco {
namespace {

ConstraintSet Ball(double radius, std::size_t d) {
  return *ConstraintSet::MakeBall(Vector(d), radius);
}

std::vector<Sample> Draw(const Vector& mu, std::size_t n, std::uint64_t seed,
                         double scale = 0.3) {
  SamplerSpec spec;
  spec.kind = NoiseKind::kTruncatedGaussian;
  spec.scale = scale;
  spec.trunc_at = 3.0 * scale;
  HeavyTailedSampler sampler = *HeavyTailedSampler::Make(spec, mu, seed);
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.Next());
  return out;
}

// A moment profile with the same r_{2k,m} at every batch size.
MomentProfile FlatProfile(std::int64_t n, double r, double lipschitz) {
  MomentProfile profile;
  profile.k = 2;
  profile.r_k = r;
  profile.R2k_n = r;
  profile.max_gradient_norm = lipschitz;
  for (std::int64_t m : LncgmBatchSizes(n)) profile.r2k_by_batch[m] = r;
  return profile;
}

TEST(ClippedGdTest, ZeroIterationsReturnsStart) {
  auto loss = *SyntheticTncOracle::Make(Vector{1.0, 0.0}, 2.0, Ball(2.0, 2));
  const std::vector<Sample> batch = {{Vector{2.0, 0.0}, 0.0}};
  absl::StatusOr<GdResult> r = ClippedRegularizedGd(
      batch, *loss, Ball(2.0, 2), 0, 0.5, 10.0, 0.0, Vector(2),
      Vector{0.25, 0.5});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->w, (Vector{0.25, 0.5}));
  EXPECT_EQ(r->iterations, 0);
}

TEST(ClippedGdTest, QuadraticOneStep) {
  auto loss = *SyntheticTncOracle::Make(Vector{1.0, 0.0}, 2.0, Ball(2.0, 2));
  const std::vector<Sample> batch = {{Vector{2.0, 0.0}, 0.0}};
  absl::StatusOr<GdResult> r = ClippedRegularizedGd(
      batch, *loss, Ball(2.0, 2), 1, 0.5, 10.0, 0.0, Vector(2), Vector(2));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->w, (Vector{1.0, 0.0}));
  EXPECT_EQ(r->clipped_fraction, 0.0);

  // Regularization pulls towards the centre: grad = (0,0) - x + lambda (w - c).
  absl::StatusOr<GdResult> reg = ClippedRegularizedGd(
      batch, *loss, Ball(2.0, 2), 1, 0.5, 10.0, 2.0, Vector{0.0, 1.0},
      Vector(2));
  ASSERT_TRUE(reg.ok());
  EXPECT_EQ(reg->w, (Vector{1.0, 1.0}));
}

TEST(ClippedGdTest, TinyClipCapsTheStep) {
  auto loss = *SyntheticTncOracle::Make(Vector{1.0, 0.0}, 2.0, Ball(2.0, 2));
  const std::vector<Sample> batch = {{Vector{2.0, 0.0}, 0.0}};
  absl::StatusOr<GdResult> r = ClippedRegularizedGd(
      batch, *loss, Ball(2.0, 2), 1, 0.5, 0.1, 0.0, Vector(2), Vector(2));
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->w[0], 0.05, 1e-15);
  EXPECT_EQ(r->clipped_fraction, 1.0);
}

TEST(ClippedGdTest, RejectsBadArguments) {
  auto loss = *SyntheticTncOracle::Make(Vector{1.0, 0.0}, 2.0, Ball(2.0, 2));
  const std::vector<Sample> batch = {{Vector{2.0, 0.0}, 0.0}};
  const ConstraintSet set = Ball(1.0, 2);
  EXPECT_FALSE(ClippedRegularizedGd(batch, *loss, set, 1, 0.0, 1.0, 0.0,
                                    Vector(2), Vector(2))
                   .ok());
  EXPECT_FALSE(ClippedRegularizedGd(batch, *loss, set, 1, 0.1, 0.0, 0.0,
                                    Vector(2), Vector(2))
                   .ok());
  EXPECT_FALSE(ClippedRegularizedGd({}, *loss, set, 1, 0.1, 1.0, 0.0,
                                    Vector(2), Vector(2))
                   .ok());
  EXPECT_FALSE(ClippedRegularizedGd(batch, *loss, set, 1, 0.1, 1.0, 0.0,
                                    Vector(2), Vector{3.0, 0.0})
                   .ok());
}

TEST(ScheduleTest, SmallExampleRows) {
  LncgmScheduleParams params;
  params.n = 8;
  params.eta = 1.0;
  params.p = 1.0;
  params.budget = *PrivacyBudget::Make(1.0, 1e-5);
  params.d = 1;
  params.lipschitz = 3.0;
  absl::StatusOr<PhaseSchedule> schedule =
      LncgmSchedule(params, FlatProfile(8, 1.0, 3.0));
  ASSERT_TRUE(schedule.ok()) << schedule.status();
  ASSERT_EQ(schedule->rows.size(), 3u);
  const std::int64_t sizes[] = {4, 2, 1};
  const double steps[] = {0.25, 1.0 / 16.0, 1.0 / 64.0};
  const double lambdas[] = {0.25, 8.0, 64.0};
  for (int i = 0; i < 3; ++i) {
    const PhaseRow& row = schedule->rows[i];
    EXPECT_EQ(row.index, i + 1);
    EXPECT_EQ(row.batch_size, sizes[i]);
    EXPECT_DOUBLE_EQ(row.stepsize, steps[i]);
    EXPECT_DOUBLE_EQ(row.regularization, lambdas[i]);
    EXPECT_DOUBLE_EQ(row.radius, 2.0 * 3.0 / lambdas[i]);
    const double n_i = static_cast<double>(sizes[i]);
    EXPECT_EQ(row.iterations,
              static_cast<std::int64_t>(std::ceil(
                  2.0 / (lambdas[i] * steps[i]) * std::log(n_i * n_i))));
    const double log_inv_delta = std::log(1e5);
    const double clip =
        std::sqrt(n_i / std::sqrt(log_inv_delta * std::log(8.0)));
    EXPECT_NEAR(row.clip, clip, 1e-12);
    EXPECT_NEAR(row.noise,
                8.0 * clip * std::sqrt(log_inv_delta) / (n_i * lambdas[i]),
                1e-12);
  }
  EXPECT_EQ(schedule->rows[0].iterations, 89);
  EXPECT_EQ(schedule->rows[2].iterations, 0);
  EXPECT_EQ(schedule->total_batch_size(), 7);
}

TEST(ScheduleTest, BatchSizesFitTheDataset) {
  for (std::int64_t n : {4, 5, 7, 100, 1023, 1024, 65537}) {
    const std::vector<std::int64_t> sizes = LncgmBatchSizes(n);
    std::int64_t total = 0;
    for (std::int64_t m : sizes) total += m;
    EXPECT_LE(total, n);
    EXPECT_EQ(static_cast<int>(sizes.size()),
              static_cast<int>(std::floor(std::log2(static_cast<double>(n)))));
  }
}

TEST(ScheduleTest, MissingMomentsAreListed) {
  LncgmScheduleParams params;
  params.n = 16;
  MomentProfile profile = FlatProfile(16, 1.0, 1.0);
  profile.r2k_by_batch.erase(4);
  absl::StatusOr<PhaseSchedule> schedule = LncgmSchedule(params, profile);
  EXPECT_EQ(schedule.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_NE(schedule.status().message().find("{4}"), std::string::npos);
}

TEST(ScheduleTest, RegimePolicy) {
  LncgmScheduleParams params;
  params.n = 16;
  params.budget = *PrivacyBudget::Make(10.0, 1e-5);
  params.smoothness = 100.0;
  params.regime = RegimePolicy::kStrict;
  const MomentProfile profile = FlatProfile(16, 1.0, 1.0);
  EXPECT_EQ(LncgmSchedule(params, profile).status().code(),
            absl::StatusCode::kFailedPrecondition);
  params.regime = RegimePolicy::kWarn;
  absl::StatusOr<PhaseSchedule> schedule = LncgmSchedule(params, profile);
  ASSERT_TRUE(schedule.ok());
  EXPECT_EQ(schedule->regime_violations.size(), 2u);
}

TEST(PartitionTest, Examples) {
  absl::StatusOr<EqualPartition> psa = PsaPartition(256);
  ASSERT_TRUE(psa.ok());
  EXPECT_EQ(psa->m, 2);
  EXPECT_EQ(psa->n0, 128);
  EXPECT_EQ(PsaPartition(4).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_NE(PsaPartition(4).status().message().find("need n >="),
            std::string::npos);

  absl::StatusOr<GeometricPartition> it = IteratedPartition(65536, 2.0);
  ASSERT_TRUE(it.ok());
  EXPECT_EQ(it->stages, 4);
  std::int64_t total = 0;
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(it->sizes[i], std::int64_t{4096} << i);
    total += it->sizes[i];
  }
  EXPECT_EQ(total, 61440);
  EXPECT_FALSE(IteratedPartition(65536, 1.0).ok());
  EXPECT_FALSE(IteratedPartition(3, 2.0).ok());
}

TEST(PartitionTest, StagesNeverExceedTheDataset) {
  for (std::int64_t n = 16; n < 1 << 20; n = n * 3 + 1) {
    for (double theta_bar : {1.5, 2.0, 3.0}) {
      absl::StatusOr<GeometricPartition> it = IteratedPartition(n, theta_bar);
      if (!it.ok()) continue;
      std::int64_t total = 0;
      for (std::int64_t s : it->sizes) {
        EXPECT_GT(s, 0);
        total += s;
      }
      EXPECT_LE(total, n);
    }
    absl::StatusOr<EqualPartition> psa = PsaPartition(n);
    if (psa.ok()) EXPECT_LE(psa->m * psa->n0, n);
  }
}

TEST(PncaScheduleTest, StepParameters) {
  EXPECT_EQ(AccelerationWeight(1), 1.0);
  EXPECT_EQ(AccelerationWeight(2), 0.5);
  EXPECT_DOUBLE_EQ(AccelerationWeight(10), 2.0 / 12.0);
  EXPECT_EQ(ProxCoefficient(1.0, 1), 2.0);
  EXPECT_DOUBLE_EQ(ProxCoefficient(3.0, 3), 1.0);
  // One prox step from the origin with alpha_1 = 1, eta_1 = 4 eta / 2 = 0.5.
  Vector w(2);
  w.AddScaled(-AccelerationWeight(1) / ProxCoefficient(0.25, 1),
              Vector{0.25, 0.0});
  EXPECT_EQ(w, (Vector{-0.5, 0.0}));
  EXPECT_DOUBLE_EQ(BatchMeanSigma(3.0, 9), 1.0);
}

TEST(PncaScheduleTest, TheoryIterationsExample) {
  // sqrt(beta D / r_k) = 1, eps n / sqrt(d log(1/delta)) = 16, k = 2:
  // min{16^(1/4), n^(1/4)} = 2.
  const PrivacyBudget budget = *PrivacyBudget::Make(1.0, std::exp(-1.0));
  EXPECT_DOUBLE_EQ(PncaTheoryIterations(2.0, 0.5, 1.0, 2, budget, 16, 1), 2.0);
  EXPECT_DOUBLE_EQ(PncaTheoryIterations(2.0, 0.5, 1.0, 2, budget, 16, 1),
                   std::pow(16.0, 0.25));
  EXPECT_DOUBLE_EQ(PncaClip(1.0, 2, budget, 16, 1), 4.0);
}

TEST(PncaTest, SingleStepCollapsesToOneNoisyProxStep) {
  const Vector mu{0.4, -0.2};
  const std::vector<Sample> data = Draw(mu, 4000, 3);
  const ConstraintSet set = Ball(1.0, 2);
  auto loss = *SyntheticTncOracle::Make(mu, 2.0, set);
  MomentProfile moments = FlatProfile(4000, 1.0, 1.0);
  PncaOptions options;
  options.iterations = 1;
  options.eta = 2.0;
  options.shuffle.c_cal = 8.0;
  const PrivacyBudget budget = *PrivacyBudget::Make(0.05, 1e-5);
  const Vector w0{0.1, 0.1};
  RandomStream rng(17);
  RunRecord record;
  absl::StatusOr<Vector> out =
      PncaSgd(data, *loss, set, w0, budget, moments, rng, options, &record);
  ASSERT_TRUE(out.ok()) << out.status();
  ASSERT_EQ(record.phases.size(), 1u);
  const PhaseTrace& trace = record.phases[0];
  EXPECT_EQ(trace.row.batch_size, 4000);

  Vector grad(2);
  std::vector<double> scratch;
  ClippedGradientMean(*loss, w0, data, trace.row.clip, grad, scratch);
  RandomStream noise(trace.noise_seed);
  for (double& g : grad) g += trace.noise_sigma * noise.Normal();
  Vector expected = w0;
  expected.AddScaled(-1.0 / ProxCoefficient(2.0, 1), grad);
  expected = *ProjectSet(expected, set);
  EXPECT_LE(Distance(*out, expected), 1e-12);
  EXPECT_EQ(record.metadata["samples_used"], 4000);
}

TEST(PncaTest, InfeasibleBudgetIsReported) {
  const Vector mu{0.4, -0.2};
  const std::vector<Sample> data = Draw(mu, 1000, 3);
  const ConstraintSet set = Ball(1.0, 2);
  auto loss = *SyntheticTncOracle::Make(mu, 2.0, set);
  RandomStream rng(1);
  absl::StatusOr<Vector> out =
      PncaSgd(data, *loss, set, Vector(2), *PrivacyBudget::Make(0.03, 1e-5),
              FlatProfile(1000, 1.0, 1.0), rng);
  EXPECT_FALSE(out.ok());
  EXPECT_NE(out.status().message().find("max feasible epsilon"),
            std::string::npos);
}

TEST(DpSgdTest, SigmaScaling) {
  const PrivacyBudget budget = *PrivacyBudget::Make(1.0, 1e-5);
  const double base = *DpSgdSigma(budget, 100, 10, 1.0);
  EXPECT_NEAR(*DpSgdSigma(budget, 400, 10, 1.0), 2.0 * base, 1e-12 * base);
  EXPECT_NEAR(*DpSgdSigma(budget, 100, 20, 1.0), 0.5 * base, 1e-12 * base);
  const double l = std::log(1e5);
  const double rho = std::pow(std::sqrt(l + 1.0) - std::sqrt(l), 2.0);
  EXPECT_NEAR(base, 0.2 * std::sqrt(100.0 / (2.0 * rho)), 1e-12 * base);
  EXPECT_FALSE(DpSgdSigma(budget, 0, 10, 1.0).ok());
}

TEST(DpSgdTest, NoiseMultiplierCapReportsMaxSteps) {
  const Vector mu{0.4, -0.2};
  const std::vector<Sample> data = Draw(mu, 200, 4);
  const ConstraintSet set = Ball(1.0, 2);
  auto loss = *SyntheticTncOracle::Make(mu, 2.0, set);
  DpSgdOptions options;
  options.iterations = 10000;
  options.max_noise_multiplier = 1.0;
  RandomStream rng(2);
  absl::StatusOr<Vector> out =
      DpSgdBaseline(data, *loss, set, Vector(2),
                    *PrivacyBudget::Make(1.0, 1e-5), rng, options);
  EXPECT_EQ(out.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_NE(out.status().message().find("max feasible T"), std::string::npos);
}

TEST(BatchDrawerTest, BatchesAreDisjoint) {
  RandomStream rng(8);
  BatchDrawer drawer(100, rng);
  std::set<std::size_t> seen;
  auto absorb = [&](const std::vector<std::size_t>& batch) {
    for (std::size_t i : batch) {
      EXPECT_LT(i, 100u);
      EXPECT_TRUE(seen.insert(i).second) << i;
    }
  };
  absorb(*drawer.Take(10));
  BatchDrawer child = *drawer.Subset(30);
  absorb(*child.Take(20));
  absorb(*child.TakeRest());
  EXPECT_FALSE(child.Take(1).ok());
  absorb(*drawer.Take(25));
  EXPECT_EQ(drawer.remaining(), 35u);
  absorb(*drawer.TakeRest());
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_EQ(drawer.consumed(), 100u);
  EXPECT_FALSE(drawer.Take(1).ok());
}

TEST(BatchDrawerTest, GatherCopiesInOrder) {
  const std::vector<Sample> data = {{Vector{0.0}, 0.0},
                                    {Vector{1.0}, 1.0},
                                    {Vector{2.0}, 2.0}};
  const std::vector<std::size_t> idx = {2, 0};
  const std::vector<Sample> out = Gather(data, idx);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].label, 2.0);
  EXPECT_EQ(out[1].label, 0.0);
}

class AlgorithmTest : public ::testing::Test {
 protected:
  static constexpr std::size_t kDim = 4;
  static constexpr std::int64_t kN = 4096;

  void SetUp() override {
    mu_ = Vector{0.3, -0.2, 0.1, 0.2};
    data_ = Draw(mu_, kN, 21, 0.2);
    loss_ = *SyntheticTncOracle::Make(mu_, 2.0, set_);
    moments_ = FlatProfile(kN, 1.0, 1.0);
    for (std::int64_t m : LncgmBatchSizes(kN / 2)) {
      moments_.r2k_by_batch[m] = 1.0;
    }
    options_.initial_radius = 1.0;
    options_.stepsize_scale = 30.0;
    options_.regime = RegimePolicy::kWarn;
    options_.lncgm.max_horizon = 1.0;
    options_.lncgm.noise = NoiseCalibration::kTrajectory;
  }

  absl::StatusOr<Vector> RunLncgm(std::uint64_t seed, RunRecord* record,
                                  const IterateObserver& observer = {}) {
    absl::StatusOr<PhaseSchedule> schedule = StandaloneLncgmSchedule(
        kN, *loss_, budget_, moments_, kDim, options_);
    if (!schedule.ok()) return schedule.status();
    LncgmOptions lncgm = options_.lncgm;
    lncgm.gd.observer = observer;
    RandomStream rng(seed);
    return Lncgm(data_, *loss_, set_, Vector(kDim), *schedule, budget_, rng,
                 lncgm, record);
  }

  Vector mu_;
  ConstraintSet set_ = Ball(1.0, kDim);
  std::vector<Sample> data_;
  std::unique_ptr<SyntheticTncOracle> loss_;
  MomentProfile moments_;
  LocalizationOptions options_;
  PrivacyBudget budget_ = *PrivacyBudget::Make(4.0, 1e-5);
};

TEST_F(AlgorithmTest, LncgmReducesExcessRiskTenfold) {
  RunRecord record;
  absl::StatusOr<Vector> w = RunLncgm(5, &record);
  ASSERT_TRUE(w.ok()) << w.status();
  const double initial = *loss_->ExcessRisk(Vector(kDim));
  const double final_risk = *loss_->ExcessRisk(*w);
  EXPECT_LT(final_risk, 0.1 * initial) << final_risk << " vs " << initial;
  EXPECT_EQ(record.algorithm, "lncgm");
  EXPECT_EQ(record.phases.size(), LncgmBatchSizes(kN).size());
  EXPECT_EQ(record.metadata["stated_guarantee"]["epsilon"].get<double>(),
            budget_.epsilon * budget_.epsilon);
}

TEST_F(AlgorithmTest, SameSeedSameOutput) {
  RunRecord a, b, c;
  absl::StatusOr<Vector> wa = RunLncgm(9, &a);
  absl::StatusOr<Vector> wb = RunLncgm(9, &b);
  absl::StatusOr<Vector> wc = RunLncgm(10, &c);
  ASSERT_TRUE(wa.ok() && wb.ok() && wc.ok());
  EXPECT_EQ(*wa, *wb);
  EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
  EXPECT_NE(*wa, *wc);
}

TEST_F(AlgorithmTest, IteratesStayFeasible) {
  std::int64_t observed = 0;
  std::int64_t violations = 0;
  absl::StatusOr<Vector> w =
      RunLncgm(3, nullptr, [&](const ConstraintSet& local, const Vector& v) {
        ++observed;
        if (!local.Contains(v, 1e-6) || !set_.Contains(v, 1e-6)) ++violations;
      });
  ASSERT_TRUE(w.ok()) << w.status();
  EXPECT_GT(observed, 0);
  EXPECT_EQ(violations, 0);
}

TEST_F(AlgorithmTest, PhasesChargeTheFullBudgetOnce) {
  RunRecord record;
  ASSERT_TRUE(RunLncgm(4, &record).ok());
  for (const PhaseTrace& trace : record.phases) {
    EXPECT_EQ(trace.epsilon, budget_.epsilon);
    EXPECT_EQ(trace.delta, budget_.delta);
  }
  const PrivacyBudget total = record.TotalBudget();
  EXPECT_EQ(total.epsilon, budget_.epsilon);
  EXPECT_EQ(total.delta, budget_.delta);
  EXPECT_LE(record.metadata["samples_used"].get<std::int64_t>(), kN);
}

TEST_F(AlgorithmTest, PsaUsesDisjointStages) {
  moments_.R2k_n = 1.0;
  absl::StatusOr<EqualPartition> partition = PsaPartition(kN);
  ASSERT_TRUE(partition.ok());
  for (std::int64_t m : LncgmBatchSizes(partition->n0)) {
    moments_.r2k_by_batch[m] = 1.0;
  }
  RandomStream rng(6);
  RunRecord record;
  absl::StatusOr<Vector> w = PrivateStochasticApproximation(
      data_, *loss_, set_, Vector(kDim), budget_, moments_, rng, options_,
      &record);
  ASSERT_TRUE(w.ok()) << w.status();
  EXPECT_EQ(record.algorithm, "psa");
  EXPECT_EQ(record.metadata["stages"], partition->m);
  EXPECT_LE(record.metadata["samples_used"].get<std::int64_t>(), kN);
  EXPECT_EQ(record.TotalBudget().epsilon, budget_.epsilon);
  EXPECT_LT(*loss_->ExcessRisk(*w), *loss_->ExcessRisk(Vector(kDim)));
}

TEST_F(AlgorithmTest, DpSgdRecordsItsCalibration) {
  DpSgdOptions options;
  options.iterations = 200;
  options.batch_size = 256;
  options.stepsize = 0.5;
  RandomStream rng(7);
  RunRecord record;
  absl::StatusOr<Vector> w = DpSgdBaseline(data_, *loss_, set_, Vector(kDim),
                                           budget_, rng, options, &record);
  ASSERT_TRUE(w.ok()) << w.status();
  EXPECT_TRUE(set_.Contains(*w, 1e-9));
  EXPECT_NEAR(record.metadata["zcdp_rho"].get<double>(), *DpToZcdp(budget_),
              1e-15);
  EXPECT_LT(*loss_->ExcessRisk(*w), *loss_->ExcessRisk(Vector(kDim)));
}

}  // namespace
}  // namespace ht_dpsco
