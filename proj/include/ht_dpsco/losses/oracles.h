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

#ifndef HT_DPSCO_LOSSES_ORACLES_H_
#define HT_DPSCO_LOSSES_ORACLES_H_

#include <memory>
#include <string>

#include "absl/status/statusor.h"
#include "ht_dpsco/core/geometry.h"
#include "ht_dpsco/losses/loss.h"

namespace ht_dpsco {

// Bounds on the data that the smoothness constants are computed from.
struct DataBounds {
  double max_feature_norm = 1.0;
  double max_abs_label = 0.0;
};

// f(w, (x, y)) = (<w, x> - y)^4.
class L4RegressionOracle final : public LossOracle {
 public:
  // alpha = 12 (D max||x|| + max|y|)^2 max||x||^2 with D the set diameter.
  static absl::StatusOr<std::unique_ptr<L4RegressionOracle>> Make(
      const ConstraintSet& constraint, const DataBounds& bounds);

  std::string name() const override { return "l4"; }
  double Value(const Vector& w, const Sample& sample) const override;
  void GradientInto(const Vector& w, const Sample& sample,
                    std::span<double> out) const override;

 private:
  L4RegressionOracle() = default;
};

// Cross-entropy of the logistic model plus (lambda/2)||w||^2; labels in {0,1}.
class LogisticL2Oracle final : public LossOracle {
 public:
  static absl::StatusOr<std::unique_ptr<LogisticL2Oracle>> Make(
      double lambda_reg, const ConstraintSet& constraint,
      const DataBounds& bounds);

  std::string name() const override { return "logistic"; }
  double Value(const Vector& w, const Sample& sample) const override;
  void GradientInto(const Vector& w, const Sample& sample,
                    std::span<double> out) const override;
  absl::Status ValidateSample(const Sample& sample) const override;

  double lambda_reg() const { return lambda_reg_; }
  // Cross-entropy without the regularizer.
  double CrossEntropy(const Vector& w, const Sample& sample) const;

 private:
  explicit LogisticL2Oracle(double lambda_reg) : lambda_reg_(lambda_reg) {}
  double lambda_reg_;
};

// f(w, x) = -<w, x> + ||w||^theta / theta. With E[x] = mu the population
// risk is minimized at w* = mu / ||mu||^((theta-2)/(theta-1)).
class SyntheticTncOracle final : public LossOracle {
 public:
  // `domain` bounds the smoothness constant and, when it is an origin
  // centred ball that excludes w*, moves the minimizer to its boundary.
  static absl::StatusOr<std::unique_ptr<SyntheticTncOracle>> Make(
      Vector mu, double theta, const ConstraintSet& domain);

  std::string name() const override { return "synthetic"; }
  double Value(const Vector& w, const Sample& sample) const override;
  void GradientInto(const Vector& w, const Sample& sample,
                    std::span<double> out) const override;
  std::optional<double> ExcessRisk(const Vector& w) const override;

  double PopulationRisk(const Vector& w) const;
  const Vector& mu() const { return mu_; }
  double theta() const { return theta_; }
  // Minimizer of the population risk over the domain.
  const Vector& known_minimizer() const { return minimizer_; }
  double optimal_value() const { return optimal_value_; }

 private:
  SyntheticTncOracle(Vector mu, double theta)
      : mu_(std::move(mu)), theta_(theta) {}

  Vector mu_;
  double theta_;
  Vector minimizer_;
  double optimal_value_ = 0.0;
};

}  // namespace ht_dpsco

#endif  // HT_DPSCO_LOSSES_ORACLES_H_
