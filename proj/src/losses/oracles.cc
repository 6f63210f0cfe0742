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

#include "ht_dpsco/losses/oracles.h"

#include <cmath>

#include "absl/strings/str_format.h"

namespace ht_dpsco {
namespace {

double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// max over the set of ||w||.
double MaxNorm(const ConstraintSet& set) {
  const Ball& outer = set.outer();
  double best = Norm(outer.center) + outer.radius;
  for (const Ball& ball : set.balls()) {
    best = std::min(best, Norm(ball.center) + ball.radius);
  }
  return best;
}

}  // namespace

absl::StatusOr<std::unique_ptr<L4RegressionOracle>> L4RegressionOracle::Make(
    const ConstraintSet& constraint, const DataBounds& bounds) {
  if (!(bounds.max_feature_norm >= 0.0) || !(bounds.max_abs_label >= 0.0)) {
    return absl::InvalidArgumentError("data bounds must be non-negative");
  }
  std::unique_ptr<L4RegressionOracle> oracle(new L4RegressionOracle());
  const double residual_bound =
      constraint.diameter() * bounds.max_feature_norm + bounds.max_abs_label;
  oracle->smoothness_alpha_ = std::max(
      12.0 * residual_bound * residual_bound * bounds.max_feature_norm *
          bounds.max_feature_norm,
      1e-12);
  return oracle;
}

double L4RegressionOracle::Value(const Vector& w, const Sample& sample) const {
  const double r = Dot(w, sample.features) - sample.label;
  const double r2 = r * r;
  return r2 * r2;
}

void L4RegressionOracle::GradientInto(const Vector& w, const Sample& sample,
                                      std::span<double> out) const {
  const double r = Dot(w, sample.features) - sample.label;
  const double scale = 4.0 * r * r * r;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = scale * sample.features[i];
  }
}

absl::StatusOr<std::unique_ptr<LogisticL2Oracle>> LogisticL2Oracle::Make(
    double lambda_reg, const ConstraintSet& constraint,
    const DataBounds& bounds) {
  if (!(lambda_reg > 0.0) || !std::isfinite(lambda_reg)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "logistic regularization must be positive, got %g", lambda_reg));
  }
  std::unique_ptr<LogisticL2Oracle> oracle(new LogisticL2Oracle(lambda_reg));
  oracle->smoothness_alpha_ =
      bounds.max_feature_norm * bounds.max_feature_norm / 4.0 + lambda_reg;
  oracle->lipschitz_ =
      bounds.max_feature_norm + lambda_reg * MaxNorm(constraint);
  oracle->tnc_ = TncSpec::FromStrongConvexity(lambda_reg);
  return oracle;
}

double LogisticL2Oracle::CrossEntropy(const Vector& w,
                                      const Sample& sample) const {
  const double z = Dot(w, sample.features);
  // -y log h(z) - (1-y) log(1-h(z)) = softplus(z) - y z
  return Softplus(z) - sample.label * z;
}

double LogisticL2Oracle::Value(const Vector& w, const Sample& sample) const {
  return CrossEntropy(w, sample) + 0.5 * lambda_reg_ * Dot(w, w);
}

void LogisticL2Oracle::GradientInto(const Vector& w, const Sample& sample,
                                    std::span<double> out) const {
  const double residual = Sigmoid(Dot(w, sample.features)) - sample.label;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = residual * sample.features[i] + lambda_reg_ * w[i];
  }
}

absl::Status LogisticL2Oracle::ValidateSample(const Sample& sample) const {
  if (sample.label != 0.0 && sample.label != 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "logistic labels must be 0 or 1, got %g", sample.label));
  }
  return LossOracle::ValidateSample(sample);
}

absl::StatusOr<std::unique_ptr<SyntheticTncOracle>> SyntheticTncOracle::Make(
    Vector mu, double theta, const ConstraintSet& domain) {
  if (!(theta >= 2.0) || !std::isfinite(theta)) {
    return absl::OutOfRangeError(
        absl::StrFormat("synthetic TNC instance needs theta >= 2, got %g",
                        theta));
  }
  if (mu.empty() || !mu.IsFinite() || Norm(mu) == 0.0) {
    return absl::InvalidArgumentError("mu must be finite and nonzero");
  }
  if (mu.dim() != domain.dim()) {
    return absl::InvalidArgumentError("mu and domain dimensions differ");
  }
  std::unique_ptr<SyntheticTncOracle> oracle(
      new SyntheticTncOracle(std::move(mu), theta));
  const double mu_norm = Norm(oracle->mu_);
  // ||w*||^(theta-1) = ||mu||.
  Vector w_star =
      oracle->mu_ * std::pow(mu_norm, -(theta - 2.0) / (theta - 1.0));
  if (!domain.Contains(w_star, 1e-12)) {
    const Ball& outer = domain.outer();
    if (domain.is_intersection() || Norm(outer.center) != 0.0) {
      return absl::InvalidArgumentError(
          "the population minimizer lies outside the domain; only origin "
          "centred balls may clip it");
    }
    // F is radially symmetric about the mu direction, so the constrained
    // minimizer sits on the boundary along mu.
    w_star = oracle->mu_ * (outer.radius / mu_norm);
  }
  oracle->minimizer_ = std::move(w_star);
  oracle->optimal_value_ = oracle->PopulationRisk(oracle->minimizer_);
  oracle->smoothness_alpha_ =
      std::max((theta - 1.0) * std::pow(MaxNorm(domain), theta - 2.0), 1.0);
  return oracle;
}

double SyntheticTncOracle::Value(const Vector& w, const Sample& sample) const {
  return -Dot(w, sample.features) + std::pow(Norm(w), theta_) / theta_;
}

void SyntheticTncOracle::GradientInto(const Vector& w, const Sample& sample,
                                      std::span<double> out) const {
  const double scale =
      theta_ == 2.0 ? 1.0 : std::pow(SquaredNorm(w.values()), (theta_ - 2.0) / 2.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = scale * w[i] - sample.features[i];
  }
}

double SyntheticTncOracle::PopulationRisk(const Vector& w) const {
  return -Dot(w, mu_) + std::pow(Norm(w), theta_) / theta_;
}

std::optional<double> SyntheticTncOracle::ExcessRisk(const Vector& w) const {
  if (theta_ == 2.0 && minimizer_ == mu_) {
    // Exact form avoids cancellation: F(w) - F(mu) = ||w - mu||^2 / 2.
    const double dist = Distance(w, mu_);
    return 0.5 * dist * dist;
  }
  return PopulationRisk(w) - optimal_value_;
}

}  // namespace ht_dpsco
