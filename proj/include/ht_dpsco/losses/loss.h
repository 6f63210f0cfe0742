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

#ifndef HT_DPSCO_LOSSES_LOSS_H_
#define HT_DPSCO_LOSSES_LOSS_H_

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "absl/status/status.h"
#include "ht_dpsco/core/geometry.h"
#include "ht_dpsco/core/tnc.h"
#include "ht_dpsco/core/vector.h"

namespace ht_dpsco {

struct Sample {
  Vector features;
  double label = 0.0;
};

// Per-sample loss f(w, x) with first-order oracle and the regularity
// metadata the optimizers calibrate against.
class LossOracle {
 public:
  virtual ~LossOracle() = default;

  virtual std::string name() const = 0;
  virtual double Value(const Vector& w, const Sample& sample) const = 0;
  // Writes grad_w f(w, sample) into `out` (size w.dim()).
  virtual void GradientInto(const Vector& w, const Sample& sample,
                            std::span<double> out) const = 0;

  Vector Gradient(const Vector& w, const Sample& sample) const {
    Vector out(w.dim());
    GradientInto(w, sample, out.values());
    return out;
  }

  // Rejects samples outside the loss's domain (e.g. non-binary labels).
  virtual absl::Status ValidateSample(const Sample& sample) const {
    return sample.features.IsFinite() && std::isfinite(sample.label)
               ? absl::OkStatus()
               : absl::InvalidArgumentError("sample has non-finite entries");
  }

  // Smoothness constant valid over the constraint set the oracle was built
  // for.
  double smoothness_alpha() const { return smoothness_alpha_; }
  // Uniform Lipschitz constant, when one is known.
  std::optional<double> lipschitz() const { return lipschitz_; }
  // Growth condition of the induced population risk, when known.
  std::optional<TncSpec> tnc() const { return tnc_; }
  void set_tnc(TncSpec tnc) { tnc_ = tnc; }

  // Exact excess population risk F(w) - min F, for oracles whose population
  // is known in closed form.
  virtual std::optional<double> ExcessRisk(const Vector& w) const {
    return std::nullopt;
  }

 protected:
  double smoothness_alpha_ = 1.0;
  std::optional<double> lipschitz_;
  std::optional<TncSpec> tnc_;
};

}  // namespace ht_dpsco

#endif  // HT_DPSCO_LOSSES_LOSS_H_
