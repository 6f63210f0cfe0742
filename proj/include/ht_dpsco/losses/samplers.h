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

#ifndef HT_DPSCO_LOSSES_SAMPLERS_H_
#define HT_DPSCO_LOSSES_SAMPLERS_H_

#include <string>

#include "absl/status/statusor.h"
#include "ht_dpsco/core/vector.h"
#include "ht_dpsco/losses/loss.h"
#include "ht_dpsco/privacy/random.h"

namespace ht_dpsco {

enum class NoiseKind {
  // mu + R u with u uniform on the sphere and R ~ Pareto(scale, tail_index).
  kPareto,
  // mu + z with z_j ~ N(0, scale^2) truncated to [-trunc_at, trunc_at].
  kTruncatedGaussian,
  // mu with probability 1-p, otherwise mu + magnitude * s / sqrt(d) for a
  // Rademacher sign vector s.
  kRademacherSpike,
};

enum class LabelKind {
  kNone,
  // y = <w_true, x> + noise_std * N(0, 1)
  kLinear,
  // y ~ Bernoulli(sigmoid(<w_true, x>))
  kLogistic,
};

struct SamplerSpec {
  NoiseKind kind = NoiseKind::kPareto;
  double tail_index = 5.0;
  double scale = 1.0;
  double trunc_at = 3.0;
  double spike_p = 0.1;
  double spike_magnitude = 1.0;
  LabelKind label_kind = LabelKind::kNone;
  Vector label_weights;
  double label_noise = 0.0;

  // Stable one-line description, e.g. "pareto(tail=5,scale=1)+linear(...)".
  std::string ToString() const;
  static absl::StatusOr<SamplerSpec> FromString(const std::string& text);
};

// Draws i.i.d. samples with mean mu. Owns its random stream; not shareable.
class HeavyTailedSampler {
 public:
  static absl::StatusOr<HeavyTailedSampler> Make(const SamplerSpec& spec,
                                                 Vector mu,
                                                 std::uint64_t seed);

  Sample Next();

  // E||x - mu||^k in closed form (Pareto, spike) or an upper bound
  // (truncated Gaussian: (sqrt(d) trunc_at)^k). Infinite when the Pareto
  // tail index does not exceed k.
  double NoiseMoment(double k) const;

  const SamplerSpec& spec() const { return spec_; }
  const Vector& mu() const { return mu_; }

 private:
  HeavyTailedSampler(SamplerSpec spec, Vector mu, std::uint64_t seed)
      : spec_(std::move(spec)), mu_(std::move(mu)), rng_(seed) {}

  double TruncatedNormal();

  SamplerSpec spec_;
  Vector mu_;
  RandomStream rng_;
};

}  // namespace ht_dpsco

#endif  // HT_DPSCO_LOSSES_SAMPLERS_H_
