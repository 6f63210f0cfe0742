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

#include "ht_dpsco/losses/samplers.h"

#include <cmath>
#include <limits>
#include <map>
#include <string_view>

#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"

namespace ht_dpsco {
namespace {

const char* NoiseName(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kPareto:
      return "pareto";
    case NoiseKind::kTruncatedGaussian:
      return "truncated_gaussian";
    case NoiseKind::kRademacherSpike:
      return "spike";
  }
  return "?";
}

const char* LabelName(LabelKind kind) {
  switch (kind) {
    case LabelKind::kNone:
      return "none";
    case LabelKind::kLinear:
      return "linear";
    case LabelKind::kLogistic:
      return "logistic";
  }
  return "?";
}

}  // namespace

std::string SamplerSpec::ToString() const {
  std::string out = absl::StrFormat("kind=%s", NoiseName(kind));
  switch (kind) {
    case NoiseKind::kPareto:
      absl::StrAppendFormat(&out, ";tail_index=%.17g;scale=%.17g", tail_index,
                            scale);
      break;
    case NoiseKind::kTruncatedGaussian:
      absl::StrAppendFormat(&out, ";scale=%.17g;trunc_at=%.17g", scale,
                            trunc_at);
      break;
    case NoiseKind::kRademacherSpike:
      absl::StrAppendFormat(&out, ";spike_p=%.17g;spike_magnitude=%.17g",
                            spike_p, spike_magnitude);
      break;
  }
  absl::StrAppendFormat(&out, ";labels=%s", LabelName(label_kind));
  if (label_kind != LabelKind::kNone) {
    absl::StrAppendFormat(&out, ";label_weights=%s;label_noise=%.17g",
                          FormatVector(label_weights), label_noise);
  }
  return out;
}

absl::StatusOr<SamplerSpec> SamplerSpec::FromString(const std::string& text) {
  std::map<std::string, std::string> fields;
  for (absl::string_view item : absl::StrSplit(text, ';', absl::SkipEmpty())) {
    std::pair<std::string, std::string> kv =
        absl::StrSplit(item, absl::MaxSplits('=', 1));
    fields[kv.first] = kv.second;
  }
  SamplerSpec spec;
  const std::string kind = fields["kind"];
  if (kind == "pareto") {
    spec.kind = NoiseKind::kPareto;
  } else if (kind == "truncated_gaussian") {
    spec.kind = NoiseKind::kTruncatedGaussian;
  } else if (kind == "spike") {
    spec.kind = NoiseKind::kRademacherSpike;
  } else {
    return absl::InvalidArgumentError(
        absl::StrFormat("unknown sampler kind '%s'", kind));
  }
  auto read = [&](const char* key, double& target) -> absl::Status {
    auto it = fields.find(key);
    if (it == fields.end()) return absl::OkStatus();
    if (!absl::SimpleAtod(it->second, &target)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("bad value for %s: '%s'", key, it->second));
    }
    return absl::OkStatus();
  };
  const std::pair<const char*, double*> numeric_fields[] = {
      {"tail_index", &spec.tail_index}, {"scale", &spec.scale},
      {"trunc_at", &spec.trunc_at},     {"spike_p", &spec.spike_p},
      {"spike_magnitude", &spec.spike_magnitude},
      {"label_noise", &spec.label_noise}};
  for (const auto& [key, target] : numeric_fields) {
    if (absl::Status s = read(key, *target); !s.ok()) return s;
  }
  const std::string labels = fields.count("labels") ? fields["labels"] : "none";
  if (labels == "none") {
    spec.label_kind = LabelKind::kNone;
  } else if (labels == "linear" || labels == "logistic") {
    spec.label_kind =
        labels == "linear" ? LabelKind::kLinear : LabelKind::kLogistic;
    if (!ParseVector(fields["label_weights"], spec.label_weights)) {
      return absl::InvalidArgumentError("label_weights missing or malformed");
    }
  } else {
    return absl::InvalidArgumentError(
        absl::StrFormat("unknown label model '%s'", labels));
  }
  return spec;
}

absl::StatusOr<HeavyTailedSampler> HeavyTailedSampler::Make(
    const SamplerSpec& spec, Vector mu, std::uint64_t seed) {
  if (mu.empty() || !mu.IsFinite()) {
    return absl::InvalidArgumentError("sampler mean must be finite, d >= 1");
  }
  if (!(spec.scale > 0.0)) {
    return absl::InvalidArgumentError("sampler scale must be positive");
  }
  switch (spec.kind) {
    case NoiseKind::kPareto:
      if (!(spec.tail_index > 0.0)) {
        return absl::InvalidArgumentError("Pareto tail index must be positive");
      }
      break;
    case NoiseKind::kTruncatedGaussian:
      if (!(spec.trunc_at > 0.0)) {
        return absl::InvalidArgumentError("truncation level must be positive");
      }
      break;
    case NoiseKind::kRademacherSpike:
      if (!(spec.spike_p > 0.0 && spec.spike_p <= 1.0)) {
        return absl::InvalidArgumentError("spike probability must be in (0,1]");
      }
      if (!(spec.spike_magnitude > 0.0)) {
        return absl::InvalidArgumentError("spike magnitude must be positive");
      }
      break;
  }
  if (spec.label_kind != LabelKind::kNone &&
      spec.label_weights.dim() != mu.dim()) {
    return absl::InvalidArgumentError(
        "label weights must match the feature dimension");
  }
  return HeavyTailedSampler(spec, std::move(mu), seed);
}

double HeavyTailedSampler::TruncatedNormal() {
  for (;;) {
    const double z = spec_.scale * rng_.Normal();
    if (std::abs(z) <= spec_.trunc_at) return z;
  }
}

Sample HeavyTailedSampler::Next() {
  const std::size_t d = mu_.dim();
  Sample sample{mu_, 0.0};
  switch (spec_.kind) {
    case NoiseKind::kPareto: {
      Vector direction(d);
      double norm = 0.0;
      while (norm == 0.0) {
        for (double& x : direction) x = rng_.Normal();
        norm = Norm(direction);
      }
      // Inverse CDF; 1 - U keeps the argument in (0, 1].
      const double radius =
          spec_.scale * std::pow(1.0 - rng_.Uniform(), -1.0 / spec_.tail_index);
      sample.features.AddScaled(radius / norm, direction);
      break;
    }
    case NoiseKind::kTruncatedGaussian:
      for (std::size_t i = 0; i < d; ++i) sample.features[i] += TruncatedNormal();
      break;
    case NoiseKind::kRademacherSpike:
      if (rng_.Uniform() < spec_.spike_p) {
        const double step =
            spec_.spike_magnitude / std::sqrt(static_cast<double>(d));
        for (std::size_t i = 0; i < d; ++i) {
          sample.features[i] += (rng_.NextU64() & 1ULL) ? step : -step;
        }
      }
      break;
  }
  switch (spec_.label_kind) {
    case LabelKind::kNone:
      break;
    case LabelKind::kLinear:
      sample.label = Dot(spec_.label_weights, sample.features) +
                     spec_.label_noise * rng_.Normal();
      break;
    case LabelKind::kLogistic: {
      const double z = Dot(spec_.label_weights, sample.features);
      const double prob = 1.0 / (1.0 + std::exp(-z));
      sample.label = rng_.Uniform() < prob ? 1.0 : 0.0;
      break;
    }
  }
  return sample;
}

double HeavyTailedSampler::NoiseMoment(double k) const {
  switch (spec_.kind) {
    case NoiseKind::kPareto:
      if (spec_.tail_index <= k) return std::numeric_limits<double>::infinity();
      return spec_.tail_index * std::pow(spec_.scale, k) /
             (spec_.tail_index - k);
    case NoiseKind::kTruncatedGaussian:
      return std::pow(std::sqrt(static_cast<double>(mu_.dim())) * spec_.trunc_at,
                      k);
    case NoiseKind::kRademacherSpike:
      return spec_.spike_p * std::pow(spec_.spike_magnitude, k);
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace ht_dpsco
