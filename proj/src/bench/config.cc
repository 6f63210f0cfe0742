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

#include "ht_dpsco/bench/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "boost/property_tree/ini_parser.hpp"
#include "boost/property_tree/ptree.hpp"

namespace ht_dpsco {
namespace {

using boost::property_tree::ptree;

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  for (absl::string_view item :
       absl::StrSplit(text, absl::ByAnyChar(", "), absl::SkipEmpty())) {
    out.emplace_back(item);
  }
  return out;
}

// Typed access to one INI section with key-naming error messages.
class Section {
 public:
  Section(const ptree* tree, std::string name)
      : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> Raw(const std::string& key) const {
    if (tree_ == nullptr) return std::nullopt;
    auto child = tree_->get_child_optional(ptree::path_type(key, '/'));
    if (!child) return std::nullopt;
    return std::string(absl::StripAsciiWhitespace(child->data()));
  }

  absl::Status String(const std::string& key, std::string& out) const {
    if (auto raw = Raw(key)) out = *raw;
    return absl::OkStatus();
  }

  absl::Status Double(const std::string& key, double& out) const {
    std::optional<double> value;
    if (absl::Status s = OptionalDouble(key, value); !s.ok()) return s;
    if (value) out = *value;
    return absl::OkStatus();
  }

  absl::Status OptionalDouble(const std::string& key,
                              std::optional<double>& out) const {
    auto raw = Raw(key);
    if (!raw) return absl::OkStatus();
    double value = 0.0;
    if (!absl::SimpleAtod(*raw, &value)) return Bad(key, *raw);
    out = value;
    return absl::OkStatus();
  }

  template <typename Int>
  absl::Status Integer(const std::string& key, Int& out) const {
    std::optional<Int> value;
    if (absl::Status s = OptionalInteger(key, value); !s.ok()) return s;
    if (value) out = *value;
    return absl::OkStatus();
  }

  template <typename Int>
  absl::Status OptionalInteger(const std::string& key,
                               std::optional<Int>& out) const {
    auto raw = Raw(key);
    if (!raw) return absl::OkStatus();
    std::int64_t value = 0;
    if (!absl::SimpleAtoi(*raw, &value)) return Bad(key, *raw);
    out = static_cast<Int>(value);
    return absl::OkStatus();
  }

  absl::Status Bool(const std::string& key, bool& out) const {
    auto raw = Raw(key);
    if (!raw) return absl::OkStatus();
    if (!absl::SimpleAtob(*raw, &out)) return Bad(key, *raw);
    return absl::OkStatus();
  }

  absl::Status OptionalVector(const std::string& key,
                              std::optional<Vector>& out) const {
    auto raw = Raw(key);
    if (!raw) return absl::OkStatus();
    Vector v;
    if (!ParseVector(*raw, v) || v.empty()) return Bad(key, *raw);
    out = std::move(v);
    return absl::OkStatus();
  }

  absl::Status Bad(const std::string& key, const std::string& raw) const {
    return absl::InvalidArgumentError(
        absl::StrFormat("[%s] %s: cannot parse '%s'", name_, key, raw));
  }

 private:
  const ptree* tree_;
  std::string name_;
};

Section GetSection(const ptree& root, const std::string& name) {
  auto child = root.get_child_optional(ptree::path_type(name, '/'));
  return Section(child ? &*child : nullptr, name);
}

#define HT_RETURN_IF_ERROR(expr)               \
  do {                                         \
    if (absl::Status _s = (expr); !_s.ok()) {  \
      return _s;                               \
    }                                          \
  } while (false)

absl::Status ParseSampler(const Section& data, SamplerSpec& spec) {
  std::string kind = "pareto";
  HT_RETURN_IF_ERROR(data.String("sampler", kind));
  if (kind == "pareto") {
    spec.kind = NoiseKind::kPareto;
  } else if (kind == "truncated_gaussian") {
    spec.kind = NoiseKind::kTruncatedGaussian;
  } else if (kind == "spike") {
    spec.kind = NoiseKind::kRademacherSpike;
  } else {
    return data.Bad("sampler", kind);
  }
  HT_RETURN_IF_ERROR(data.Double("tail_index", spec.tail_index));
  HT_RETURN_IF_ERROR(data.Double("scale", spec.scale));
  HT_RETURN_IF_ERROR(data.Double("trunc_at", spec.trunc_at));
  HT_RETURN_IF_ERROR(data.Double("spike_p", spec.spike_p));
  HT_RETURN_IF_ERROR(data.Double("spike_magnitude", spec.spike_magnitude));
  std::string labels = "none";
  HT_RETURN_IF_ERROR(data.String("labels", labels));
  if (labels == "none") {
    spec.label_kind = LabelKind::kNone;
  } else if (labels == "linear") {
    spec.label_kind = LabelKind::kLinear;
  } else if (labels == "logistic") {
    spec.label_kind = LabelKind::kLogistic;
  } else {
    return data.Bad("labels", labels);
  }
  std::optional<Vector> weights;
  HT_RETURN_IF_ERROR(data.OptionalVector("label_weights", weights));
  if (weights) spec.label_weights = *weights;
  HT_RETURN_IF_ERROR(data.Double("label_noise", spec.label_noise));
  return absl::OkStatus();
}

absl::Status ParseAlgorithm(const Section& section, AlgorithmConfig& algo) {
  HT_RETURN_IF_ERROR(section.Double("theta_bar", algo.theta_bar));
  HT_RETURN_IF_ERROR(section.Double("p", algo.p));
  HT_RETURN_IF_ERROR(section.Double("initial_radius", algo.initial_radius));
  HT_RETURN_IF_ERROR(section.String("stepsize_rule", algo.stepsize_rule));
  HT_RETURN_IF_ERROR(section.Double("stepsize_scale", algo.stepsize_scale));
  HT_RETURN_IF_ERROR(section.Double("fixed_stepsize", algo.fixed_stepsize));
  HT_RETURN_IF_ERROR(
      section.String("noise_calibration", algo.noise_calibration));
  HT_RETURN_IF_ERROR(
      section.OptionalInteger("max_iterations", algo.max_iterations));
  HT_RETURN_IF_ERROR(section.OptionalDouble("max_horizon", algo.max_horizon));
  HT_RETURN_IF_ERROR(section.String("regime", algo.regime));
  HT_RETURN_IF_ERROR(section.OptionalInteger("iterations", algo.iterations));
  HT_RETURN_IF_ERROR(section.OptionalDouble("eta", algo.eta));
  HT_RETURN_IF_ERROR(section.Double("c_cal", algo.c_cal));
  HT_RETURN_IF_ERROR(section.Double("c_small", algo.c_small));
  HT_RETURN_IF_ERROR(section.Integer("batch_size", algo.batch_size));
  HT_RETURN_IF_ERROR(section.Double("clip", algo.clip));
  HT_RETURN_IF_ERROR(section.Double("stepsize", algo.stepsize));
  HT_RETURN_IF_ERROR(section.OptionalDouble("max_noise_multiplier",
                                            algo.max_noise_multiplier));
  HT_RETURN_IF_ERROR(section.Bool("non_private", algo.non_private));
  HT_RETURN_IF_ERROR(section.OptionalVector("w0", algo.w0));

  if (algo.stepsize_rule != "theory" && algo.stepsize_rule != "fixed") {
    return section.Bad("stepsize_rule", algo.stepsize_rule);
  }
  if (algo.noise_calibration != "trajectory" &&
      algo.noise_calibration != "stationary") {
    return section.Bad("noise_calibration", algo.noise_calibration);
  }
  if (algo.regime != "strict" && algo.regime != "warn") {
    return section.Bad("regime", algo.regime);
  }
  return absl::OkStatus();
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? absl::StrFormat("%.17g", *v) : "-";
}

std::string FormatOptional(const std::optional<std::int64_t>& v) {
  return v ? absl::StrCat(*v) : "-";
}

std::string FormatOptional(const std::optional<Vector>& v) {
  return v ? FormatVector(*v) : "-";
}

}  // namespace

double EpsilonSpec::Resolve(std::int64_t n, double delta) const {
  if (!small_regime) return value;
  const double nn = static_cast<double>(n);
  return std::sqrt(std::log(nn / delta) / nn);
}

std::string EpsilonSpec::ToString() const {
  return small_regime ? "small" : absl::StrFormat("%.17g", value);
}

absl::StatusOr<double> ExperimentConfig::DeltaFor(std::int64_t n) const {
  const double delta =
      delta_rule == DeltaRule::kFixed
          ? fixed_delta
          : std::pow(static_cast<double>(n), -delta_power);
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta %g for n = %d is outside (0, 1)", delta, n));
  }
  return delta;
}

std::string ExperimentConfig::Fingerprint() const {
  std::string out = absl::StrFormat(
      "loss=%s,%.17g,%.17g,%.17g;data=%s,%d,%s,%.17g,%s,%d,%d,%s,%s,%d,%d;"
      "moments=%d,%d,%d,%d;delta=%d,%.17g,%.17g",
      loss.id, loss.theta, loss.lambda_reg, loss.radius, data.source, data.d,
      FormatOptional(data.mu), data.mu_norm, data.sampler.ToString(),
      data.aux_n, data.test_n, data.path, data.test_path, data.normalize,
      data.allow_synthetic_fallback, moments.k, moments.probes,
      moments.batches_per_size, moments.weighted_n,
      static_cast<int>(delta_rule), delta_power, fixed_delta);
  for (const AlgorithmConfig& a : algorithms) {
    absl::StrAppendFormat(
        &out,
        ";%s=%.17g,%.17g,%.17g,%s,%.17g,%.17g,%s,%s,%s,%s,%s,%s,%.17g,%.17g,"
        "%d,%.17g,%.17g,%s,%d,%s",
        a.id, a.theta_bar, a.p, a.initial_radius, a.stepsize_rule,
        a.stepsize_scale, a.fixed_stepsize, a.noise_calibration,
        FormatOptional(a.max_iterations), FormatOptional(a.max_horizon),
        a.regime, FormatOptional(a.iterations), FormatOptional(a.eta),
        a.c_cal, a.c_small, a.batch_size, a.clip, a.stepsize,
        FormatOptional(a.max_noise_multiplier), a.non_private,
        FormatOptional(a.w0));
  }
  return out;
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    const std::string& text) {
  ptree root;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    return absl::InvalidArgumentError(
        absl::StrFormat("config line %d: %s", e.line(), e.message()));
  }
  ExperimentConfig config;

  const Section experiment = GetSection(root, "experiment");
  HT_RETURN_IF_ERROR(experiment.String("name", config.name));
  HT_RETURN_IF_ERROR(experiment.String("output", config.output_csv));
  HT_RETURN_IF_ERROR(experiment.String("trajectory", config.trajectory_path));
  HT_RETURN_IF_ERROR(experiment.Integer("threads", config.threads));
  for (const std::string& item : SplitList(experiment.Raw("n").value_or(""))) {
    std::int64_t n = 0;
    if (!absl::SimpleAtoi(item, &n) || n < 1) return experiment.Bad("n", item);
    config.n_values.push_back(n);
  }
  for (const std::string& item :
       SplitList(experiment.Raw("eps").value_or(""))) {
    EpsilonSpec eps;
    if (item == "small") {
      eps.small_regime = true;
    } else if (!absl::SimpleAtod(item, &eps.value) || !(eps.value > 0.0)) {
      return experiment.Bad("eps", item);
    }
    config.epsilons.push_back(eps);
  }
  for (const std::string& item :
       SplitList(experiment.Raw("seeds").value_or(""))) {
    std::uint64_t seed = 0;
    if (!absl::SimpleAtoi(item, &seed)) return experiment.Bad("seeds", item);
    config.seeds.push_back(seed);
  }
  std::string delta_rule = "power";
  HT_RETURN_IF_ERROR(experiment.String("delta_rule", delta_rule));
  if (delta_rule == "power") {
    config.delta_rule = DeltaRule::kPower;
  } else if (delta_rule == "fixed") {
    config.delta_rule = DeltaRule::kFixed;
  } else {
    return experiment.Bad("delta_rule", delta_rule);
  }
  HT_RETURN_IF_ERROR(experiment.Double("delta_power", config.delta_power));
  HT_RETURN_IF_ERROR(experiment.Double("delta", config.fixed_delta));

  const Section loss = GetSection(root, "loss");
  HT_RETURN_IF_ERROR(loss.String("id", config.loss.id));
  HT_RETURN_IF_ERROR(loss.Double("theta", config.loss.theta));
  HT_RETURN_IF_ERROR(loss.Double("lambda_reg", config.loss.lambda_reg));
  HT_RETURN_IF_ERROR(loss.Double("radius", config.loss.radius));
  if (config.loss.id != "synthetic" && config.loss.id != "l4" &&
      config.loss.id != "logistic") {
    return loss.Bad("id", config.loss.id);
  }

  const Section data = GetSection(root, "data");
  HT_RETURN_IF_ERROR(data.String("source", config.data.source));
  HT_RETURN_IF_ERROR(data.Integer("d", config.data.d));
  HT_RETURN_IF_ERROR(data.OptionalVector("mu", config.data.mu));
  HT_RETURN_IF_ERROR(data.Double("mu_norm", config.data.mu_norm));
  HT_RETURN_IF_ERROR(ParseSampler(data, config.data.sampler));
  HT_RETURN_IF_ERROR(data.Integer("aux_n", config.data.aux_n));
  HT_RETURN_IF_ERROR(data.Integer("test_n", config.data.test_n));
  HT_RETURN_IF_ERROR(data.String("path", config.data.path));
  HT_RETURN_IF_ERROR(data.String("test_path", config.data.test_path));
  HT_RETURN_IF_ERROR(data.Bool("normalize", config.data.normalize));
  HT_RETURN_IF_ERROR(
      data.Bool("synthetic_fallback", config.data.allow_synthetic_fallback));
  if (config.data.source != "synthetic" && config.data.source != "libsvm") {
    return data.Bad("source", config.data.source);
  }
  if (config.data.mu) config.data.d = config.data.mu->dim();

  const Section moments = GetSection(root, "moments");
  HT_RETURN_IF_ERROR(moments.Integer("k", config.moments.k));
  HT_RETURN_IF_ERROR(moments.Integer("probes", config.moments.probes));
  HT_RETURN_IF_ERROR(
      moments.Integer("batches_per_size", config.moments.batches_per_size));
  HT_RETURN_IF_ERROR(moments.Integer("weighted_n", config.moments.weighted_n));

  for (const std::string& id :
       SplitList(experiment.Raw("algorithms").value_or(""))) {
    static const char* const kKnown[] = {"lncgm", "psa",   "ilncgm",
                                         "pnca",  "ipnca", "dpsgd"};
    if (std::find(std::begin(kKnown), std::end(kKnown), id) ==
        std::end(kKnown)) {
      return experiment.Bad("algorithms", id);
    }
    for (const AlgorithmConfig& existing : config.algorithms) {
      if (existing.id == id) {
        return absl::InvalidArgumentError(
            absl::StrFormat("algorithm '%s' listed twice", id));
      }
    }
    AlgorithmConfig algo;
    algo.id = id;
    HT_RETURN_IF_ERROR(ParseAlgorithm(GetSection(root, id), algo));
    config.algorithms.push_back(std::move(algo));
  }

  if (config.algorithms.empty() || config.n_values.empty() ||
      config.epsilons.empty() || config.seeds.empty()) {
    return absl::InvalidArgumentError(
        "experiment needs nonempty algorithms, n, eps and seeds lists");
  }
  for (std::int64_t n : config.n_values) {
    absl::StatusOr<double> delta = config.DeltaFor(n);
    if (!delta.ok()) return delta.status();
  }
  return config;
}

absl::StatusOr<ExperimentConfig> ReadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrFormat("cannot open config file '%s'", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseExperimentConfig(buffer.str());
}

}  // namespace ht_dpsco
