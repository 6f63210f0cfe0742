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

#include "ht_dpsco/data/dataset.h"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace ht_dpsco {
namespace {

const char* SourceName(Provenance::Source source) {
  switch (source) {
    case Provenance::Source::kFile:
      return "file";
    case Provenance::Source::kSynthetic:
      return "synthetic";
    case Provenance::Source::kDerived:
      return "derived";
  }
  return "derived";
}

absl::Status LineError(std::size_t line, const std::string& message) {
  return absl::InvalidArgumentError(
      absl::StrFormat("libsvm line %d: %s", line, message));
}

absl::StatusOr<std::string> ReadAllGz(const std::string& path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) {
    return absl::NotFoundError(absl::StrFormat("cannot open '%s'", path));
  }
  std::string content;
  char buffer[1 << 16];
  int got = 0;
  while ((got = gzread(file, buffer, sizeof(buffer))) > 0) {
    content.append(buffer, static_cast<std::size_t>(got));
  }
  int errnum = Z_OK;
  const char* message = gzerror(file, &errnum);
  gzclose(file);
  if (got < 0 || (errnum != Z_OK && errnum != Z_STREAM_END)) {
    return absl::DataLossError(
        absl::StrFormat("reading '%s' failed: %s", path, message));
  }
  return content;
}

}  // namespace

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string Provenance::ToString() const {
  switch (source) {
    case Source::kFile:
      return absl::StrFormat("source=file|path=%s|hash=%016x", path,
                             content_hash);
    case Source::kSynthetic:
      return absl::StrFormat("source=synthetic|generator=%s|mu=%s|seed=%d",
                             generator, FormatVector(mu), seed);
    case Source::kDerived:
      break;
  }
  return absl::StrFormat("source=%s|generator=%s", SourceName(source),
                         generator);
}

absl::StatusOr<Provenance> Provenance::FromString(const std::string& text) {
  std::map<std::string, std::string> fields;
  for (absl::string_view item : absl::StrSplit(text, '|', absl::SkipEmpty())) {
    std::pair<std::string, std::string> kv =
        absl::StrSplit(item, absl::MaxSplits('=', 1));
    fields[kv.first] = kv.second;
  }
  Provenance out;
  const std::string& source = fields["source"];
  if (source == "file") {
    out.source = Source::kFile;
    out.path = fields["path"];
    const std::string& hash = fields["hash"];
    const auto [end, error] = std::from_chars(
        hash.data(), hash.data() + hash.size(), out.content_hash, 16);
    if (hash.empty() || error != std::errc() ||
        end != hash.data() + hash.size()) {
      return absl::InvalidArgumentError("provenance has a bad content hash");
    }
  } else if (source == "synthetic") {
    out.source = Source::kSynthetic;
    out.generator = fields["generator"];
    if (!ParseVector(fields["mu"], out.mu) ||
        !absl::SimpleAtoi(fields["seed"], &out.seed)) {
      return absl::InvalidArgumentError("provenance has a bad mu or seed");
    }
  } else if (source == "derived") {
    out.source = Source::kDerived;
    out.generator = fields["generator"];
  } else {
    return absl::InvalidArgumentError(
        absl::StrFormat("unknown provenance source '%s'", source));
  }
  return out;
}

absl::StatusOr<Dataset> ParseLibsvm(std::istream& in,
                                    const LibsvmOptions& options) {
  struct SparseRow {
    double label;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<SparseRow> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    absl::string_view body = line;
    if (std::size_t hash = body.find('#'); hash != absl::string_view::npos) {
      body = body.substr(0, hash);
    }
    std::vector<absl::string_view> tokens =
        absl::StrSplit(body, absl::ByAnyChar(" \t\r"), absl::SkipEmpty());
    if (tokens.empty()) continue;
    SparseRow row;
    if (!absl::SimpleAtod(tokens[0], &row.label) ||
        !std::isfinite(row.label)) {
      return LineError(line_number,
                       absl::StrFormat("bad label '%s'", tokens[0]));
    }
    if (options.binary_labels_to_01) {
      if (row.label == -1.0) {
        row.label = 0.0;
      } else if (row.label != 0.0 && row.label != 1.0) {
        return LineError(line_number,
                         absl::StrFormat("label '%s' is not binary", tokens[0]));
      }
    }
    std::size_t previous = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      std::vector<absl::string_view> parts =
          absl::StrSplit(tokens[t], absl::MaxSplits(':', 1));
      std::int64_t index = 0;
      double value = 0.0;
      if (parts.size() != 2 || !absl::SimpleAtoi(parts[0], &index) ||
          !absl::SimpleAtod(parts[1], &value) || !std::isfinite(value)) {
        return LineError(line_number,
                         absl::StrFormat("malformed token '%s'", tokens[t]));
      }
      if (index <= 0) {
        return LineError(line_number,
                         absl::StrFormat("index %d is not positive", index));
      }
      const std::size_t unsigned_index = static_cast<std::size_t>(index);
      if (unsigned_index == previous) {
        return LineError(line_number,
                         absl::StrFormat("repeated index %d", index));
      }
      if (unsigned_index < previous) {
        return LineError(line_number,
                         absl::StrFormat("index %d follows %d", index, previous));
      }
      previous = unsigned_index;
      max_index = std::max(max_index, unsigned_index);
      row.entries.emplace_back(unsigned_index, value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    return absl::InvalidArgumentError("libsvm input has no samples");
  }
  Dataset dataset;
  dataset.d = std::max(max_index, options.d_hint.value_or(0));
  if (dataset.d == 0) {
    return absl::InvalidArgumentError("libsvm input has no features");
  }
  dataset.samples.reserve(rows.size());
  for (const SparseRow& row : rows) {
    Sample sample{Vector(dataset.d), row.label};
    for (const auto& [index, value] : row.entries) {
      sample.features[index - 1] = value;
    }
    dataset.samples.push_back(std::move(sample));
  }
  return dataset;
}

absl::StatusOr<Dataset> ReadLibsvmFile(const std::string& path,
                                       const LibsvmOptions& options) {
  absl::StatusOr<std::string> content = ReadAllGz(path);
  if (!content.ok()) return content.status();
  std::istringstream in(*content);
  absl::StatusOr<Dataset> dataset = ParseLibsvm(in, options);
  if (!dataset.ok()) {
    return absl::Status(dataset.status().code(),
                        absl::StrFormat("%s: %s", path,
                                        dataset.status().message()));
  }
  std::string name = path;
  if (std::size_t slash = name.find_last_of('/'); slash != std::string::npos) {
    name = name.substr(slash + 1);
  }
  dataset->name = name;
  dataset->provenance.source = Provenance::Source::kFile;
  dataset->provenance.path = path;
  dataset->provenance.content_hash = Fnv1a(*content);
  return dataset;
}

void SerializeLibsvm(const Dataset& dataset, std::ostream& out) {
  for (const Sample& sample : dataset.samples) {
    out << absl::StrFormat("%.17g", sample.label);
    for (std::size_t j = 0; j < sample.features.dim(); ++j) {
      if (sample.features[j] != 0.0) {
        out << absl::StrFormat(" %d:%.17g", j + 1, sample.features[j]);
      }
    }
    out << '\n';
  }
}

void NormalizeFeatures(Dataset& dataset) {
  for (Sample& sample : dataset.samples) {
    const double norm = Norm(sample.features);
    if (norm > 0.0) sample.features *= 1.0 / norm;
  }
}

DataBounds ComputeBounds(const Dataset& dataset) {
  DataBounds bounds{0.0, 0.0};
  for (const Sample& sample : dataset.samples) {
    bounds.max_feature_norm =
        std::max(bounds.max_feature_norm, Norm(sample.features));
    bounds.max_abs_label = std::max(bounds.max_abs_label, std::abs(sample.label));
  }
  return bounds;
}

absl::StatusOr<SplitResult> Split(const Dataset& dataset, std::size_t train_n,
                                  RandomStream& rng) {
  if (train_n > dataset.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "train size %d exceeds dataset size %d", train_n, dataset.size()));
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng.engine());
  SplitResult out;
  out.train_indices.assign(order.begin(), order.begin() + train_n);
  out.test_indices.assign(order.begin() + train_n, order.end());
  for (Dataset* part : {&out.train, &out.test}) {
    part->d = dataset.d;
    part->provenance = dataset.provenance;
  }
  out.train.name = dataset.name + ".train";
  out.test.name = dataset.name + ".test";
  for (std::size_t i : out.train_indices) {
    out.train.samples.push_back(dataset.samples[i]);
  }
  for (std::size_t i : out.test_indices) {
    out.test.samples.push_back(dataset.samples[i]);
  }
  return out;
}

absl::StatusOr<Dataset> MaterializeSynthetic(const SamplerSpec& spec,
                                             const Vector& mu, std::size_t n,
                                             std::uint64_t seed) {
  if (n == 0) {
    return absl::InvalidArgumentError("synthetic dataset needs n >= 1");
  }
  absl::StatusOr<HeavyTailedSampler> sampler =
      HeavyTailedSampler::Make(spec, mu, seed);
  if (!sampler.ok()) return sampler.status();
  Dataset dataset;
  dataset.d = mu.dim();
  dataset.name = "synthetic";
  dataset.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) dataset.samples.push_back(sampler->Next());
  dataset.provenance.source = Provenance::Source::kSynthetic;
  dataset.provenance.generator = spec.ToString();
  dataset.provenance.mu = mu;
  dataset.provenance.seed = seed;
  return dataset;
}

}  // namespace ht_dpsco
