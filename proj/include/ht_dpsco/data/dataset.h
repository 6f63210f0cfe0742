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

#ifndef HT_DPSCO_DATA_DATASET_H_
#define HT_DPSCO_DATA_DATASET_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ht_dpsco/core/vector.h"
#include "ht_dpsco/losses/loss.h"
#include "ht_dpsco/losses/oracles.h"
#include "ht_dpsco/losses/samplers.h"
#include "ht_dpsco/privacy/random.h"

namespace ht_dpsco {

// Where a dataset came from: a file (path plus content hash) or a synthetic
// generator (sampler spec, mean and seed).
struct Provenance {
  enum class Source { kFile, kSynthetic, kDerived };
  Source source = Source::kDerived;
  std::string path;
  std::uint64_t content_hash = 0;
  std::string generator;
  Vector mu;
  std::uint64_t seed = 0;

  // Single-line encoding, safe to embed in CSV and JSON strings.
  std::string ToString() const;
  static absl::StatusOr<Provenance> FromString(const std::string& text);

  bool operator==(const Provenance&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  std::size_t d = 0;
  std::string name;
  Provenance provenance;

  std::size_t size() const { return samples.size(); }
};

struct LibsvmOptions {
  // Dimension to use when it exceeds the largest index in the file.
  std::optional<std::size_t> d_hint;
  // Map labels -1/+1 to 0/1 (labels already in {0,1} are kept).
  bool binary_labels_to_01 = false;
};

// Parses `label idx:val ...` lines with strictly increasing 1-based indices
// into a dense dataset. Blank lines and `#` comments are skipped. Errors name
// the offending line.
absl::StatusOr<Dataset> ParseLibsvm(std::istream& in,
                                    const LibsvmOptions& options = {});

// Reads a libsvm file, transparently decompressing gzip input.
absl::StatusOr<Dataset> ReadLibsvmFile(const std::string& path,
                                       const LibsvmOptions& options = {});

// Canonical text form: labels and values printed round-trip exact, zero
// features omitted.
void SerializeLibsvm(const Dataset& dataset, std::ostream& out);

// Rescales every feature vector with nonzero norm to unit l2 norm.
void NormalizeFeatures(Dataset& dataset);

// Largest feature norm and absolute label.
DataBounds ComputeBounds(const Dataset& dataset);

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Random permutation split into train_n training and the remaining test
// samples.
absl::StatusOr<SplitResult> Split(const Dataset& dataset, std::size_t train_n,
                                  RandomStream& rng);

// Draws n samples from the heavy-tailed sampler.
absl::StatusOr<Dataset> MaterializeSynthetic(const SamplerSpec& spec,
                                             const Vector& mu, std::size_t n,
                                             std::uint64_t seed);

// FNV-1a 64-bit hash.
std::uint64_t Fnv1a(std::string_view bytes);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_DATA_DATASET_H_
