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

#ifndef HT_DPSCO_PRIVACY_RANDOM_H_
#define HT_DPSCO_PRIVACY_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ht_dpsco {

// Exclusively owned pseudo-random stream. Streams for parallel work are
// derived from a master seed plus a stable index path (run, phase, step) so
// results do not depend on scheduling.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  static RandomStream Derive(std::uint64_t master,
                             std::initializer_list<std::uint64_t> path);

  // A child stream keyed by `index`; does not advance this stream.
  RandomStream Fork(std::uint64_t index) const;

  double Normal() { return normal_(engine_); }
  double Uniform() { return uniform_(engine_); }
  std::uint64_t NextU64() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }
  std::uint64_t seed_material() const { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::uint64_t seed_ = 0;
};

// SplitMix64 finalizer; used to mix seed paths.
std::uint64_t MixSeed(std::uint64_t x);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_PRIVACY_RANDOM_H_
