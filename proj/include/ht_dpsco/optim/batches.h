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

#ifndef HT_DPSCO_OPTIM_BATCHES_H_
#define HT_DPSCO_OPTIM_BATCHES_H_

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ht_dpsco/losses/loss.h"
#include "ht_dpsco/privacy/random.h"

namespace ht_dpsco {

// Hands out disjoint batches as contiguous slices of one upfront random
// permutation. Subsets reserve a slice for a nested algorithm; every index is
// marked in a shared bitmap when taken, and taking an index twice is an
// Internal error.
class BatchDrawer {
 public:
  BatchDrawer(std::size_t n, RandomStream& rng);

  // The next `m` permuted indices.
  absl::StatusOr<std::vector<std::size_t>> Take(std::size_t m);

  // Everything left, e.g. to append leftovers to a final batch.
  absl::StatusOr<std::vector<std::size_t>> TakeRest();

  // Reserves the next `m` indices as a child drawer sharing the bitmap.
  absl::StatusOr<BatchDrawer> Subset(std::size_t m);

  std::size_t remaining() const { return end_ - cursor_; }
  std::size_t consumed() const;

 private:
  struct Shared {
    std::vector<std::size_t> order;
    std::vector<bool> taken;
    std::size_t consumed = 0;
  };
  BatchDrawer(std::shared_ptr<Shared> shared, std::size_t begin,
              std::size_t end)
      : shared_(std::move(shared)), cursor_(begin), end_(end) {}

  std::shared_ptr<Shared> shared_;
  std::size_t cursor_ = 0;
  std::size_t end_ = 0;
};

// Copies the indexed samples into a contiguous batch.
std::vector<Sample> Gather(std::span<const Sample> data,
                           std::span<const std::size_t> indices);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_OPTIM_BATCHES_H_
