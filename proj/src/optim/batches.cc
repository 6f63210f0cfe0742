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

#include "ht_dpsco/optim/batches.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_format.h"

namespace ht_dpsco {

BatchDrawer::BatchDrawer(std::size_t n, RandomStream& rng)
    : shared_(std::make_shared<Shared>()), cursor_(0), end_(n) {
  shared_->order.resize(n);
  std::iota(shared_->order.begin(), shared_->order.end(), std::size_t{0});
  std::shuffle(shared_->order.begin(), shared_->order.end(), rng.engine());
  shared_->taken.assign(n, false);
}

absl::StatusOr<std::vector<std::size_t>> BatchDrawer::Take(std::size_t m) {
  if (m > remaining()) {
    return absl::OutOfRangeError(absl::StrFormat(
        "dataset exhausted: batch of %d requested, %d samples left", m,
        remaining()));
  }
  std::vector<std::size_t> out(shared_->order.begin() + cursor_,
                               shared_->order.begin() + cursor_ + m);
  for (std::size_t index : out) {
    if (shared_->taken[index]) {
      return absl::InternalError(
          absl::StrFormat("sample %d was drawn twice", index));
    }
    shared_->taken[index] = true;
  }
  shared_->consumed += m;
  cursor_ += m;
  return out;
}

absl::StatusOr<std::vector<std::size_t>> BatchDrawer::TakeRest() {
  return Take(remaining());
}

absl::StatusOr<BatchDrawer> BatchDrawer::Subset(std::size_t m) {
  if (m > remaining()) {
    return absl::OutOfRangeError(absl::StrFormat(
        "dataset exhausted: subset of %d requested, %d samples left", m,
        remaining()));
  }
  BatchDrawer child(shared_, cursor_, cursor_ + m);
  cursor_ += m;
  return child;
}

std::size_t BatchDrawer::consumed() const { return shared_->consumed; }

std::vector<Sample> Gather(std::span<const Sample> data,
                           std::span<const std::size_t> indices) {
  std::vector<Sample> out;
  out.reserve(indices.size());
  for (std::size_t index : indices) out.push_back(data[index]);
  return out;
}

}  // namespace ht_dpsco
