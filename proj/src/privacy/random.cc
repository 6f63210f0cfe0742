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

#include "ht_dpsco/privacy/random.h"

namespace ht_dpsco {

std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::Derive(std::uint64_t master,
                                  std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = MixSeed(master);
  for (std::uint64_t index : path) state = MixSeed(state ^ MixSeed(index + 1));
  return RandomStream(state);
}

RandomStream RandomStream::Fork(std::uint64_t index) const {
  return Derive(seed_, {index});
}

}  // namespace ht_dpsco
