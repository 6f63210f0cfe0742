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

#ifndef HT_DPSCO_OPTIM_RUN_RECORD_H_
#define HT_DPSCO_OPTIM_RUN_RECORD_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ht_dpsco/core/geometry.h"
#include "ht_dpsco/core/vector.h"
#include "ht_dpsco/optim/schedule.h"
#include "ht_dpsco/privacy/calibration.h"
#include "json.hpp"

namespace ht_dpsco {

// Receives every iterate together with the set it must lie in.
using IterateObserver =
    std::function<void(const ConstraintSet& set, const Vector& w)>;

// One executed phase of an algorithm.
struct PhaseTrace {
  // Position in the algorithm, e.g. "psa/2/lncgm/3".
  std::string stage;
  PhaseRow row;
  std::int64_t iterations_run = 0;
  double clipped_fraction = 0.0;
  // Standard deviation of the noise actually added.
  double noise_sigma = 0.0;
  int radius_doublings = 0;
  // The localized set was empty and the phase ran on the outer set.
  bool set_fallback = false;
  std::uint64_t noise_seed = 0;
  // Budget charged to the phase's disjoint batch.
  double epsilon = 0.0;
  double delta = 0.0;
  Vector output;
};

struct RunRecord {
  std::string algorithm;
  Vector final_iterate;
  std::vector<PhaseTrace> phases;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

  // Parallel composition over disjoint batches: the largest phase charge.
  PrivacyBudget TotalBudget() const;

  // Deterministic serialization (no timing information).
  nlohmann::ordered_json ToJson(bool include_outputs = true) const;
};

}  // namespace ht_dpsco

#endif  // HT_DPSCO_OPTIM_RUN_RECORD_H_
