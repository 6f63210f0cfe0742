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

#include "ht_dpsco/optim/run_record.h"

#include <algorithm>

namespace ht_dpsco {

PrivacyBudget RunRecord::TotalBudget() const {
  PrivacyBudget total{0.0, 0.0};
  for (const PhaseTrace& phase : phases) {
    total.epsilon = std::max(total.epsilon, phase.epsilon);
    total.delta = std::max(total.delta, phase.delta);
  }
  return total;
}

nlohmann::ordered_json RunRecord::ToJson(bool include_outputs) const {
  nlohmann::ordered_json out;
  out["algorithm"] = algorithm;
  out["final_iterate"] = final_iterate.raw();
  nlohmann::ordered_json phase_list = nlohmann::ordered_json::array();
  for (const PhaseTrace& phase : phases) {
    nlohmann::ordered_json entry;
    entry["stage"] = phase.stage;
    entry["batch_size"] = phase.row.batch_size;
    entry["stepsize"] = phase.row.stepsize;
    entry["regularization"] = phase.row.regularization;
    entry["iterations"] = phase.row.iterations;
    entry["iterations_run"] = phase.iterations_run;
    entry["radius"] = phase.row.radius;
    entry["clip"] = phase.row.clip;
    entry["noise_scheduled"] = phase.row.noise;
    entry["noise_sigma"] = phase.noise_sigma;
    entry["clipped_fraction"] = phase.clipped_fraction;
    entry["radius_doublings"] = phase.radius_doublings;
    entry["set_fallback"] = phase.set_fallback;
    entry["noise_seed"] = phase.noise_seed;
    entry["epsilon"] = phase.epsilon;
    entry["delta"] = phase.delta;
    if (include_outputs) entry["output"] = phase.output.raw();
    phase_list.push_back(std::move(entry));
  }
  out["phases"] = std::move(phase_list);
  const PrivacyBudget total = TotalBudget();
  out["total_epsilon"] = total.epsilon;
  out["total_delta"] = total.delta;
  out["metadata"] = metadata;
  return out;
}

}  // namespace ht_dpsco
