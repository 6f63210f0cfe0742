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

#ifndef HT_DPSCO_TESTS_ORACLES_H_
#define HT_DPSCO_TESTS_ORACLES_H_

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "ht_dpsco/core/geometry.h"
#include "ht_dpsco/core/vector.h"
#include "ht_dpsco/losses/loss.h"

namespace ht_dpsco {

// Readable gtest failure output for vectors.
inline void PrintTo(const Vector& v, std::ostream* os) {
  *os << "(" << FormatVector(v) << ")";
}

}  // namespace ht_dpsco

namespace ht_dpsco::testing {

// Nearest point of a planar two-ball intersection to `w` on a grid of spacing
// `step`. A grid of spacing 20 * step over the smaller ball's bounding box
// locates the neighbourhood, which is then rescanned at `step`.
inline Vector BruteForceLensProjection(const Vector& w, const Ball& a,
                                       const Ball& b, double step) {
  auto scan = [&](double x0, double y0, double width, double h,
                  Vector& best, double& best_distance) {
    const int cells = static_cast<int>(std::ceil(width / h));
    for (int i = 0; i <= cells; ++i) {
      for (int j = 0; j <= cells; ++j) {
        const Vector p{x0 + i * h, y0 + j * h};
        if (Distance(p, a.center) > a.radius ||
            Distance(p, b.center) > b.radius) {
          continue;
        }
        const double dist = Distance(p, w);
        if (dist < best_distance) {
          best_distance = dist;
          best = p;
        }
      }
    }
  };
  const Ball& small = a.radius <= b.radius ? a : b;
  const double coarse = 20.0 * step;
  Vector best;
  double best_distance = std::numeric_limits<double>::infinity();
  scan(small.center[0] - small.radius, small.center[1] - small.radius,
       2.0 * small.radius, coarse, best, best_distance);
  if (best.empty()) return best;
  const Vector centre = best;
  scan(centre[0] - 10.0 * coarse, centre[1] - 10.0 * coarse, 20.0 * coarse, step,
       best, best_distance);
  return best;
}

// Largest relative error between the analytic gradient and central finite
// differences over the coordinates of w.
inline double FiniteDifferenceError(const LossOracle& loss, const Vector& w,
                                    const Sample& sample, double h = 1e-6) {
  const Vector grad = loss.Gradient(w, sample);
  Vector numeric(w.dim());
  for (std::size_t i = 0; i < w.dim(); ++i) {
    Vector plus = w;
    Vector minus = w;
    plus[i] += h;
    minus[i] -= h;
    numeric[i] =
        (loss.Value(plus, sample) - loss.Value(minus, sample)) / (2.0 * h);
  }
  return Distance(grad, numeric) / std::max(1.0, Norm(numeric));
}

// Uniform point of the origin-centred ball of the given radius.
template <typename Rng>
Vector UniformInBall(std::size_t d, double radius, Rng& rng) {
  Vector v(d);
  for (double& x : v) x = rng.Normal();
  const double norm = Norm(v);
  const double r = radius * std::pow(rng.Uniform(), 1.0 / static_cast<double>(d));
  if (norm > 0.0) v *= r / norm;
  return v;
}

}  // namespace ht_dpsco::testing

#endif  // HT_DPSCO_TESTS_ORACLES_H_
