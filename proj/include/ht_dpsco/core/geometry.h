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

#ifndef HT_DPSCO_CORE_GEOMETRY_H_
#define HT_DPSCO_CORE_GEOMETRY_H_

#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ht_dpsco/core/vector.h"

namespace ht_dpsco {

inline constexpr double kDefaultProjectionTolerance = 1e-9;

struct Ball {
  Vector center;
  double radius = 0.0;
};

// Euclidean projection of `z` onto the origin-centred l2 ball of radius
// `radius`. Zero stays zero.
absl::StatusOr<Vector> ProjectBall(const Vector& z, double radius);

// In-place variant used on hot paths; returns true when `z` was rescaled.
// Preconditions (radius > 0, finite entries) are the caller's job.
bool ClipToNorm(std::span<double> z, double radius);

// Projection onto an arbitrary ball.
Vector ProjectOntoBall(const Vector& z, const Ball& ball);

// Closed convex set given as the intersection of one or more l2 balls.
// A single ball or a two-ball intersection covers every set the optimizers
// need; localized phases may stack a third ball on top.
class ConstraintSet {
 public:
  static absl::StatusOr<ConstraintSet> MakeBall(Vector center, double radius);
  // Fails with InvalidArgument when the balls do not intersect.
  static absl::StatusOr<ConstraintSet> MakeIntersection(Ball outer, Ball inner);

  // Returns this set intersected with `ball`. Balls that contain the current
  // set are dropped; an empty result is an error.
  absl::StatusOr<ConstraintSet> IntersectWith(const Ball& ball) const;

  std::size_t dim() const { return balls_.front().center.dim(); }
  bool is_intersection() const { return balls_.size() > 1; }
  const Ball& outer() const { return balls_.front(); }
  std::span<const Ball> balls() const { return balls_; }

  // 2r for a ball; the smallest ball diameter for an intersection (an upper
  // bound on the true lens diameter).
  double diameter() const;

  bool Contains(const Vector& w, double tol) const;

  // Some point of the set (the projection of the outer centre).
  const Vector& anchor() const { return anchor_; }

 private:
  explicit ConstraintSet(std::vector<Ball> balls) : balls_(std::move(balls)) {}

  std::vector<Ball> balls_;
  Vector anchor_;
};

struct ProjectionOptions {
  double tol = kDefaultProjectionTolerance;
  // Defaults to 10 * d * log(1/tol) rounds.
  std::optional<int> max_rounds;
};

// Euclidean projection onto `set`. Single balls are projected radially; for
// intersections Dykstra's alternating projections run until successive
// iterates move less than `tol`. On hitting the round cap an Internal error
// is returned whose payload carries the last iterate (see LastIterate).
absl::StatusOr<Vector> ProjectSet(const Vector& w, const ConstraintSet& set,
                                  const ProjectionOptions& options = {});

// Recovers the last Dykstra iterate attached to a convergence failure.
std::optional<Vector> LastIterate(const absl::Status& status);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_CORE_GEOMETRY_H_
