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

#include "ht_dpsco/core/geometry.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "absl/strings/cord.h"
#include "absl/strings/str_format.h"

namespace ht_dpsco {
namespace {

constexpr char kLastIteratePayload[] = "ht_dpsco/dykstra_last_iterate";

absl::Status CheckFinite(const Vector& v, const char* what) {
  if (v.empty()) {
    return absl::InvalidArgumentError(absl::StrFormat("%s is empty", what));
  }
  if (!v.IsFinite()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s has non-finite entries", what));
  }
  return absl::OkStatus();
}

absl::Status CheckBall(const Ball& ball) {
  if (!(ball.radius > 0.0) || !std::isfinite(ball.radius)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("ball radius must be positive, got %g", ball.radius));
  }
  return CheckFinite(ball.center, "ball center");
}

bool BallContainsBall(const Ball& big, const Ball& small) {
  return Distance(big.center, small.center) + small.radius <= big.radius;
}

}  // namespace

absl::StatusOr<Vector> ProjectBall(const Vector& z, double radius) {
  if (!(radius > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("projection radius must be positive, got %g", radius));
  }
  if (absl::Status s = CheckFinite(z, "projection input"); !s.ok()) return s;
  Vector out = z;
  ClipToNorm(out.values(), radius);
  return out;
}

bool ClipToNorm(std::span<double> z, double radius) {
  const double norm = Norm(z);
  if (norm <= radius) return false;
  const double scale = radius / norm;
  for (double& x : z) x *= scale;
  return true;
}

Vector ProjectOntoBall(const Vector& z, const Ball& ball) {
  Vector offset = z - ball.center;
  const double norm = Norm(offset);
  if (norm <= ball.radius) return z;
  offset *= ball.radius / norm;
  offset += ball.center;
  return offset;
}

absl::StatusOr<ConstraintSet> ConstraintSet::MakeBall(Vector center,
                                                      double radius) {
  Ball ball{std::move(center), radius};
  if (absl::Status s = CheckBall(ball); !s.ok()) return s;
  ConstraintSet set({ball});
  set.anchor_ = set.balls_.front().center;
  return set;
}

absl::StatusOr<ConstraintSet> ConstraintSet::MakeIntersection(Ball outer,
                                                              Ball inner) {
  if (absl::Status s = CheckBall(outer); !s.ok()) return s;
  if (absl::Status s = CheckBall(inner); !s.ok()) return s;
  if (outer.center.dim() != inner.center.dim()) {
    return absl::InvalidArgumentError("ball dimensions differ");
  }
  const double gap = Distance(outer.center, inner.center);
  if (gap > outer.radius + inner.radius) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "empty intersection: center distance %g exceeds radii sum %g", gap,
        outer.radius + inner.radius));
  }
  ConstraintSet set({std::move(outer), std::move(inner)});
  // The point of the outer ball nearest the inner centre lies in both.
  set.anchor_ = ProjectOntoBall(set.balls_[1].center, set.balls_[0]);
  return set;
}

absl::StatusOr<ConstraintSet> ConstraintSet::IntersectWith(
    const Ball& ball) const {
  if (absl::Status s = CheckBall(ball); !s.ok()) return s;
  if (ball.center.dim() != dim()) {
    return absl::InvalidArgumentError("ball dimension differs from set");
  }
  // Redundant when the new ball already covers every existing ball.
  for (const Ball& existing : balls_) {
    if (BallContainsBall(ball, existing)) return *this;
  }
  std::vector<Ball> kept;
  kept.reserve(balls_.size() + 1);
  for (const Ball& existing : balls_) {
    if (!BallContainsBall(existing, ball)) kept.push_back(existing);
  }
  kept.push_back(ball);
  if (kept.size() == 1) {
    return MakeBall(kept.front().center, kept.front().radius);
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      const double gap = Distance(kept[i].center, kept[j].center);
      if (gap > kept[i].radius + kept[j].radius) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "empty intersection: center distance %g exceeds radii sum %g", gap,
            kept[i].radius + kept[j].radius));
      }
    }
  }
  ConstraintSet set(std::move(kept));
  set.anchor_ = set.balls_.back().center;
  if (set.balls_.size() == 2) {
    set.anchor_ = ProjectOntoBall(set.balls_[1].center, set.balls_[0]);
    return set;
  }
  // Pairwise overlap does not imply a common point for three or more balls.
  absl::StatusOr<Vector> anchor = ProjectSet(set.balls_.back().center, set);
  if (!anchor.ok() || !set.Contains(*anchor, 1e-6)) {
    return absl::InvalidArgumentError(
        "empty intersection: no common point of the balls was found");
  }
  set.anchor_ = *std::move(anchor);
  return set;
}

double ConstraintSet::diameter() const {
  double smallest = balls_.front().radius;
  for (const Ball& ball : balls_) smallest = std::min(smallest, ball.radius);
  return 2.0 * smallest;
}

bool ConstraintSet::Contains(const Vector& w, double tol) const {
  for (const Ball& ball : balls_) {
    if (Distance(w, ball.center) > ball.radius + tol) return false;
  }
  return true;
}

absl::StatusOr<Vector> ProjectSet(const Vector& w, const ConstraintSet& set,
                                  const ProjectionOptions& options) {
  if (!(options.tol > 0.0)) {
    return absl::InvalidArgumentError("projection tolerance must be positive");
  }
  if (absl::Status s = CheckFinite(w, "projection input"); !s.ok()) return s;
  if (w.dim() != set.dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dimension mismatch: point %d, set %d", w.dim(), set.dim()));
  }
  std::span<const Ball> balls = set.balls();
  if (balls.size() == 1) return ProjectOntoBall(w, balls.front());
  if (set.Contains(w, 0.0)) return w;

  // The projection onto a single violated ball is the answer whenever it
  // lands inside the other balls.
  for (const Ball& ball : balls) {
    if (Distance(w, ball.center) <= ball.radius) continue;
    Vector candidate = ProjectOntoBall(w, ball);
    if (set.Contains(candidate, options.tol)) return candidate;
  }

  const int max_rounds = options.max_rounds.value_or(static_cast<int>(
      std::ceil(10.0 * static_cast<double>(w.dim()) * std::log(1.0 / options.tol))));

  // Dykstra: x_{j} = P_j(x_{j-1} + p_j), p_j <- x_{j-1} + p_j - x_j.
  std::vector<Vector> corrections(balls.size(), Vector(w.dim()));
  Vector x = w;
  for (int round = 0; round < max_rounds; ++round) {
    const Vector round_start = x;
    for (std::size_t j = 0; j < balls.size(); ++j) {
      Vector shifted = x + corrections[j];
      Vector projected = ProjectOntoBall(shifted, balls[j]);
      corrections[j] = shifted - projected;
      x = std::move(projected);
    }
    if (Distance(x, round_start) < options.tol &&
        set.Contains(x, options.tol)) {
      return x;
    }
  }
  absl::Status failure = absl::InternalError(absl::StrFormat(
      "Dykstra projection did not converge within %d rounds", max_rounds));
  failure.SetPayload(kLastIteratePayload, absl::Cord(FormatVector(x)));
  return failure;
}

std::optional<Vector> LastIterate(const absl::Status& status) {
  auto payload = status.GetPayload(kLastIteratePayload);
  if (!payload.has_value()) return std::nullopt;
  Vector out;
  if (!ParseVector(std::string(*payload), out)) return std::nullopt;
  return out;
}

}  // namespace ht_dpsco
