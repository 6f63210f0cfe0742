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

#include "ht_dpsco/core/vector.h"

#include <cassert>
#include <cmath>
#include <cstdlib>
#include <string_view>

#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "absl/strings/numbers.h"

namespace ht_dpsco {

bool Vector::IsFinite() const {
  for (double x : entries_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

Vector& Vector::operator+=(const Vector& other) {
  assert(other.dim() == dim());
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  assert(other.dim() == dim());
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other[i];
  return *this;
}

Vector& Vector::operator*=(double scale) {
  for (double& x : entries_) x *= scale;
  return *this;
}

Vector& Vector::AddScaled(double scale, const Vector& other) {
  assert(other.dim() == dim());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    entries_[i] += scale * other[i];
  }
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double scale, Vector v) { return v *= scale; }
Vector operator*(Vector v, double scale) { return v *= scale; }

double Dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double Dot(const Vector& a, const Vector& b) {
  return Dot(a.values(), b.values());
}

double SquaredNorm(std::span<const double> v) { return Dot(v, v); }

double Norm(std::span<const double> v) { return std::sqrt(SquaredNorm(v)); }

double Norm(const Vector& v) { return Norm(v.values()); }

double Distance(const Vector& a, const Vector& b) {
  assert(a.dim() == b.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

std::string FormatVector(const Vector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (i > 0) out += ',';
    absl::StrAppendFormat(&out, "%.17g", v[i]);
  }
  return out;
}

bool ParseVector(const std::string& text, Vector& out) {
  std::vector<double> values;
  for (absl::string_view piece : absl::StrSplit(text, ',', absl::SkipWhitespace())) {
    double x = 0.0;
    if (!absl::SimpleAtod(absl::StripAsciiWhitespace(piece), &x)) return false;
    values.push_back(x);
  }
  if (values.empty()) return false;
  out = Vector(std::move(values));
  return true;
}

}  // namespace ht_dpsco
