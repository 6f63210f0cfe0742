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

#ifndef HT_DPSCO_CORE_VECTOR_H_
#define HT_DPSCO_CORE_VECTOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ht_dpsco {

// Dense d-dimensional real vector used for iterates, samples and gradients.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0) : entries_(dim, fill) {}
  Vector(std::initializer_list<double> values) : entries_(values) {}
  explicit Vector(std::vector<double> values) : entries_(std::move(values)) {}

  std::size_t dim() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double operator[](std::size_t i) const { return entries_[i]; }
  double& operator[](std::size_t i) { return entries_[i]; }

  std::span<const double> values() const { return entries_; }
  std::span<double> values() { return entries_; }
  const std::vector<double>& raw() const { return entries_; }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }

  // True when every entry is finite (no NaN or Inf).
  bool IsFinite() const;

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double scale);
  // this += scale * other
  Vector& AddScaled(double scale, const Vector& other);

  friend bool operator==(const Vector& a, const Vector& b) = default;

 private:
  std::vector<double> entries_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double scale, Vector v);
Vector operator*(Vector v, double scale);

double Dot(std::span<const double> a, std::span<const double> b);
double Dot(const Vector& a, const Vector& b);
double SquaredNorm(std::span<const double> v);
double Norm(std::span<const double> v);
double Norm(const Vector& v);
double Distance(const Vector& a, const Vector& b);

// Comma separated "%.17g" rendering; round-trips through ParseVector.
std::string FormatVector(const Vector& v);
// Parses a comma separated list of reals. Returns an empty vector on error.
bool ParseVector(const std::string& text, Vector& out);

}  // namespace ht_dpsco

#endif  // HT_DPSCO_CORE_VECTOR_H_
