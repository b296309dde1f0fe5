// Copyright 2026 The abstain-metrology Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ABSTAIN_SPIN_HPP
#define ABSTAIN_SPIN_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace abstain {

/// Domain violations: bad spin labels, out-of-range parameters.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iteration caps, overflow guards and internal consistency failures.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A half-integer stored as twice its value.
struct HalfInt {
  int twice = 0;

  static constexpr HalfInt from_twice(int t) { return HalfInt{t}; }
  static constexpr HalfInt from_int(int v) { return HalfInt{2 * v}; }
  constexpr double value() const { return 0.5 * twice; }
  constexpr bool is_integer() const { return twice % 2 == 0; }

  constexpr HalfInt operator+(HalfInt o) const { return HalfInt{twice + o.twice}; }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt{twice - o.twice}; }
  constexpr HalfInt operator-() const { return HalfInt{-twice}; }
  auto operator<=>(const HalfInt &) const = default;

  std::string str() const;
};

/// Uncorrelated single-qubit dephasing with Bloch-vector shrinking factor r.
class NoiseModel {
 public:
  explicit NoiseModel(double r);
  static NoiseModel from_flip_probability(double p_f);

  double r() const { return r_; }
  double flip_probability() const { return p_f_; }

 private:
  double r_;
  double p_f_;
};

/// Selects the serial reference path or the OpenMP path of a kernel.
enum class Exec { serial, parallel };

/// Caps OpenMP worker count; 0 leaves the runtime default.
void set_thread_count(int threads);
int thread_count();

}  // namespace abstain

#endif
