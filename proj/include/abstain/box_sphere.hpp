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

#ifndef ABSTAIN_BOX_SPHERE_HPP
#define ABSTAIN_BOX_SPHERE_HPP

#include <span>
#include <vector>

#include "abstain/spin.hpp"

// Active-set solver for
//   min xi^T H xi   s.t.  |xi| = 1,  0 <= xi <= u,
// where H = 2 - A is a chain operator (possibly a direct sum: a zero coupling
// separates blocks). On the free set the optimum solves (H_FF - mu) xi_F = b with
// b collecting couplings into active neighbours, and mu is fixed by the secular
// equation |xi_F|^2 = 1 - sum_A u^2.

namespace abstain::box_sphere {

struct Problem {
  std::span<const double> couplings;  // N-1
  std::span<const double> gaps;       // N-1, 1 - couplings
  std::span<const double> upper;      // N
};

struct Options {
  double bound_tol = 1e-12;       // relative excess over u counted as a violation
  double multiplier_tol = 1e-11;  // release threshold for negative bound multipliers
  Exec exec = Exec::parallel;
};

struct Result {
  std::vector<double> xi;
  std::vector<char> active;         // xi_i held at u_i (includes u_i = 0)
  std::vector<double> multipliers;  // bound multipliers w_i >= 0 on active i with u_i > 0
  double mu = 0.0;                  // sphere multiplier
  int iterations = 0;
  bool hard_case = false;
};

/// warm_active, when non-empty, seeds the active set.
Result minimize(const Problem &problem, std::span<const char> warm_active = {}, const Options &options = {});

}  // namespace abstain::box_sphere

#endif
