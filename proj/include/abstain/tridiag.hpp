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

#ifndef ABSTAIN_TRIDIAG_HPP
#define ABSTAIN_TRIDIAG_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

// Kernels for chain operators H = 2 + W - A, where A has nonnegative entries
// a_i on the first off-diagonal and W is an optional nonnegative diagonal.

namespace abstain::tridiag {

struct Eigenpair {
  double value = 0.0;
  std::vector<double> vector;
};

/// Number of eigenvalues of 2 + W - A strictly below x.
int sturm_count(std::span<const double> couplings, std::span<const double> extra_diag, double x);

/// Smallest eigenvalue by Sturm bisection to near machine precision.
double min_eigenvalue(std::span<const double> couplings, std::span<const double> extra_diag = {});

/// <xi|H|xi> in a cancellation-free form; gaps[i] = 1 - a_i.
double quadratic_form(std::span<const double> gaps, std::span<const double> xi);

/// out = H xi.
void apply(std::span<const double> couplings, std::span<const double> xi, std::span<double> out);

/// Maximal runs of indices joined by strictly positive couplings, as [begin, end).
std::vector<std::pair<std::size_t, std::size_t>> segments(std::span<const double> couplings);

/// Ground state of an irreducible chain (all couplings > 0, or dimension 1).
/// Entries are nonnegative, norm 1, eigenvalue is the Rayleigh quotient of the returned vector.
Eigenpair irreducible_ground_state(std::span<const double> couplings, std::span<const double> gaps);

/// Ground state of a general chain. Disconnected components with tied minimal eigenvalue
/// share the weight equally.
Eigenpair ground_state(std::span<const double> couplings, std::span<const double> gaps);

/// LDL^T factorization of (2 - mu) - A, reused for repeated solves.
class ShiftedFactor {
 public:
  /// Returns false when the shifted matrix is not positive definite.
  bool factor(std::span<const double> couplings, double mu);
  void solve(std::span<const double> rhs, std::span<double> out) const;

 private:
  std::vector<double> d_;
  std::vector<double> l_;
};

}  // namespace abstain::tridiag

#endif
