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

#ifndef ABSTAIN_SPINBLOCKS_HPP
#define ABSTAIN_SPINBLOCKS_HPP

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "abstain/spin.hpp"

namespace abstain {

using BigInt = boost::multiprecision::cpp_int;

/// Permutation-invariant n-qubit pure state sum_m c_m |J, m>.
/// coeffs[i] belongs to m = -J + i.
class SymmetricProbe {
 public:
  /// Validates: length n+1, entries >= 0, unit norm within 1e-12.
  SymmetricProbe(int n, std::vector<double> coeffs);

  /// Scales coeffs to unit norm first. Returns the input norm via *norm.
  static SymmetricProbe normalized(int n, std::vector<double> coeffs, double *norm = nullptr);

  int n() const { return n_; }
  HalfInt J() const { return HalfInt::from_twice(n_); }
  const std::vector<double> &coeffs() const { return coeffs_; }
  double coeff(HalfInt m) const;

 private:
  int n_;
  std::vector<double> coeffs_;
};

/// One spin-j sector of the dephased probe. Indices run m = -j..j.
struct DephasingBlock {
  int n = 0;
  HalfInt j;
  double r = 1.0;
  double p = 0.0;
  double log_p = 0.0;
  BigInt nu;
  std::vector<double> diag;      // d_m
  std::vector<double> offdiag;   // o_m = rho_{m, m+1}
  std::vector<double> log_diag;  // log d_m, finite even when d_m underflows
  bool degenerate = false;       // p < 1e-14

  std::size_t dim() const { return diag.size(); }
  HalfInt m_of(std::size_t i) const { return HalfInt::from_twice(2 * static_cast<int>(i) - j.twice); }
  /// Arbitrary entry rho^j_{m', m}.
  double entry(HalfInt m_prime, HalfInt m) const;
};

/// Tridiagonal H^j = 2 - (a_m off-diagonal). gaps[i] = 1 - couplings[i] without cancellation.
struct BlockHamiltonian {
  int n = 0;
  HalfInt j;
  std::vector<double> couplings;
  std::vector<double> gaps;

  std::size_t dim() const { return couplings.size() + 1; }
};

inline constexpr double kDegenerateThreshold = 1e-14;

double log_factorial(int k);
double log_binomial(int n, int k);

/// log of the dephasing coefficient D^j_{m',m}; -inf when it vanishes.
double log_dephasing_coefficient(int n, HalfInt j, HalfInt m_prime, HalfInt m, const NoiseModel &noise);
double dephasing_coefficient(int n, HalfInt j, HalfInt m_prime, HalfInt m, const NoiseModel &noise);

BigInt multiplicity(int n, HalfInt j);
double log_multiplicity(int n, HalfInt j);

/// Spins present for n qubits, from J downward.
std::vector<HalfInt> block_spins(int n);

double block_probability(const SymmetricProbe &probe, const NoiseModel &noise, HalfInt j);

/// Blocks ordered j = J, J-1, ...
std::vector<DephasingBlock> build_blocks(const SymmetricProbe &probe, const NoiseModel &noise,
                                         Exec exec = Exec::parallel);

BlockHamiltonian coupling_matrix(int n, HalfInt j, const NoiseModel &noise);

std::vector<BlockHamiltonian> coupling_matrices(int n, const NoiseModel &noise, Exec exec = Exec::parallel);

}  // namespace abstain

#endif
