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

#ifndef ABSTAIN_ORACLE_HPP
#define ABSTAIN_ORACLE_HPP

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "abstain/blocksolver.hpp"
#include "abstain/spinblocks.hpp"

// Ground truth in the 2^n computational basis. Bit value 1 lowers the spin
// projection: |b> has m = J - popcount(b).

namespace abstain::oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kMaxDephaseQubits = 12;
inline constexpr int kMaxBasisQubits = 10;
inline constexpr int kMaxSymmetrizeQubits = 6;

/// rho_{b,b'} r^{popcount(b xor b')}.
Matrix dense_dephase(const Matrix &rho, const NoiseModel &noise, Exec exec = Exec::parallel);

struct DenseResult {
  double sigma2 = 0.0;
  double S = 0.0;
};

/// (sigma^2, S) of the covariant measurement with seed omega on the dephased pure state psi.
DenseResult brute_uncertainty(const Vector &psi, const Matrix &omega, const NoiseModel &noise);

/// Dense vector of a symmetric probe.
Vector symmetric_state(const SymmetricProbe &probe);

/// Orthonormal total-spin basis. multiplets[k][alpha] holds 2j+1 columns ordered m = -j..j.
struct SpinBasis {
  int n = 0;
  std::vector<HalfInt> spins;                    // J downward
  std::vector<std::vector<Matrix>> multiplets;
};

SpinBasis spin_basis(int n);

/// (p_j, rho^j) read off a dense state.
std::pair<double, Matrix> block_state(const SpinBasis &basis, const Matrix &rho, HalfInt j);

/// Seed sum_j sum_alpha |v_alpha><v_alpha| with v_alpha = sum_m f_m |j, m, alpha>.
Matrix seed_from_filters(const SpinBasis &basis, const std::vector<BlockSolution> &sols);

/// Checks 0 <= P_w omega P_w <= 1 on every Hamming-weight sector w.
bool seed_is_valid(const Matrix &omega, int n, double tol = 1e-10);

/// Symmetric-subspace state and permutation-invariant seed with the same (sigma^2, S).
std::pair<Vector, Matrix> symmetrize(const Vector &psi, const Matrix &omega);

struct SdpBracket {
  double upper = 0.0;  // objective at a feasible point
  double lower = 0.0;  // weak-duality certificate
  int iterations = 0;
  bool converged = false;
};

struct SdpOptions {
  int max_iterations = 400000;
  double tol = 1e-13;
};

/// Projected-gradient solve of the block problem with bounds p_j d_m / S on the diagonal.
SdpBracket sdp_crosscheck(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams,
                          double S, const SdpOptions &options = {});

}  // namespace abstain::oracle

#endif
