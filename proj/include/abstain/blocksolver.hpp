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

#ifndef ABSTAIN_BLOCKSOLVER_HPP
#define ABSTAIN_BLOCKSOLVER_HPP

#include <span>
#include <utility>
#include <vector>

#include "abstain/spinblocks.hpp"

namespace abstain {

struct BlockSolution {
  HalfInt j;
  double s = 1.0;        // block success probability
  double sigma2 = 0.0;   // <xi|H|xi>
  double multiplier = 0.0;  // sphere multiplier; equals d(s sigma2)/ds
  std::vector<double> xi;
  std::vector<double> filter;
  std::vector<char> coincidence;
};

struct SolveOptions {
  double bound_tol = 1e-12;
  double multiplier_tol = 1e-11;
};

double deterministic_block_variance(const DephasingBlock &block);

/// Smallest eigenpair of H^j with a nonnegative unit eigenvector.
std::pair<double, std::vector<double>> unconstrained_minimum(const BlockHamiltonian &ham);

/// s* = min d_m / xi_m^2 over xi_m > 0.
double critical_block_success(const DephasingBlock &block, std::span<const double> xi);
double log_critical_block_success(const DephasingBlock &block, std::span<const double> xi);

BlockSolution constrained_block_solve(const DephasingBlock &block, const BlockHamiltonian &ham, double s,
                                      const SolveOptions &options = {});

}  // namespace abstain

#endif
