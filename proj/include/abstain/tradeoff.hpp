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

#ifndef ABSTAIN_TRADEOFF_HPP
#define ABSTAIN_TRADEOFF_HPP

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "abstain/blocksolver.hpp"
#include "abstain/spinblocks.hpp"

namespace abstain {

struct TradeoffPoint {
  double S = 1.0;
  double sigma2 = 0.0;
  std::map<HalfInt, double> allocation;        // s_j; 0 for blocks that are dropped entirely
  std::map<HalfInt, double> per_block_sigma2;  // for dropped blocks, the block's ground value
  std::vector<BlockSolution> solutions;        // non-degenerate blocks, in block order
  double multiplier = 0.0;                     // d(S sigma2)/dS
  double lower_bound = 0.0;                    // weak-duality certificate
  double duality_gap = 0.0;                    // (sigma2 - lower_bound) / sigma2
};

struct TradeoffCurve {
  std::string probe;
  double r = 1.0;
  std::vector<TradeoffPoint> points;
};

/// Optimal split of the success budget S over the blocks.
TradeoffPoint allocate(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams, double S,
                       Exec exec = Exec::parallel);

/// sum_j p_j s_j* with the unconstrained block ground states.
double critical_success(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams);

/// Largest S at which sigma^2(S) reaches its global floor: sum of p_j s_j* over the blocks
/// attaining the smallest ground value.
double plateau_onset(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams);

/// (ground value of the top block, p_J s_J*).
std::pair<double, double> ultimate_postselect(const std::vector<DephasingBlock> &blocks,
                                              const std::vector<BlockHamiltonian> &hams);
/// log(p_J s_J*), usable when the product underflows.
double log_ultimate_success(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams);

TradeoffCurve tradeoff_curve(const SymmetricProbe &probe, const NoiseModel &noise, std::span<const double> S_grid,
                             const std::string &descriptor = "custom", Exec exec = Exec::parallel);

}  // namespace abstain

#endif
