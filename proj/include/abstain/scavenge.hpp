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

#ifndef ABSTAIN_SCAVENGE_HPP
#define ABSTAIN_SCAVENGE_HPP

#include <vector>

#include "abstain/blocksolver.hpp"
#include "abstain/spinblocks.hpp"

// The abstention branch: Kraus weights sqrt(1 - f^2) followed by the same
// canonical covariant measurement as the favorable branch.

namespace abstain::scavenge {

/// sqrt(1 - f^2) entrywise, one vector per solution.
std::vector<std::vector<double>> complement_filter(const std::vector<BlockSolution> &sols);

struct ScavengeResult {
  double S_bar = 0.0;       // weight of the abstention branch
  double sigma2_bar = 0.0;  // NaN when undefined
  bool defined = false;     // false when S_bar vanishes
};

/// Blocks without a matching solution are treated as fully rejected (f = 0).
ScavengeResult scavenged_variance(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols);

/// Uncertainty of the favorable branch recomputed from the filters.
double filtered_variance(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols);
double filtered_success(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols);

/// Uncertainty when both branches report their estimate: S sigma^2 + (1-S) sigma_bar^2.
double all_outcomes_variance(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols);

/// Deterministic uncertainty of the probe, sum_j p_j (2 - 2 sum_m o_m).
double deterministic_variance(const std::vector<DephasingBlock> &blocks);

struct GentleBound {
  double lhs = 0.0;  // |sigma2_det - sigma_bar^2|
  double rhs = 0.0;  // sqrt(2) S
  bool holds = true;
};

GentleBound gentle_bound_check(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols);

}  // namespace abstain::scavenge

#endif
