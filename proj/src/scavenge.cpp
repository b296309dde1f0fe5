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

#include "abstain/scavenge.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace abstain::scavenge {

namespace {

const BlockSolution *find(const std::vector<BlockSolution> &sols, HalfInt j) {
  for (const auto &s : sols)
    if (s.j == j) return &s;
  return nullptr;
}

struct Sums {
  double kept = 0.0;        // sum p f^2 d
  double kept_coh = 0.0;    // sum p f f o
  double lost_coh = 0.0;    // sum p fbar fbar o
  double total_coh = 0.0;   // sum p o
};

Sums accumulate(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols) {
  Sums s;
  for (const auto &b : blocks) {
    const BlockSolution *sol = find(sols, b.j);
    if (sol && sol->filter.size() != b.dim()) throw DomainError("filter length does not match block");
    auto f = [&](std::size_t i) { return sol ? sol->filter[i] : 0.0; };
    auto fb = [&](std::size_t i) { return std::sqrt(std::max(0.0, 1.0 - f(i) * f(i))); };
    double kept = 0.0, kc = 0.0, lc = 0.0, tc = 0.0;
    for (std::size_t i = 0; i < b.dim(); ++i) kept += f(i) * f(i) * b.diag[i];
    for (std::size_t i = 0; i + 1 < b.dim(); ++i) {
      kc += f(i) * f(i + 1) * b.offdiag[i];
      lc += fb(i) * fb(i + 1) * b.offdiag[i];
      tc += b.offdiag[i];
    }
    s.kept += b.p * kept;
    s.kept_coh += b.p * kc;
    s.lost_coh += b.p * lc;
    s.total_coh += b.p * tc;
  }
  return s;
}

}  // namespace

std::vector<std::vector<double>> complement_filter(const std::vector<BlockSolution> &sols) {
  std::vector<std::vector<double>> out;
  out.reserve(sols.size());
  for (const auto &s : sols) {
    std::vector<double> fb(s.filter.size());
    for (std::size_t i = 0; i < fb.size(); ++i) {
      const double f = s.filter[i];
      if (!(f >= 0.0 && f <= 1.0 + 1e-12)) throw DomainError("filter entries must lie in [0, 1]");
      fb[i] = std::sqrt(std::max(0.0, 1.0 - f * f));
    }
    out.push_back(std::move(fb));
  }
  return out;
}

double filtered_success(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols) {
  return accumulate(blocks, sols).kept;
}

double filtered_variance(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols) {
  const Sums s = accumulate(blocks, sols);
  if (!(s.kept > 0.0)) throw DomainError("filters reject every outcome");
  return 2.0 - 2.0 * s.kept_coh / s.kept;
}

ScavengeResult scavenged_variance(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols) {
  const Sums s = accumulate(blocks, sols);
  ScavengeResult out;
  out.S_bar = std::max(0.0, 1.0 - s.kept);
  out.defined = out.S_bar > 1e-14;
  out.sigma2_bar = out.defined ? 2.0 - 2.0 * s.lost_coh / out.S_bar : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double all_outcomes_variance(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols) {
  const Sums s = accumulate(blocks, sols);
  return 2.0 - 2.0 * (s.kept_coh + s.lost_coh);
}

double deterministic_variance(const std::vector<DephasingBlock> &blocks) {
  double coh = 0.0;
  for (const auto &b : blocks)
    for (double o : b.offdiag) coh += b.p * o;
  return 2.0 - 2.0 * coh;
}

GentleBound gentle_bound_check(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols) {
  const Sums s = accumulate(blocks, sols);
  GentleBound g;
  g.rhs = std::numbers::sqrt2 * s.kept;
  const double S_bar = 1.0 - s.kept;
  if (S_bar <= 1e-14) {
    g.lhs = std::numeric_limits<double>::quiet_NaN();
    g.holds = false;
    return g;
  }
  const double sigma2_bar = 2.0 - 2.0 * s.lost_coh / S_bar;
  g.lhs = std::fabs(2.0 - 2.0 * s.total_coh - sigma2_bar);
  g.holds = g.lhs <= g.rhs + 1e-9;
  return g;
}

}  // namespace abstain::scavenge
