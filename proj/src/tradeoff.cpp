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

#include "abstain/tradeoff.hpp"

#include <algorithm>
#include <cmath>

#include "abstain/box_sphere.hpp"
#include "abstain/tridiag.hpp"

namespace abstain {

namespace {

// Weight on a bound fixed at zero: large enough to decouple the index in the dual.
constexpr double kPinnedMultiplier = 1e6;

void check_lists(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams) {
  if (blocks.size() != hams.size()) throw DomainError("block and Hamiltonian lists differ in length");
  for (std::size_t k = 0; k < blocks.size(); ++k)
    if (blocks[k].j != hams[k].j) throw DomainError("block and Hamiltonian lists are not aligned");
}

std::vector<std::size_t> usable(const std::vector<DephasingBlock> &blocks) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < blocks.size(); ++k)
    if (!blocks[k].degenerate) out.push_back(k);
  return out;
}

struct Ground {
  double value;
  double log_star;
};

std::vector<Ground> grounds(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams,
                            const std::vector<std::size_t> &idx) {
  std::vector<Ground> out(idx.size());
  const int count = static_cast<int>(idx.size());
#pragma omp parallel for schedule(dynamic)
  for (int q = 0; q < count; ++q) {
    auto [lam, vec] = unconstrained_minimum(hams[idx[q]]);
    out[q] = {lam, log_critical_block_success(blocks[idx[q]], vec)};
  }
  return out;
}

TradeoffPoint deterministic_point(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams,
                                  const std::vector<std::size_t> &idx, double S) {
  TradeoffPoint pt;
  pt.S = S;
  double num = 0.0, den = 0.0;
  pt.multiplier = -INFINITY;
  for (std::size_t k : idx) {
    BlockSolution sol = constrained_block_solve(blocks[k], hams[k], 1.0);
    num += blocks[k].p * sol.sigma2;
    den += blocks[k].p;
    pt.allocation[sol.j] = 1.0;
    pt.per_block_sigma2[sol.j] = sol.sigma2;
    pt.multiplier = std::max(pt.multiplier, sol.multiplier);
    pt.solutions.push_back(std::move(sol));
  }
  pt.sigma2 = num / den;
  pt.lower_bound = pt.sigma2;
  pt.duality_gap = 0.0;
  return pt;
}

}  // namespace

TradeoffPoint allocate(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams, double S,
                       Exec exec) {
  check_lists(blocks, hams);
  if (!(S > 0.0 && S <= 1.0)) throw DomainError("success probability S must lie in (0, 1]");
  const std::vector<std::size_t> idx = usable(blocks);
  if (idx.empty()) throw DomainError("no non-degenerate blocks");
  double mass = 0.0;
  for (std::size_t k : idx) mass += blocks[k].p;
  if (S >= mass * (1.0 - 1e-13)) return deterministic_point(blocks, hams, idx, S);

  // Flatten the direct sum; a zero coupling separates consecutive blocks.
  std::vector<std::size_t> offset(idx.size() + 1, 0);
  for (std::size_t q = 0; q < idx.size(); ++q) offset[q + 1] = offset[q] + blocks[idx[q]].dim();
  const std::size_t total = offset.back();
  std::vector<double> couplings(total - 1, 0.0), gaps(total - 1, 1.0), upper(total);
  const double log_S = std::log(S);
  for (std::size_t q = 0; q < idx.size(); ++q) {
    const DephasingBlock &b = blocks[idx[q]];
    const BlockHamiltonian &h = hams[idx[q]];
    for (std::size_t i = 0; i < b.dim(); ++i) {
      upper[offset[q] + i] = std::exp(0.5 * (b.log_p + b.log_diag[i] - log_S));
      if (i + 1 < b.dim()) {
        couplings[offset[q] + i] = h.couplings[i];
        gaps[offset[q] + i] = h.gaps[i];
      }
    }
  }
  box_sphere::Options opt;
  opt.exec = exec;
  const auto res = box_sphere::minimize({couplings, gaps, upper}, {}, opt);

  TradeoffPoint pt;
  pt.S = S;
  pt.multiplier = res.mu;
  const int count = static_cast<int>(idx.size());
  std::vector<BlockSolution> sols(idx.size());
  std::vector<double> quads(idx.size()), dual(idx.size());
  auto per_block = [&](int q) {
    const DephasingBlock &b = blocks[idx[q]];
    const BlockHamiltonian &h = hams[idx[q]];
    const std::size_t dim = b.dim();
    std::span<const double> xi(res.xi.data() + offset[q], dim);
    BlockSolution &sol = sols[q];
    sol.j = b.j;
    sol.multiplier = res.mu;
    sol.filter.assign(dim, 0.0);
    sol.coincidence.assign(dim, 0);
    double norm2 = 0.0;
    for (double v : xi) norm2 += v * v;
    quads[q] = tridiag::quadratic_form(h.gaps, xi);
    if (norm2 > 0.0) {
      sol.s = std::min(1.0, std::exp(std::log(norm2) + log_S - b.log_p));
      sol.sigma2 = quads[q] / norm2;
      const double scale = 1.0 / std::sqrt(norm2);
      sol.xi.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        sol.xi[i] = xi[i] * scale;
        const double u = upper[offset[q] + i];
        if (u > 0.0) sol.filter[i] = std::min(1.0, xi[i] / u);
        sol.coincidence[i] = res.active[offset[q] + i] && u > 0.0;
      }
    } else {
      auto [lam, vec] = unconstrained_minimum(h);
      sol.s = 0.0;
      sol.sigma2 = lam;
      sol.xi = std::move(vec);
    }
    std::vector<double> w(dim);
    for (std::size_t i = 0; i < dim; ++i)
      w[i] = upper[offset[q] + i] > 0.0 ? res.multipliers[offset[q] + i] : kPinnedMultiplier;
    dual[q] = tridiag::min_eigenvalue(h.couplings, w);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int q = 0; q < count; ++q) per_block(q);
  } else {
    for (int q = 0; q < count; ++q) per_block(q);
  }
  double sigma2 = 0.0, penalty = 0.0, floor = INFINITY;
  for (int q = 0; q < count; ++q) {
    sigma2 += quads[q];
    floor = std::min(floor, dual[q]);
  }
  for (std::size_t i = 0; i < total; ++i)
    if (upper[i] > 0.0) penalty += res.multipliers[i] * upper[i] * upper[i];
  pt.sigma2 = sigma2;
  pt.lower_bound = floor - penalty;
  pt.duality_gap = (sigma2 - pt.lower_bound) / std::max(std::fabs(sigma2), 1e-300);
  for (auto &sol : sols) {
    pt.allocation[sol.j] = sol.s;
    pt.per_block_sigma2[sol.j] = sol.sigma2;
  }
  pt.solutions = std::move(sols);
  return pt;
}

double critical_success(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams) {
  check_lists(blocks, hams);
  const auto idx = usable(blocks);
  const auto g = grounds(blocks, hams, idx);
  double s = 0.0;
  for (std::size_t q = 0; q < idx.size(); ++q) s += std::exp(blocks[idx[q]].log_p + g[q].log_star);
  return s;
}

double plateau_onset(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams) {
  check_lists(blocks, hams);
  const auto idx = usable(blocks);
  const auto g = grounds(blocks, hams, idx);
  double best = INFINITY;
  for (const auto &x : g) best = std::min(best, x.value);
  double s = 0.0;
  for (std::size_t q = 0; q < idx.size(); ++q)
    if (g[q].value <= best + 1e-12 * std::max(1.0, best)) s += std::exp(blocks[idx[q]].log_p + g[q].log_star);
  return s;
}

double log_ultimate_success(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams) {
  check_lists(blocks, hams);
  if (blocks.empty() || blocks.front().j.twice != blocks.front().n) throw DomainError("top block missing");
  auto [lam, vec] = unconstrained_minimum(hams.front());
  return blocks.front().log_p + log_critical_block_success(blocks.front(), vec);
}

std::pair<double, double> ultimate_postselect(const std::vector<DephasingBlock> &blocks,
                                              const std::vector<BlockHamiltonian> &hams) {
  check_lists(blocks, hams);
  if (blocks.empty() || blocks.front().j.twice != blocks.front().n) throw DomainError("top block missing");
  auto [lam, vec] = unconstrained_minimum(hams.front());
  return {lam, std::exp(blocks.front().log_p + log_critical_block_success(blocks.front(), vec))};
}

TradeoffCurve tradeoff_curve(const SymmetricProbe &probe, const NoiseModel &noise, std::span<const double> S_grid,
                             const std::string &descriptor, Exec exec) {
  for (double S : S_grid)
    if (!(S > 0.0 && S <= 1.0)) throw DomainError("grid values must lie in (0, 1]");
  const auto blocks = build_blocks(probe, noise, exec);
  const auto hams = coupling_matrices(probe.n(), noise, exec);
  TradeoffCurve curve;
  curve.probe = descriptor;
  curve.r = noise.r();
  curve.points.resize(S_grid.size());
  const int count = static_cast<int>(S_grid.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) curve.points[k] = allocate(blocks, hams, S_grid[k], Exec::serial);
  } else {
    for (int k = 0; k < count; ++k) curve.points[k] = allocate(blocks, hams, S_grid[k], Exec::serial);
  }
  return curve;
}

}  // namespace abstain
