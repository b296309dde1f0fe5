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

#include "abstain/blocksolver.hpp"

#include <algorithm>
#include <cmath>

#include "abstain/box_sphere.hpp"
#include "abstain/tridiag.hpp"

namespace abstain {

namespace {

void require_usable(const DephasingBlock &block) {
  if (block.degenerate) throw DomainError("block j=" + block.j.str() + " is degenerate (p_j below 1e-14)");
}

void check_pair(const DephasingBlock &block, const BlockHamiltonian &ham) {
  if (block.j != ham.j || block.n != ham.n) throw DomainError("block and Hamiltonian belong to different sectors");
}

BlockSolution deterministic_solution(const DephasingBlock &block, const BlockHamiltonian &ham) {
  BlockSolution sol;
  sol.j = block.j;
  sol.s = 1.0;
  const std::size_t dim = block.dim();
  sol.xi.resize(dim);
  sol.filter.assign(dim, 1.0);
  sol.coincidence.assign(dim, 0);
  for (std::size_t i = 0; i < dim; ++i) {
    sol.xi[i] = std::sqrt(block.diag[i]);
    sol.coincidence[i] = block.diag[i] > 0.0;
  }
  sol.sigma2 = deterministic_block_variance(block);
  std::vector<double> hx(dim);
  tridiag::apply(ham.couplings, sol.xi, hx);
  sol.multiplier = -INFINITY;
  for (std::size_t i = 0; i < dim; ++i)
    if (sol.xi[i] > 0.0) sol.multiplier = std::max(sol.multiplier, hx[i] / sol.xi[i]);
  return sol;
}

}  // namespace

double deterministic_block_variance(const DephasingBlock &block) {
  require_usable(block);
  double s = 0.0;
  for (double o : block.offdiag) s += o;
  return 2.0 - 2.0 * s;
}

std::pair<double, std::vector<double>> unconstrained_minimum(const BlockHamiltonian &ham) {
  auto ep = tridiag::ground_state(ham.couplings, ham.gaps);
  return {ep.value, std::move(ep.vector)};
}

double log_critical_block_success(const DephasingBlock &block, std::span<const double> xi) {
  if (xi.size() != block.dim()) throw DomainError("profile length does not match block");
  double best = INFINITY;
  for (std::size_t i = 0; i < xi.size(); ++i)
    if (xi[i] > 0.0) best = std::min(best, block.log_diag[i] - 2.0 * std::log(xi[i]));
  if (best == INFINITY) throw DomainError("critical success undefined for a zero profile");
  return std::min(best, 0.0);
}

double critical_block_success(const DephasingBlock &block, std::span<const double> xi) {
  return std::exp(log_critical_block_success(block, xi));
}

BlockSolution constrained_block_solve(const DephasingBlock &block, const BlockHamiltonian &ham, double s,
                                      const SolveOptions &options) {
  require_usable(block);
  check_pair(block, ham);
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("block success probability must lie in (0, 1]");
  if (s >= 1.0) return deterministic_solution(block, ham);

  const std::size_t dim = block.dim();
  auto [lambda, ground] = unconstrained_minimum(ham);
  const double log_star = log_critical_block_success(block, ground);
  BlockSolution sol;
  sol.j = block.j;
  sol.s = s;
  sol.coincidence.assign(dim, 0);
  sol.filter.assign(dim, 0.0);
  if (std::log(s) <= log_star) {
    sol.xi = std::move(ground);
    sol.sigma2 = lambda;
    sol.multiplier = lambda;
    for (std::size_t i = 0; i < dim; ++i)
      if (sol.xi[i] > 0.0) sol.filter[i] = std::min(1.0, std::exp(std::log(sol.xi[i]) + 0.5 * (std::log(s) - block.log_diag[i])));
    return sol;
  }

  std::vector<double> upper(dim);
  for (std::size_t i = 0; i < dim; ++i) upper[i] = std::exp(0.5 * (block.log_diag[i] - std::log(s)));
  box_sphere::Options bo;
  bo.bound_tol = options.bound_tol;
  bo.multiplier_tol = options.multiplier_tol;
  bo.exec = Exec::serial;
  auto res = box_sphere::minimize({ham.couplings, ham.gaps, upper}, {}, bo);
  sol.xi = std::move(res.xi);
  sol.multiplier = res.mu;
  sol.sigma2 = tridiag::quadratic_form(ham.gaps, sol.xi);
  for (std::size_t i = 0; i < dim; ++i) {
    if (upper[i] > 0.0) sol.filter[i] = std::min(1.0, sol.xi[i] / upper[i]);
    sol.coincidence[i] = res.active[i] && upper[i] > 0.0;
  }
  return sol;
}

}  // namespace abstain
