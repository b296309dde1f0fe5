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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "abstain/asymptotics.hpp"
#include "abstain/blocksolver.hpp"
#include "abstain/probes.hpp"
#include "abstain/tridiag.hpp"
#include "test_support.hpp"

using namespace abstain;

namespace {

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

const DephasingBlock &find_block(const std::vector<DephasingBlock> &blocks, HalfInt j) {
  for (const auto &b : blocks)
    if (b.j == j) return b;
  throw std::out_of_range("block");
}

void check_solution(const DephasingBlock &b, const BlockHamiltonian &ham, const BlockSolution &sol) {
  double norm = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    norm += sol.xi[i] * sol.xi[i];
    CHECK(sol.xi[i] >= -1e-12);
    CHECK(sol.xi[i] <= std::sqrt(b.diag[i] / sol.s) + 1e-12);
    CHECK(sol.filter[i] >= 0.0);
    CHECK(sol.filter[i] <= 1.0 + 1e-12);
  }
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::fabs(tridiag::quadratic_form(ham.gaps, sol.xi) - sol.sigma2) <= 1e-10);
}

}  // namespace

TEST_SUITE("blocksolver") {
  TEST_CASE("deterministic variance examples") {
    const NoiseModel nz(0.8);
    const auto b1 = build_blocks(probes::multicopy(1), nz);
    CHECK(deterministic_block_variance(b1[0]) == doctest::Approx(1.2));

    const auto b2 = build_blocks(probes::multicopy(2), NoiseModel(1.0));
    CHECK(deterministic_block_variance(b2[0]) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));

    for (int n : {3, 9, 30}) {
      const auto bp = build_blocks(probes::multicopy(n), NoiseModel(1.0));
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += std::exp(0.5 * (log_binomial(n, k) + log_binomial(n, k + 1)) - n * std::log(2.0));
      CHECK(deterministic_block_variance(bp[0]) == doctest::Approx(2.0 - 2.0 * s).epsilon(1e-12));
    }

    const auto b200 = build_blocks(probes::multicopy(200), nz);
    CHECK(std::fabs(deterministic_block_variance(find_block(b200, h(160))) * 128.0 - 1.0) <= 0.05);
    for (const auto &b : b200)
      if (b.degenerate) CHECK_THROWS_AS(deterministic_block_variance(b), DomainError);
  }

  TEST_CASE("deterministic variance equals the quadratic form at sqrt(d)") {
    std::mt19937_64 rng(9);
    const NoiseModel nz(0.7);
    const auto blocks = build_blocks(support::random_probe(11, rng), nz);
    const auto hams = coupling_matrices(11, nz);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      std::vector<double> xi(blocks[k].dim());
      for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = std::sqrt(blocks[k].diag[i]);
      CHECK(deterministic_block_variance(blocks[k]) == doctest::Approx(tridiag::quadratic_form(hams[k].gaps, xi)).epsilon(1e-12));
    }
  }

  TEST_CASE("unconstrained minimum examples") {
    const auto [l1, v1] = unconstrained_minimum(coupling_matrix(1, h(1), NoiseModel(0.8)));
    CHECK(l1 == doctest::Approx(1.2));
    CHECK(v1[0] == doctest::Approx(std::sqrt(0.5)));
    const auto [l2, v2] = unconstrained_minimum(coupling_matrix(2, h(2), NoiseModel(1.0)));
    CHECK(l2 == doctest::Approx(0.585786437626905).epsilon(1e-12));
    (void)v2;
  }

  // The top-block formula (1-r^2)/(2jr) (1 + sqrt(r/j)) is asymptotic: at n = 200, r = 0.8 the exact value is
  // 3.93% above it (confirmed by an independent high-precision evaluation), so a 2% match needs n of about 400.
  TEST_CASE("top-block eigenvalue approaches its asymptotic formula") {
    auto dev = [](int n) {
      const double j = n / 2.0;
      const double formula = 0.36 / (2 * j * 0.8) * (1 + std::sqrt(0.8 / j));
      return unconstrained_minimum(coupling_matrix(n, h(n), NoiseModel(0.8))).first / formula - 1.0;
    };
    CHECK(dev(200) == doctest::Approx(0.03928).epsilon(1e-3));
    CHECK(dev(400) <= 0.02);
    CHECK(dev(1000) < dev(400));
  }

  TEST_CASE("unconstrained minimum matches dense eigenvalues") {
    for (double r : {0.2, 0.8, 0.99})
      for (int n : {5, 12, 25}) {
        const auto hams = coupling_matrices(n, NoiseModel(r));
        for (const auto &ham : hams) {
          const auto [lam, vec] = unconstrained_minimum(ham);
          CHECK(lam == doctest::Approx(support::min_eig(support::chain_matrix(ham.couplings))).epsilon(1e-12));
          for (double v : vec) CHECK(v >= -1e-12);
        }
      }
  }

  TEST_CASE("large blocks converge") {
    const auto [lam, vec] = unconstrained_minimum(coupling_matrix(2000, h(2000), NoiseModel(0.9)));
    CHECK(std::isfinite(lam));
    CHECK(vec.size() == 2001);
  }

  TEST_CASE("critical block success") {
    const auto b1 = build_blocks(probes::multicopy(1), NoiseModel(0.8));
    const auto [l, v] = unconstrained_minimum(coupling_matrix(1, h(1), NoiseModel(0.8)));
    CHECK(critical_block_success(b1[0], v) == doctest::Approx(1.0));
    std::mt19937_64 rng(12);
    const auto blocks = build_blocks(support::random_probe(8, rng), NoiseModel(0.6));
    for (const auto &b : blocks) {
      if (b.degenerate) continue;
      std::vector<double> xi(b.dim());
      for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = std::sqrt(b.diag[i]);
      CHECK(critical_block_success(b, xi) == doctest::Approx(1.0).epsilon(1e-12));
    }
    std::vector<double> zero(b1[0].dim(), 0.0);
    CHECK_THROWS_AS(critical_block_success(b1[0], zero), DomainError);
  }

  TEST_CASE("critical success decays as exp(-2j log(1+r))") {
    const NoiseModel nz(0.8);
    std::vector<double> js, ls;
    for (int n = 100; n <= 300; n += 20) {
      const auto blocks = build_blocks(probes::multicopy(n), nz);
      const auto [lam, vec] = unconstrained_minimum(coupling_matrix(n, h(n), nz));
      js.push_back(n / 2.0);
      ls.push_back(log_critical_block_success(blocks.front(), vec));
    }
    const double slope = support::slope(js, ls);
    CHECK(std::fabs(slope / (-2.0 * std::log(1.8)) - 1.0) <= 0.05);
  }

  TEST_CASE("constrained solve limits") {
    std::mt19937_64 rng(13);
    const NoiseModel nz(0.75);
    const int n = 9;
    const auto blocks = build_blocks(support::random_probe(n, rng), nz);
    const auto hams = coupling_matrices(n, nz);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const auto &b = blocks[k];
      if (b.degenerate) continue;
      const auto det = constrained_block_solve(b, hams[k], 1.0);
      CHECK(det.sigma2 == doctest::Approx(deterministic_block_variance(b)).epsilon(1e-12));
      for (std::size_t i = 0; i < b.dim(); ++i) CHECK(det.coincidence[i] == (b.diag[i] > 0.0));
      const auto [lam, vec] = unconstrained_minimum(hams[k]);
      const double star = critical_block_success(b, vec);
      for (double s : {star, 0.5 * star, 1e-3 * star}) {
        const auto sol = constrained_block_solve(b, hams[k], s);
        CHECK(sol.sigma2 == doctest::Approx(lam).epsilon(1e-12));
        for (char c : sol.coincidence) CHECK(c == 0);
        check_solution(b, hams[k], sol);
      }
      CHECK_THROWS_AS(constrained_block_solve(b, hams[k], 0.0), DomainError);
      CHECK_THROWS_AS(constrained_block_solve(b, hams[k], 1.5), DomainError);
    }
  }

  TEST_CASE("constrained solve is feasible, consistent and monotone") {
    std::mt19937_64 rng(14);
    for (double r : {0.5, 0.8, 0.95})
      for (int n : {4, 7, 16, 40}) {
        const NoiseModel nz(r);
        const auto blocks = build_blocks(n % 2 ? support::random_probe(n, rng) : probes::multicopy(n), nz);
        const auto hams = coupling_matrices(n, nz);
        for (std::size_t k = 0; k < blocks.size(); ++k) {
          const auto &b = blocks[k];
          if (b.degenerate) continue;
          const auto [lam, vec] = unconstrained_minimum(hams[k]);
          const double star = critical_block_success(b, vec);
          double prev = lam;
          for (int q = 0; q <= 20; ++q) {
            const double s = std::min(1.0, star + (1.0 - star) * q / 20.0);
            const auto sol = constrained_block_solve(b, hams[k], s);
            check_solution(b, hams[k], sol);
            CHECK(sol.sigma2 >= prev - 1e-10);
            prev = sol.sigma2;
            for (std::size_t i = 0; i < b.dim(); ++i)
              if (sol.coincidence[i]) CHECK(sol.xi[i] == doctest::Approx(std::sqrt(b.diag[i] / s)).epsilon(1e-10));
          }
        }
      }
  }

  TEST_CASE("constrained solve matches the grid oracle") {
    std::mt19937_64 rng(15);
    int checked = 0;
    for (int n = 1; n <= 5; ++n)
      for (int rep = 0; rep < 3; ++rep) {
        const NoiseModel nz(0.4 + 0.15 * rep);
        const auto blocks = build_blocks(support::random_probe(n, rng), nz);
        const auto hams = coupling_matrices(n, nz);
        for (std::size_t k = 0; k < blocks.size(); ++k) {
          const auto &b = blocks[k];
          if (b.degenerate || b.dim() < 2) continue;
          const auto [lam, vec] = unconstrained_minimum(hams[k]);
          const double star = critical_block_success(b, vec);
          for (double t : {0.25, 0.6, 0.9}) {
            const double s = star + (1.0 - star) * t;
            const auto sol = constrained_block_solve(b, hams[k], s);
            const double grid = support::grid_oracle(b.diag, hams[k].couplings, s);
            CHECK(sol.sigma2 <= grid + 1e-9);
            CHECK(std::fabs(sol.sigma2 - grid) <= 1e-4);
            ++checked;
          }
        }
      }
    CHECK(checked > 20);
  }

  TEST_CASE("multicopy n = 80 block j = 32 has a two-tailed coincidence set") {
    const NoiseModel nz(0.8);
    const auto blocks = build_blocks(probes::multicopy(80), nz);
    const auto &b = find_block(blocks, h(64));
    const auto sol = constrained_block_solve(b, coupling_matrix(80, h(64), nz), 0.75);
    double xc = 2.0;
    bool symmetric = true;
    for (std::size_t i = 0; i < b.dim(); ++i) {
      const double x = b.m_of(i).value() / 32.0;
      if (sol.coincidence[i]) xc = std::min(xc, std::fabs(x));
      symmetric = symmetric && sol.coincidence[i] == sol.coincidence[b.dim() - 1 - i];
    }
    CHECK(symmetric);
    CHECK(sol.coincidence.front());
    CHECK_FALSE(sol.coincidence[32]);
    CHECK(std::fabs(xc - 9.0 / 32.0) <= 1.0 / 32.0 + 1e-12);
  }

  TEST_CASE("mismatched inputs are rejected") {
    const NoiseModel nz(0.8);
    const auto blocks = build_blocks(probes::multicopy(4), nz);
    CHECK_THROWS_AS(constrained_block_solve(blocks[0], coupling_matrix(4, h(2), nz), 0.5), DomainError);
  }
}
