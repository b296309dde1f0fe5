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

#include "abstain/box_sphere.hpp"
#include "abstain/tridiag.hpp"
#include "test_support.hpp"

using namespace abstain;

namespace {

std::vector<double> gaps_of(const std::vector<double> &a) {
  std::vector<double> g(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) g[i] = 1.0 - a[i];
  return g;
}

std::vector<double> random_chain(std::size_t dim, std::mt19937_64 &rng, double lo = 0.0) {
  std::uniform_real_distribution<double> u(lo, 1.0);
  std::vector<double> a(dim - 1);
  for (double &x : a) x = u(rng);
  return a;
}

}  // namespace

TEST_SUITE("tridiag") {
  TEST_CASE("free chain spectrum") {
    for (int n : {1, 2, 5, 40, 400, 2000}) {
      std::vector<double> a(n, 1.0);
      const double exact = 2.0 - 2.0 * std::cos(std::numbers::pi / (n + 2));
      CHECK(tridiag::min_eigenvalue(a) == doctest::Approx(exact).epsilon(1e-12));
      const auto ep = tridiag::ground_state(a, gaps_of(a));
      CHECK(ep.value == doctest::Approx(exact).epsilon(1e-12));
      for (std::size_t i = 0; i < ep.vector.size(); ++i) {
        const double v = std::sqrt(2.0 / (n + 2)) * std::sin(std::numbers::pi * (i + 1) / (n + 2));
        CHECK(std::fabs(ep.vector[i] - v) <= 1e-9);
      }
    }
  }

  TEST_CASE("two by two") {
    std::vector<double> a{0.8};
    const auto ep = tridiag::ground_state(a, gaps_of(a));
    CHECK(ep.value == doctest::Approx(1.2));
    CHECK(ep.vector[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(ep.vector[1] == doctest::Approx(std::sqrt(0.5)));
  }

  TEST_CASE("sturm count matches dense spectrum") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 20; ++rep) {
      const auto a = random_chain(9, rng);
      std::vector<double> w(9);
      for (double &x : w) x = std::uniform_real_distribution<double>(0, 2)(rng);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(support::chain_matrix(a, w));
      for (double x : {0.1, 0.7, 1.5, 2.2, 3.9}) {
        int below = 0;
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) below += es.eigenvalues()[k] < x;
        CHECK(tridiag::sturm_count(a, w, x) == below);
      }
      CHECK(tridiag::min_eigenvalue(a, w) == doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-12));
    }
  }

  TEST_CASE("ground state residual and Perron property") {
    std::mt19937_64 rng(2);
    for (std::size_t dim : {2u, 7u, 60u, 1001u}) {
      const auto a = random_chain(dim, rng, 0.05);
      const auto g = gaps_of(a);
      const auto ep = tridiag::ground_state(a, g);
      std::vector<double> hx(dim);
      tridiag::apply(a, ep.vector, hx);
      double res = 0.0, norm = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        res += std::pow(hx[i] - ep.value * ep.vector[i], 2);
        norm += ep.vector[i] * ep.vector[i];
        CHECK(ep.vector[i] >= -1e-12);
      }
      CHECK(std::sqrt(res) <= 1e-10);
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(tridiag::quadratic_form(g, ep.vector) == doctest::Approx(ep.value).epsilon(1e-10));
    }
  }

  TEST_CASE("quadratic form agrees with the dense matrix") {
    std::mt19937_64 rng(3);
    const auto a = random_chain(12, rng);
    Eigen::VectorXd x = Eigen::VectorXd::Random(12);
    std::vector<double> xs(x.data(), x.data() + 12);
    CHECK(tridiag::quadratic_form(gaps_of(a), xs) == doctest::Approx(x.dot(support::chain_matrix(a) * x)).epsilon(1e-13));
  }

  TEST_CASE("decoupled chains split into segments") {
    std::vector<double> a{0.5, 0.0, 0.9, 0.9, 0.0};
    const auto seg = tridiag::segments(a);
    REQUIRE(seg.size() == 3);
    CHECK(seg[0] == std::pair<std::size_t, std::size_t>{0, 2});
    CHECK(seg[1] == std::pair<std::size_t, std::size_t>{2, 5});
    CHECK(seg[2] == std::pair<std::size_t, std::size_t>{5, 6});
    const auto ep = tridiag::ground_state(a, gaps_of(a));
    CHECK(ep.value == doctest::Approx(support::min_eig(support::chain_matrix(a))).epsilon(1e-12));
    CHECK(ep.vector[0] == 0.0);
    CHECK(ep.vector[5] == 0.0);
  }

  TEST_CASE("shifted factor solves the shifted system") {
    std::mt19937_64 rng(4);
    const auto a = random_chain(15, rng);
    const double lam = tridiag::min_eigenvalue(a);
    tridiag::ShiftedFactor f;
    REQUIRE(f.factor(a, lam - 0.1));
    CHECK_FALSE(f.factor(a, lam + 0.1));
    REQUIRE(f.factor(a, lam - 0.1));
    std::vector<double> rhs(15, 1.0), x(15);
    f.solve(rhs, x);
    Eigen::MatrixXd m = support::chain_matrix(a) - (lam - 0.1) * Eigen::MatrixXd::Identity(15, 15);
    Eigen::VectorXd xv = Eigen::Map<Eigen::VectorXd>(x.data(), 15);
    CHECK((m * xv - Eigen::VectorXd::Ones(15)).norm() <= 1e-10);
  }
}

TEST_SUITE("tridiag") {
  TEST_CASE("box-sphere engine satisfies KKT conditions") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
      const std::size_t dim = 2 + rep % 30;
      const auto a = random_chain(dim, rng);
      const auto g = gaps_of(a);
      std::vector<double> d(dim);
      double sum = 0.0;
      for (double &x : d) sum += (x = u(rng) < 0.1 ? 0.0 : u(rng));
      if (sum == 0.0) continue;
      const double s = 0.05 + 0.9 * u(rng);
      std::vector<double> up(dim);
      for (std::size_t i = 0; i < dim; ++i) up[i] = std::sqrt(d[i] / sum / s);
      const auto res = box_sphere::minimize({a, g, up});
      double norm = 0.0;
      std::vector<double> hx(dim);
      tridiag::apply(a, res.xi, hx);
      for (std::size_t i = 0; i < dim; ++i) {
        norm += res.xi[i] * res.xi[i];
        CHECK(res.xi[i] >= -1e-12);
        CHECK(res.xi[i] <= up[i] + 1e-12);
        if (res.active[i]) {
          CHECK(res.xi[i] == doctest::Approx(up[i]).epsilon(1e-12));
          if (up[i] > 0.0) {
            CHECK(res.multipliers[i] >= -1e-10);
            CHECK(std::fabs(hx[i] + res.multipliers[i] * res.xi[i] - res.mu * res.xi[i]) <= 1e-8);
          }
        } else {
          CHECK(std::fabs(hx[i] - res.mu * res.xi[i]) <= 1e-8);
        }
      }
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("box-sphere engine handles localized ground states") {
    // Couplings spanning many decades localize segment ground states away from the
    // boundary, so the secular function stays below the sphere up to its pole.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 400; ++rep) {
      const std::size_t dim = 6 + rep % 40;
      std::vector<double> a(dim - 1);
      for (double &x : a) x = u(rng) < 0.3 ? 0.999 : std::pow(10.0, -12.0 * u(rng));
      const auto g = gaps_of(a);
      std::vector<double> up(dim);
      double cap = 0.0;
      for (double &x : up) cap += (x = u(rng) < 0.5 ? 0.05 + 0.3 * u(rng) : 2.0) * x;
      if (cap < 1.0) continue;
      const auto res = box_sphere::minimize({a, g, up});
      std::vector<double> hx(dim);
      tridiag::apply(a, res.xi, hx);
      double norm = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        norm += res.xi[i] * res.xi[i];
        CHECK(res.xi[i] >= -1e-12);
        CHECK(res.xi[i] <= up[i] * (1.0 + 1e-9));
        if (res.active[i]) {
          CHECK(res.multipliers[i] >= -1e-10);
          CHECK(std::fabs(hx[i] + res.multipliers[i] * res.xi[i] - res.mu * res.xi[i]) <= 1e-8);
        } else {
          CHECK(std::fabs(hx[i] - res.mu * res.xi[i]) <= 1e-8);
        }
      }
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("box-sphere engine matches the grid oracle") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 40; ++rep) {
      const std::size_t dim = 2 + rep % 4;
      const auto a = random_chain(dim, rng, 0.2);
      std::vector<double> d(dim);
      double sum = 0.0;
      for (double &x : d) sum += (x = 0.05 + u(rng));
      for (double &x : d) x /= sum;
      const double s = 0.2 + 0.75 * u(rng);
      std::vector<double> up(dim);
      for (std::size_t i = 0; i < dim; ++i) up[i] = std::sqrt(d[i] / s);
      const auto res = box_sphere::minimize({a, gaps_of(a), up});
      const double v = tridiag::quadratic_form(gaps_of(a), res.xi);
      const double grid = support::grid_oracle(d, a, s);
      CHECK(v <= grid + 1e-9);
      CHECK(std::fabs(v - grid) <= 1e-4);
    }
  }

  TEST_CASE("fully constrained and unconstrained limits") {
    std::vector<double> a{0.6, 0.7, 0.3};
    const auto g = gaps_of(a);
    std::vector<double> tight{0.5, 0.5, 0.5, 0.5};
    const auto r1 = box_sphere::minimize({a, g, tight});
    for (std::size_t i = 0; i < 4; ++i) CHECK(r1.xi[i] == doctest::Approx(0.5));
    std::vector<double> loose(4, 10.0);
    const auto r2 = box_sphere::minimize({a, g, loose});
    CHECK(tridiag::quadratic_form(g, r2.xi) == doctest::Approx(tridiag::min_eigenvalue(a)).epsilon(1e-12));
    for (char c : r2.active) CHECK(c == 0);
  }
}
