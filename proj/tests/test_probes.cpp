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
#include <filesystem>
#include <fstream>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "abstain/asymptotics.hpp"
#include "abstain/blocksolver.hpp"
#include "abstain/probes.hpp"
#include "abstain/tradeoff.hpp"
#include "test_support.hpp"

using namespace abstain;

namespace {

void check_valid(const SymmetricProbe &p) {
  double norm = 0.0;
  for (double c : p.coeffs()) {
    CHECK(c >= 0.0);
    norm += c * c;
  }
  CHECK(std::fabs(norm - 1.0) <= 1e-12);
  CHECK(p.coeffs().size() == static_cast<std::size_t>(p.n()) + 1);
}

double deterministic(const SymmetricProbe &p, double r) {
  const NoiseModel nz(r);
  return allocate(build_blocks(p, nz), coupling_matrices(p.n(), nz), 1.0).sigma2;
}

std::filesystem::path temp_file(const std::string &name, const std::string &text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_SUITE("probes") {
  TEST_CASE("multicopy coefficients") {
    const auto p1 = probes::multicopy(1);
    CHECK(p1.coeffs()[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(p1.coeffs()[1] == doctest::Approx(std::sqrt(0.5)));
    const auto p4 = probes::multicopy(4);
    const double expect[] = {1, 4, 6, 4, 1};
    for (int i = 0; i < 5; ++i) CHECK(p4.coeffs()[i] * p4.coeffs()[i] == doctest::Approx(expect[i] / 16).epsilon(1e-14));
    using Wide = boost::multiprecision::cpp_bin_float_50;
    for (int n = 1; n <= 60; ++n) {
      const auto p = probes::multicopy(n);
      check_valid(p);
      Wide norm = 0;
      for (double c : p.coeffs()) norm += Wide(c) * Wide(c);
      CHECK(std::fabs(static_cast<double>(norm) - 1.0) <= 1e-14);
    }
  }

  TEST_CASE("optimal probe") {
    const auto p = probes::optimal_gaussian(30, 1.0);
    check_valid(p);
    double norm = 0.0;
    for (int i = 0; i <= 30; ++i) norm += std::pow(std::cos((i - 15) * std::numbers::pi / 32), 2);
    for (int i = 0; i <= 30; ++i) {
      CHECK(p.coeffs()[i] == doctest::Approx(std::cos((i - 15) * std::numbers::pi / 32) / std::sqrt(norm)).epsilon(1e-12));
      CHECK(p.coeffs()[i] == doctest::Approx(p.coeffs()[30 - i]).epsilon(1e-14));
    }
    const auto q = probes::optimal_gaussian(200, 0.8);
    check_valid(q);
    const double opt = deterministic(q, 0.8);
    CHECK(opt <= deterministic(probes::multicopy(200), 0.8));
    CHECK(std::fabs(opt / asymptotics::optimal_deterministic_bound(200, 0.8) - 1.0) <= 0.10);
  }

  TEST_CASE("ground-profile probe") {
    const auto pure = probes::ground_profile_probe(20, 1.0);
    const auto cosine = probes::optimal_gaussian(20, 1.0);
    for (int i = 0; i <= 20; ++i) CHECK(pure.coeffs()[i] == doctest::Approx(cosine.coeffs()[i]).epsilon(1e-9));

    const NoiseModel nz(0.8);
    const auto p = probes::ground_profile_probe(100, 0.8);
    check_valid(p);
    const auto blocks = build_blocks(p, nz);
    const auto [lam, vec] = unconstrained_minimum(coupling_matrix(100, HalfInt::from_twice(100), nz));
    CHECK(std::fabs(critical_block_success(blocks.front(), vec) - 1.0) <= 1e-8);

    std::vector<double> ns, ls;
    for (int n = 100; n <= 300; n += 25) {
      ns.push_back(n);
      ls.push_back(build_blocks(probes::ground_profile_probe(n, 0.8), nz).front().log_p);
    }
    CHECK(std::fabs(support::slope(ns, ls) / asymptotics::scaling_exponents(0.8).log_p_top_per_n - 1.0) <= 0.05);
  }

  TEST_CASE("json round trip") {
    const auto p = probes::optimal_gaussian(7, 0.9);
    const auto q = probes::from_json_text(probes::to_json_text(p));
    CHECK(q.n() == 7);
    for (int i = 0; i <= 7; ++i) CHECK(q.coeffs()[i] == p.coeffs()[i]);
  }

  TEST_CASE("json examples") {
    std::string warning = "x";
    const auto path = temp_file("abstain_probe_ok.json", R"({"n":2,"coeffs":[0.5,0.7071067811865476,0.5]})");
    const auto p = probes::from_file(path.string(), &warning);
    CHECK(p.n() == 2);
    CHECK(warning.empty());

    const auto q = probes::from_json_text(R"({"n":2,"coeffs":[1.0,1.4142135623730951,1.0]})", &warning);
    CHECK_FALSE(warning.empty());
    for (int i = 0; i < 3; ++i) CHECK(q.coeffs()[i] == doctest::Approx(p.coeffs()[i]).epsilon(1e-15));

    CHECK_THROWS_AS(probes::from_json_text(R"({"n":2,"coeffs":[0.5,0.5]})"), DomainError);
    CHECK_THROWS_AS(probes::from_json_text(R"({"n":1,"coeffs":[-0.6,0.8]})"), DomainError);
    CHECK_THROWS_AS(probes::from_json_text(R"({"n":2,"coeffs":[0.5,)"), ParseError);
    CHECK_THROWS_AS(probes::from_json_text(R"({"coeffs":[1]})"), ParseError);
    CHECK_THROWS_AS(probes::from_json_text(R"({"n":1,"coeffs":["a", 1]})"), ParseError);
    CHECK_THROWS_AS(probes::from_file("/nonexistent/probe.json"), ParseError);
    std::filesystem::remove(path);
  }
}
