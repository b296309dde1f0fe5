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

#include "abstain/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "abstain/spinblocks.hpp"

namespace abstain::asymptotics {

namespace {

void check_n(int n) {
  if (n < 1) throw DomainError("qubit count must be positive");
}

void check_r_positive(double r) {
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("r must lie in (0, 1]");
}

}  // namespace

double potential(double j, double r, double x) {
  if (!(std::fabs(x) <= 1.0)) throw DomainError("potential needs |x| <= 1");
  if (r == 0.0) throw DomainError("potential is singular at r = 0");
  check_r_positive(r);
  const double q = 1.0 - r * r;
  return j * q / (2.0 * r * std::sqrt(1.0 - q * x * x));
}

double potential_floor(double j, double r) {
  check_r_positive(r);
  return j * (1.0 - r * r) / (2.0 * r);
}

double harmonic_omega2(double j, double r) {
  check_r_positive(r);
  const double q = 1.0 - r * r;
  return j * q * q / (4.0 * r);
}

double discrete_potential(int n, HalfInt j, HalfInt m, double r) {
  const BlockHamiltonian h = coupling_matrix(n, j, NoiseModel(r));
  const int i = (m.twice + j.twice) / 2;
  if (m.twice < -j.twice || m.twice >= j.twice) throw DomainError("bond index outside block");
  const double jj = j.value();
  return 2.0 * jj * jj * h.gaps[static_cast<std::size_t>(i)];
}

double ultimate_bound(int n, double r) {
  check_n(n);
  check_r_positive(r);
  return (1.0 - r * r) / (n * r) * (1.0 + std::sqrt(2.0 * r / n));
}

double finite_S_approx(int n, double r, double S) {
  check_n(n);
  check_r_positive(r);
  if (!(S >= 0.0 && S <= 1.0)) throw DomainError("S must lie in [0, 1]");
  return (1.0 - 0.5 * r * r * (1.0 - S)) / (n * r * r);
}

double optimal_deterministic_bound(int n, double r) {
  check_n(n);
  check_r_positive(r);
  const double q = 1.0 - r * r;
  return q / (n * r * r) + 2.0 * std::sqrt(q) / (std::pow(n, 1.5) * r);
}

double deterministic_multicopy(int n, double r) {
  check_n(n);
  check_r_positive(r);
  return 1.0 / (n * r * r);
}

double pure_heisenberg(int n) {
  check_n(n);
  return std::numbers::pi * std::numbers::pi / (static_cast<double>(n) * n);
}

double pure_chain_minimum(int n) {
  check_n(n);
  const double s = std::sin(std::numbers::pi / (2.0 * (n + 2)));
  return 4.0 * s * s;
}

double gaussian_block_probability(int n, double r, double j) {
  check_n(n);
  check_r_positive(r);
  const double J = 0.5 * n;
  const double q = 1.0 - r * r;
  if (q == 0.0) throw DomainError("Gaussian block profile degenerates at r = 1");
  const double z = j / J - r;
  return std::exp(-J * z * z / q) / std::sqrt(std::numbers::pi * J * q);
}

double multicopy_diag_sum(int n, HalfInt j, double r) {
  check_n(n);
  if (j.twice < 0 || j.twice > n || (n - j.twice) % 2) throw DomainError("invalid block");
  const int gap = (n - j.twice) / 2;
  const double pre = gap == 0 ? 1.0 : std::pow(1.0 - r * r, gap);
  if (r == 0.0) return pre * (j.twice + 1);
  const int e = j.twice + 1;
  return pre * (std::pow(1.0 + r, e) - std::pow(1.0 - r, e)) / (2.0 * r);
}

ScalingExponents scaling_exponents(double r) {
  check_r_positive(r);
  ScalingExponents out;
  out.log_s_star_per_j = -2.0 * std::log1p(r);
  out.log_s_star_per_n = -std::log1p(r);
  out.log_p_top_per_n = -(std::numbers::ln2 - std::log1p(r));
  out.log_ultimate_success_per_n = -std::numbers::ln2;
  return out;
}

}  // namespace abstain::asymptotics
