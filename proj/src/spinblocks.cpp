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

#include "abstain/spinblocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace abstain {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kTableSize = 8192;
// exp() overflows past ~709.78; anything larger cannot be a probability-scale quantity.
constexpr double kLogGuard = 700.0;

const std::vector<double> &factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kTableSize);
    for (int k = 0; k < kTableSize; ++k) t[k] = std::lgamma(k + 1.0);
    return t;
  }();
  return table;
}

void check_spin(int n, HalfInt j) {
  if (n < 1) throw DomainError("qubit count must be positive");
  if (j.twice < 0 || j.twice > n || (n - j.twice) % 2 != 0)
    throw DomainError("spin " + j.str() + " is not a block of " + std::to_string(n) + " qubits");
}

void check_projection(HalfInt j, HalfInt m) {
  if (m.twice < -j.twice || m.twice > j.twice || (j.twice - m.twice) % 2 != 0)
    throw DomainError("projection " + m.str() + " invalid for spin " + j.str());
}

// Streaming log-sum-exp accumulator.
struct LogSum {
  double max = kNegInf;
  double scaled = 0.0;
  void add(double t) {
    if (t == kNegInf) return;
    if (t > max) {
      scaled = scaled * std::exp(max - t) + 1.0;
      max = t;
    } else {
      scaled += std::exp(t - max);
    }
  }
  double value() const { return max == kNegInf ? kNegInf : max + std::log(scaled); }
};

// log of r^{m-m'} sum_k Delta_k r^{2k}, without the (1-r^2)^{J-j} prefactor. Requires m >= m'.
double log_core(HalfInt j, HalfInt mp, HalfInt m, double r) {
  const int jm = (j.twice - m.twice) / 2;
  const int jpm = (j.twice + m.twice) / 2;
  const int jmp = (j.twice - mp.twice) / 2;
  const int jpmp = (j.twice + mp.twice) / 2;
  const int dm = (m.twice - mp.twice) / 2;
  if (dm > 0 && r == 0.0) return kNegInf;
  const double log_r = r > 0.0 ? std::log(r) : kNegInf;
  const double half = 0.5 * (log_factorial(jm) + log_factorial(jpm) + log_factorial(jmp) + log_factorial(jpmp));
  const int kmax = r == 0.0 ? 0 : std::min(jm, jpmp);
  LogSum acc;
  for (int k = 0; k <= kmax; ++k) {
    double t = half - log_factorial(jm - k) - log_factorial(jpmp - k) - log_factorial(dm + k) - log_factorial(k);
    if (k > 0) t += 2.0 * k * log_r;
    acc.add(t);
  }
  double out = acc.value();
  if (dm > 0) out += dm * log_r;
  return out;
}

double log_core_sym(HalfInt j, HalfInt a, HalfInt b, double r) {
  return a <= b ? log_core(j, a, b, r) : log_core(j, b, a, r);
}

double log_prefactor(int n, HalfInt j, double r) {
  const int gap = (n - j.twice) / 2;
  if (gap == 0) return 0.0;
  if (r == 1.0) return kNegInf;
  return gap * std::log1p(-r * r);
}

// log a_m for m = -j..j-1, clamped to <= 0.
std::vector<double> log_couplings(HalfInt j, double r, const std::vector<double> &log_core_diag) {
  const std::size_t dim = static_cast<std::size_t>(j.twice) + 1;
  std::vector<double> out(dim - 1, 0.0);
  if (r == 1.0) return out;  // noiseless chain: a_m = 1 exactly
  for (std::size_t i = 0; i + 1 < dim; ++i) {
    const HalfInt m = HalfInt::from_twice(2 * static_cast<int>(i) - j.twice);
    const double off = log_core(j, m, m + HalfInt::from_int(1), r);
    out[i] = std::min(0.0, off - 0.5 * (log_core_diag[i] + log_core_diag[i + 1]));
  }
  return out;
}

std::vector<double> core_diagonal(HalfInt j, double r) {
  const std::size_t dim = static_cast<std::size_t>(j.twice) + 1;
  std::vector<double> out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const HalfInt m = HalfInt::from_twice(2 * static_cast<int>(i) - j.twice);
    out[i] = log_core(j, m, m, r);
  }
  return out;
}

double log_coeff(double c) { return c > 0.0 ? std::log(c) : kNegInf; }

DephasingBlock make_block(const SymmetricProbe &probe, const NoiseModel &noise, HalfInt j) {
  const int n = probe.n();
  const double r = noise.r();
  DephasingBlock b;
  b.n = n;
  b.j = j;
  b.r = r;
  b.nu = multiplicity(n, j);
  const std::size_t dim = static_cast<std::size_t>(j.twice) + 1;
  const std::vector<double> core = core_diagonal(j, r);
  const double pre = log_prefactor(n, j, r);

  std::vector<double> log_w(dim);
  LogSum total;
  for (std::size_t i = 0; i < dim; ++i) {
    const HalfInt m = b.m_of(i);
    log_w[i] = 2.0 * log_coeff(probe.coeff(m)) + core[i] - log_binomial(n, (n - m.twice) / 2);
    total.add(log_w[i]);
  }
  const double log_sum = total.value();
  b.log_p = pre == kNegInf || log_sum == kNegInf ? kNegInf : pre + log_sum + log_multiplicity(n, j);
  b.p = std::exp(b.log_p);
  b.degenerate = !(b.p >= kDegenerateThreshold);

  b.diag.assign(dim, 0.0);
  b.log_diag.assign(dim, kNegInf);
  b.offdiag.assign(dim - 1, 0.0);
  if (log_sum == kNegInf) return b;
  for (std::size_t i = 0; i < dim; ++i) {
    b.log_diag[i] = log_w[i] - log_sum;
    b.diag[i] = std::exp(b.log_diag[i]);
  }
  const std::vector<double> la = log_couplings(j, r, core);
  for (std::size_t i = 0; i + 1 < dim; ++i)
    b.offdiag[i] = std::exp(la[i] + 0.5 * (b.log_diag[i] + b.log_diag[i + 1]));
  return b;
}

}  // namespace

double log_factorial(int k) {
  if (k < 0) throw DomainError("negative factorial argument");
  if (k < kTableSize) return factorial_table()[k];
  return std::lgamma(k + 1.0);
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return kNegInf;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

SymmetricProbe::SymmetricProbe(int n, std::vector<double> coeffs) : n_(n), coeffs_(std::move(coeffs)) {
  if (n < 1) throw DomainError("probe needs at least one qubit");
  if (coeffs_.size() != static_cast<std::size_t>(n) + 1)
    throw DomainError("probe of " + std::to_string(n) + " qubits needs " + std::to_string(n + 1) +
                      " coefficients, got " + std::to_string(coeffs_.size()));
  long double norm = 0.0L;
  for (double c : coeffs_) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("probe coefficients must be finite and nonnegative");
    norm += static_cast<long double>(c) * c;
  }
  if (std::fabs(static_cast<double>(norm) - 1.0) > 1e-12) throw DomainError("probe is not normalized");
}

SymmetricProbe SymmetricProbe::normalized(int n, std::vector<double> coeffs, double *norm) {
  long double s = 0.0L;
  for (double c : coeffs) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("probe coefficients must be finite and nonnegative");
    s += static_cast<long double>(c) * c;
  }
  if (s <= 0.0L) throw DomainError("probe coefficients are all zero");
  const long double nrm = std::sqrt(s);
  for (double &c : coeffs) c = static_cast<double>(c / nrm);
  if (norm) *norm = static_cast<double>(nrm);
  return SymmetricProbe(n, std::move(coeffs));
}

double SymmetricProbe::coeff(HalfInt m) const {
  check_projection(J(), m);
  return coeffs_[static_cast<std::size_t>((m.twice + n_) / 2)];
}

double DephasingBlock::entry(HalfInt m_prime, HalfInt m) const {
  check_projection(j, m_prime);
  check_projection(j, m);
  const std::size_t ip = static_cast<std::size_t>((m_prime.twice + j.twice) / 2);
  const std::size_t i = static_cast<std::size_t>((m.twice + j.twice) / 2);
  if (ip == i) return diag[i];
  if (log_diag[i] == kNegInf || log_diag[ip] == kNegInf) return 0.0;
  const double la = log_core_sym(j, m_prime, m, r) -
                    0.5 * (log_core(j, m_prime, m_prime, r) + log_core(j, m, m, r));
  return std::exp(std::min(0.0, la) + 0.5 * (log_diag[i] + log_diag[ip]));
}

double log_dephasing_coefficient(int n, HalfInt j, HalfInt m_prime, HalfInt m, const NoiseModel &noise) {
  check_spin(n, j);
  check_projection(j, m_prime);
  check_projection(j, m);
  const double pre = log_prefactor(n, j, noise.r());
  if (pre == kNegInf) return kNegInf;
  return pre + log_core_sym(j, m_prime, m, noise.r());
}

double dephasing_coefficient(int n, HalfInt j, HalfInt m_prime, HalfInt m, const NoiseModel &noise) {
  const double lv = log_dephasing_coefficient(n, j, m_prime, m, noise);
  if (lv > kLogGuard) throw NumericalError("dephasing coefficient overflows double range");
  return std::exp(lv);
}

BigInt multiplicity(int n, HalfInt j) {
  check_spin(n, j);
  const int k = (n - j.twice) / 2;
  BigInt binom = 1;
  for (int i = 1; i <= k; ++i) {
    binom *= n - k + i;
    binom /= i;
  }
  BigInt num = binom * (j.twice + 1);
  const int den = (n + j.twice) / 2 + 1;
  if (num % den != 0) throw NumericalError("multiplicity formula did not divide evenly");
  return num / den;
}

double log_multiplicity(int n, HalfInt j) {
  check_spin(n, j);
  return log_binomial(n, (n - j.twice) / 2) + std::log(j.twice + 1.0) - std::log((n + j.twice) / 2 + 1.0);
}

std::vector<HalfInt> block_spins(int n) {
  if (n < 1) throw DomainError("qubit count must be positive");
  std::vector<HalfInt> out;
  for (int t = n; t >= 0; t -= 2) out.push_back(HalfInt::from_twice(t));
  return out;
}

double block_probability(const SymmetricProbe &probe, const NoiseModel &noise, HalfInt j) {
  check_spin(probe.n(), j);
  return make_block(probe, noise, j).p;
}

std::vector<DephasingBlock> build_blocks(const SymmetricProbe &probe, const NoiseModel &noise, Exec exec) {
  const std::vector<HalfInt> spins = block_spins(probe.n());
  std::vector<DephasingBlock> out(spins.size());
  const int count = static_cast<int>(spins.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < count; ++b) out[b] = make_block(probe, noise, spins[b]);
  } else {
    for (int b = 0; b < count; ++b) out[b] = make_block(probe, noise, spins[b]);
  }
  return out;
}

BlockHamiltonian coupling_matrix(int n, HalfInt j, const NoiseModel &noise) {
  check_spin(n, j);
  BlockHamiltonian h;
  h.n = n;
  h.j = j;
  const std::vector<double> la = log_couplings(j, noise.r(), core_diagonal(j, noise.r()));
  h.couplings.resize(la.size());
  h.gaps.resize(la.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    h.couplings[i] = std::exp(la[i]);
    h.gaps[i] = -std::expm1(la[i]);
  }
  return h;
}

std::vector<BlockHamiltonian> coupling_matrices(int n, const NoiseModel &noise, Exec exec) {
  const std::vector<HalfInt> spins = block_spins(n);
  std::vector<BlockHamiltonian> out(spins.size());
  const int count = static_cast<int>(spins.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < count; ++b) out[b] = coupling_matrix(n, spins[b], noise);
  } else {
    for (int b = 0; b < count; ++b) out[b] = coupling_matrix(n, spins[b], noise);
  }
  return out;
}

}  // namespace abstain
