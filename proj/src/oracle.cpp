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

#include "abstain/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "abstain/tridiag.hpp"

namespace abstain::oracle {

namespace {

int qubits_of(Eigen::Index dim, int cap) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim || n < 1) throw DomainError("dimension is not a power of two");
  if (n > cap) throw DomainError("dense oracle limited to " + std::to_string(cap) + " qubits");
  return n;
}

int weight(std::uint64_t b) { return std::popcount(b); }

// States of a given Hamming weight, ascending.
std::vector<std::uint64_t> sector(int n, int w) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b)
    if (weight(b) == w) out.push_back(b);
  return out;
}

}  // namespace

Matrix dense_dephase(const Matrix &rho, const NoiseModel &noise, Exec exec) {
  if (rho.rows() != rho.cols()) throw DomainError("state matrix must be square");
  const int n = qubits_of(rho.rows(), kMaxDephaseQubits);
  std::vector<double> pw(n + 1, 1.0);
  for (int k = 1; k <= n; ++k) pw[k] = pw[k - 1] * noise.r();
  Matrix out(rho.rows(), rho.cols());
  const Eigen::Index dim = rho.rows();
  auto row = [&](Eigen::Index b) {
    for (Eigen::Index c = 0; c < dim; ++c)
      out(b, c) = rho(b, c) * pw[weight(static_cast<std::uint64_t>(b ^ c))];
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < dim; ++b) row(b);
  } else {
    for (Eigen::Index b = 0; b < dim; ++b) row(b);
  }
  return out;
}

DenseResult brute_uncertainty(const Vector &psi, const Matrix &omega, const NoiseModel &noise) {
  if (psi.size() != omega.rows() || omega.rows() != omega.cols()) throw DomainError("state and seed sizes differ");
  qubits_of(psi.size(), kMaxDephaseQubits);
  const Matrix rho = dense_dephase(psi * psi.transpose(), noise);
  double S = 0.0, F = 0.0;
  for (Eigen::Index b = 0; b < psi.size(); ++b)
    for (Eigen::Index c = 0; c < psi.size(); ++c) {
      const int wb = weight(static_cast<std::uint64_t>(b)), wc = weight(static_cast<std::uint64_t>(c));
      if (wc == wb) S += omega(b, c) * rho(c, b);
      if (wc == wb + 1) F += omega(b, c) * rho(c, b);
    }
  if (!(S > 0.0)) throw DomainError("seed never succeeds on this state");
  return {2.0 - 2.0 * F / S, S};
}

Vector symmetric_state(const SymmetricProbe &probe) {
  const int n = probe.n();
  if (n > kMaxDephaseQubits) throw DomainError("dense oracle limited to 12 qubits");
  Vector psi(Eigen::Index{1} << n);
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    const int w = weight(static_cast<std::uint64_t>(b));
    // m = J - w; coeffs index i = m + J = n - w.
    psi(b) = probe.coeffs()[static_cast<std::size_t>(n - w)] * std::exp(-0.5 * log_binomial(n, w));
  }
  return psi;
}

SpinBasis spin_basis(int n) {
  if (n < 1 || n > kMaxBasisQubits) throw DomainError("spin basis limited to 1..10 qubits");
  SpinBasis basis;
  basis.n = n;
  basis.spins = block_spins(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  auto lower = [&](const Vector &v) {
    Vector out = Vector::Zero(dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
      if (v(b) == 0.0) continue;
      for (int q = 0; q < n; ++q)
        if (!(b >> q & 1)) out(b | (Eigen::Index{1} << q)) += v(b);
    }
    return out;
  };
  for (HalfInt j : basis.spins) {
    const int w = (n - j.twice) / 2;
    const auto top = sector(n, w);
    Matrix hw;
    if (w == 0) {
      hw = Matrix::Ones(1, 1);
    } else {
      const auto below = sector(n, w - 1);
      Matrix raise = Matrix::Zero(static_cast<Eigen::Index>(below.size()), static_cast<Eigen::Index>(top.size()));
      for (std::size_t c = 0; c < top.size(); ++c)
        for (int q = 0; q < n; ++q)
          if (top[c] >> q & 1) {
            const auto target = top[c] & ~(std::uint64_t{1} << q);
            const auto row = std::lower_bound(below.begin(), below.end(), target) - below.begin();
            raise(row, static_cast<Eigen::Index>(c)) += 1.0;
          }
      Eigen::SelfAdjointEigenSolver<Matrix> es(raise.transpose() * raise);
      Eigen::Index count = 0;
      while (count < es.eigenvalues().size() && es.eigenvalues()(count) < 0.5) ++count;
      hw = es.eigenvectors().leftCols(count);
    }
    std::vector<Matrix> mults;
    for (Eigen::Index a = 0; a < hw.cols(); ++a) {
      Matrix cols(dim, j.twice + 1);
      Vector v = Vector::Zero(dim);
      for (std::size_t c = 0; c < top.size(); ++c) v(static_cast<Eigen::Index>(top[c])) = hw(static_cast<Eigen::Index>(c), a);
      // Column index i <-> m = -j + i; start from m = j.
      cols.col(j.twice) = v;
      for (int i = j.twice; i > 0; --i) {
        const double m = -0.5 * j.twice + i;
        const double jj = 0.5 * j.twice;
        v = lower(v) / std::sqrt((jj + m) * (jj - m + 1.0));
        cols.col(i - 1) = v;
      }
      mults.push_back(std::move(cols));
    }
    basis.multiplets.push_back(std::move(mults));
  }
  return basis;
}

std::pair<double, Matrix> block_state(const SpinBasis &basis, const Matrix &rho, HalfInt j) {
  const auto it = std::find(basis.spins.begin(), basis.spins.end(), j);
  if (it == basis.spins.end()) throw DomainError("spin not present in basis");
  const auto &mults = basis.multiplets[static_cast<std::size_t>(it - basis.spins.begin())];
  Matrix acc = Matrix::Zero(j.twice + 1, j.twice + 1);
  for (const auto &V : mults) acc += V.transpose() * rho * V;
  const double p = acc.trace();
  if (p > 0.0) acc /= p;
  return {p, acc};
}

Matrix seed_from_filters(const SpinBasis &basis, const std::vector<BlockSolution> &sols) {
  const Eigen::Index dim = Eigen::Index{1} << basis.n;
  Matrix omega = Matrix::Zero(dim, dim);
  for (const auto &sol : sols) {
    const auto it = std::find(basis.spins.begin(), basis.spins.end(), sol.j);
    if (it == basis.spins.end()) throw DomainError("solution spin not present in basis");
    const Eigen::Map<const Vector> f(sol.filter.data(), static_cast<Eigen::Index>(sol.filter.size()));
    for (const auto &V : basis.multiplets[static_cast<std::size_t>(it - basis.spins.begin())]) {
      if (V.cols() != f.size()) throw DomainError("filter length does not match block");
      const Vector v = V * f;
      omega += v * v.transpose();
    }
  }
  return omega;
}

bool seed_is_valid(const Matrix &omega, int n, double tol) {
  for (int w = 0; w <= n; ++w) {
    const auto idx = sector(n, w);
    const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
    Matrix sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = omega(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b]));
    Eigen::SelfAdjointEigenSolver<Matrix> es(sub, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol || es.eigenvalues().maxCoeff() > 1.0 + tol) return false;
  }
  return true;
}

std::pair<Vector, Matrix> symmetrize(const Vector &psi, const Matrix &omega) {
  if (psi.size() != omega.rows() || omega.rows() != omega.cols()) throw DomainError("state and seed sizes differ");
  const int n = qubits_of(psi.size(), kMaxSymmetrizeQubits);
  const Eigen::Index dim = psi.size();
  std::vector<double> amp(n + 1, 0.0);
  for (Eigen::Index b = 0; b < dim; ++b) amp[weight(static_cast<std::uint64_t>(b))] += psi(b) * psi(b);
  for (double &a : amp) a = std::sqrt(a);

  Vector sym(dim), phi(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const int w = weight(static_cast<std::uint64_t>(b));
    const double lc = log_binomial(n, w);
    sym(b) = amp[w] * std::exp(-0.5 * lc);
    phi(b) = amp[w] > 0.0 ? std::exp(0.5 * lc) * psi(b) / amp[w] : 0.0;
  }
  const Matrix x = omega.cwiseProduct(phi * phi.transpose());

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<Eigen::Index>> maps;
  do {
    std::vector<Eigen::Index> m(dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
      Eigen::Index t = 0;
      for (int q = 0; q < n; ++q)
        if (b >> q & 1) t |= Eigen::Index{1} << perm[q];
      m[b] = t;
    }
    maps.push_back(std::move(m));
  } while (std::next_permutation(perm.begin(), perm.end()));

  Matrix out = Matrix::Zero(dim, dim);
  const double inv = 1.0 / static_cast<double>(maps.size());
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < dim; ++b)
    for (Eigen::Index c = 0; c < dim; ++c) {
      double s = 0.0;
      for (const auto &m : maps) s += x(m[b], m[c]);
      out(b, c) = s * inv;
    }
  return {sym, out};
}

SdpBracket sdp_crosscheck(const std::vector<DephasingBlock> &blocks, const std::vector<BlockHamiltonian> &hams,
                          double S, const SdpOptions &options) {
  if (!(S > 0.0 && S <= 1.0)) throw DomainError("success probability S must lie in (0, 1]");
  if (blocks.size() != hams.size()) throw DomainError("block and Hamiltonian lists differ in length");
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < blocks.size(); ++k)
    if (!blocks[k].degenerate) idx.push_back(k);
  std::vector<std::size_t> off{0};
  for (std::size_t k : idx) off.push_back(off.back() + blocks[k].dim());
  const std::size_t N = off.back();
  std::vector<double> u(N), xi(N), y(N), hx(N);
  double mass = 0.0;
  for (std::size_t q = 0; q < idx.size(); ++q) {
    const auto &b = blocks[idx[q]];
    mass += b.p;
    for (std::size_t i = 0; i < b.dim(); ++i) {
      u[off[q] + i] = std::sqrt(b.p * b.diag[i] / S);
      xi[off[q] + i] = std::sqrt(b.p * b.diag[i]);
    }
  }

  auto apply_all = [&](const std::vector<double> &v, std::vector<double> &out) {
    for (std::size_t q = 0; q < idx.size(); ++q) {
      const std::size_t d = blocks[idx[q]].dim();
      tridiag::apply(hams[idx[q]].couplings, std::span<const double>(v.data() + off[q], d),
                     std::span<double>(out.data() + off[q], d));
    }
  };
  auto objective = [&](const std::vector<double> &v) {
    double s = 0.0;
    for (std::size_t q = 0; q < idx.size(); ++q)
      s += tridiag::quadratic_form(hams[idx[q]].gaps, std::span<const double>(v.data() + off[q], blocks[idx[q]].dim()));
    return s;
  };
  // Projection onto {|x| = 1, 0 <= x <= u} along rays clip(alpha y, 0, u).
  std::vector<std::size_t> order(N);
  auto project = [&](const std::vector<double> &in, std::vector<double> &out) {
    std::vector<double> t(N);
    double free2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double v = std::max(0.0, in[i]);
      t[i] = v > 0.0 ? u[i] / v : INFINITY;
      free2 += v > 0.0 ? v * v : 0.0;
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
    double capped = 0.0;
    double alpha = INFINITY;
    for (std::size_t k = 0; k <= N; ++k) {
      const double next = k < N ? t[order[k]] : INFINITY;
      // On [t_{k-1}, next): g(alpha) = capped + alpha^2 free2.
      if (free2 > 0.0) {
        const double a = std::sqrt(std::max(0.0, 1.0 - capped) / free2);
        if (a <= next) {
          alpha = a;
          break;
        }
      }
      if (k == N) break;
      const std::size_t i = order[k];
      if (t[i] == INFINITY) break;
      capped += u[i] * u[i];
      free2 -= in[i] * in[i];
    }
    if (!std::isfinite(alpha)) throw NumericalError("projection onto the feasible set failed");
    for (std::size_t i = 0; i < N; ++i) out[i] = std::clamp(alpha * std::max(0.0, in[i]), 0.0, u[i]);
  };

  SdpBracket br;
  if (S >= mass * (1.0 - 1e-13)) {
    br.upper = br.lower = objective(xi) / mass;
    br.converged = true;
    return br;
  }
  project(xi, xi);
  double f = objective(xi);
  double f_check = f;
  for (int it = 1; it <= options.max_iterations; ++it) {
    apply_all(xi, hx);
    for (std::size_t i = 0; i < N; ++i) y[i] = xi[i] - 0.25 * hx[i];
    project(y, xi);
    f = objective(xi);
    br.iterations = it;
    if (it % 200 == 0) {
      if (f_check - f <= options.tol * std::fabs(f)) {
        br.converged = true;
        break;
      }
      f_check = f;
    }
  }
  br.upper = f;

  // Dual certificate from the primal point.
  apply_all(xi, hx);
  double num = 0.0, den = 0.0;
  std::vector<char> active(N);
  for (std::size_t i = 0; i < N; ++i) {
    active[i] = u[i] == 0.0 || xi[i] >= u[i] * (1.0 - 1e-7);
    if (!active[i]) {
      num += xi[i] * hx[i];
      den += xi[i] * xi[i];
    }
  }
  double mu = -INFINITY;
  if (den > 0.0) {
    mu = num / den;
  } else {
    for (std::size_t i = 0; i < N; ++i)
      if (u[i] > 0.0) mu = std::max(mu, hx[i] / xi[i]);
  }
  double penalty = 0.0, floor = INFINITY;
  for (std::size_t q = 0; q < idx.size(); ++q) {
    const std::size_t d = blocks[idx[q]].dim();
    Matrix h = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t g = off[q] + i;
      double w = 0.0;
      if (u[g] == 0.0) {
        w = 1e6;
      } else if (active[g]) {
        w = std::max(0.0, mu - hx[g] / xi[g]);
      }
      penalty += w * u[g] * u[g];
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 2.0 + w;
      if (i + 1 < d) {
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = -hams[idx[q]].couplings[i];
        h(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = -hams[idx[q]].couplings[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    floor = std::min(floor, es.eigenvalues().minCoeff());
  }
  br.lower = floor - penalty;
  return br;
}

}  // namespace abstain::oracle
