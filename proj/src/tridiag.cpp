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

#include "abstain/tridiag.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "abstain/spin.hpp"

namespace abstain::tridiag {

namespace {

std::size_t chain_dim(std::span<const double> couplings, std::span<const double> extra_diag) {
  const std::size_t n = couplings.size() + 1;
  if (!extra_diag.empty() && extra_diag.size() != n) throw DomainError("diagonal length does not match chain");
  return n;
}

double diag_at(std::span<const double> extra_diag, std::size_t i) {
  return extra_diag.empty() ? 2.0 : 2.0 + extra_diag[i];
}

}  // namespace

int sturm_count(std::span<const double> couplings, std::span<const double> extra_diag, double x) {
  const std::size_t n = chain_dim(couplings, extra_diag);
  int count = 0;
  double q = diag_at(extra_diag, 0) - x;
  for (std::size_t i = 0;; ++i) {
    if (q == 0.0) q = -DBL_MIN;
    if (q < 0.0) ++count;
    if (i + 1 == n) break;
    q = diag_at(extra_diag, i + 1) - x - couplings[i] * couplings[i] / q;
  }
  return count;
}

double min_eigenvalue(std::span<const double> couplings, std::span<const double> extra_diag) {
  const std::size_t n = chain_dim(couplings, extra_diag);
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? couplings[i - 1] : 0.0;
    const double right = i + 1 < n ? couplings[i] : 0.0;
    lo = std::min(lo, diag_at(extra_diag, i) - left - right);
    hi = std::max(hi, diag_at(extra_diag, i) + left + right);
  }
  lo -= 1e-12;
  hi += 1e-12;
  for (int it = 0; it < 4000; ++it) {
    if (hi - lo <= 2.0 * DBL_EPSILON * std::max(std::fabs(lo), std::fabs(hi)) + DBL_MIN) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(couplings, extra_diag, mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double quadratic_form(std::span<const double> gaps, std::span<const double> xi) {
  const std::size_t n = xi.size();
  if (n == 0) return 0.0;
  if (gaps.size() + 1 != n) throw DomainError("gap vector length does not match profile");
  double s = xi[0] * xi[0] + xi[n - 1] * xi[n - 1];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = xi[i + 1] - xi[i];
    s += d * d + 2.0 * gaps[i] * xi[i] * xi[i + 1];
  }
  return s;
}

void apply(std::span<const double> couplings, std::span<const double> xi, std::span<double> out) {
  const std::size_t n = xi.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = 2.0 * xi[i];
    if (i > 0) v -= couplings[i - 1] * xi[i - 1];
    if (i + 1 < n) v -= couplings[i] * xi[i + 1];
    out[i] = v;
  }
}

std::vector<std::pair<std::size_t, std::size_t>> segments(std::span<const double> couplings) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = couplings.size() + 1;
  std::size_t begin = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(couplings[i] > 0.0)) {
      out.emplace_back(begin, i + 1);
      begin = i + 1;
    }
  }
  out.emplace_back(begin, n);
  return out;
}

bool ShiftedFactor::factor(std::span<const double> couplings, double mu) {
  const std::size_t n = couplings.size() + 1;
  d_.resize(n);
  l_.resize(n - 1);
  double d = 2.0 - mu;
  if (!(d > 0.0)) return false;
  d_[0] = d;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = couplings[i];
    l_[i] = -a / d;
    d = (2.0 - mu) - a * (a / d);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    d_[i + 1] = d;
  }
  return true;
}

void ShiftedFactor::solve(std::span<const double> rhs, std::span<double> out) const {
  const std::size_t n = d_.size();
  out[0] = rhs[0];
  for (std::size_t i = 1; i < n; ++i) out[i] = rhs[i] - l_[i - 1] * out[i - 1];
  out[n - 1] /= d_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) out[i] = out[i] / d_[i] - l_[i] * out[i + 1];
}

Eigenpair irreducible_ground_state(std::span<const double> couplings, std::span<const double> gaps) {
  const std::size_t n = couplings.size() + 1;
  Eigenpair ep;
  if (n == 1) {
    ep.value = 2.0;
    ep.vector = {1.0};
    return ep;
  }
  const double lam = min_eigenvalue(couplings);
  double delta = 4.0 * DBL_EPSILON * static_cast<double>(n + 16) * (1.0 + std::fabs(lam));
  ShiftedFactor f;
  int tries = 0;
  while (!f.factor(couplings, lam - delta)) {
    delta *= 4.0;
    if (++tries > 60) throw NumericalError("inverse iteration shift could not be placed below the spectrum");
  }
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n))), w(n), hv(n);
  double residual = INFINITY;
  double value = 0.0;
  for (int it = 0; it < 200; ++it) {
    f.solve(v, w);
    double nrm = 0.0;
    for (double x : w) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("inverse iteration broke down");
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] /= nrm;
      change = std::max(change, std::fabs(w[i] - v[i]));
    }
    v.swap(w);
    if (change <= 1e-15 || it >= 3) {
      value = quadratic_form(gaps, v);
      apply(couplings, v, hv);
      residual = 0.0;
      for (std::size_t i = 0; i < n; ++i) residual += (hv[i] - value * v[i]) * (hv[i] - value * v[i]);
      residual = std::sqrt(residual);
      if (change <= 1e-15 || residual <= 1e-13) break;
    }
  }
  if (!(residual <= 1e-10)) throw NumericalError("ground state residual above 1e-10 after iteration cap");
  ep.value = value;
  ep.vector = std::move(v);
  return ep;
}

Eigenpair ground_state(std::span<const double> couplings, std::span<const double> gaps) {
  const auto segs = segments(couplings);
  const std::size_t n = couplings.size() + 1;
  if (segs.size() == 1) return irreducible_ground_state(couplings, gaps);
  std::vector<Eigenpair> parts;
  parts.reserve(segs.size());
  double best = INFINITY;
  for (auto [b, e] : segs) {
    parts.push_back(irreducible_ground_state(couplings.subspan(b, e - b - 1), gaps.subspan(b, e - b - 1)));
    best = std::min(best, parts.back().value);
  }
  const double tie = 1e-13 * std::max(1.0, best);
  std::size_t tied = 0;
  for (const auto &p : parts) tied += p.value <= best + tie;
  const double w = 1.0 / std::sqrt(static_cast<double>(tied));
  Eigenpair ep;
  ep.vector.assign(n, 0.0);
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (parts[s].value > best + tie) continue;
    for (std::size_t i = segs[s].first; i < segs[s].second; ++i) ep.vector[i] = w * parts[s].vector[i - segs[s].first];
  }
  ep.value = quadratic_form(gaps, ep.vector);
  return ep;
}

}  // namespace abstain::tridiag
