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

#include "abstain/box_sphere.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <set>
#include <string>

#include "abstain/tridiag.hpp"

namespace abstain::box_sphere {

namespace {

struct Segment {
  std::size_t begin = 0, end = 0;
  std::vector<double> b;
  bool soft = false;          // b != 0
  double ground = INFINITY;   // lambda_min for hard segments
  std::vector<double> vec;    // ground vector, or solution x for soft ones
  double phi = 0.0, dphi = 0.0;
  bool ok = true;
};

class Solver {
 public:
  Solver(const Problem &p, const Options &o) : p_(p), o_(o), n_(p.upper.size()) {}

  Result run(std::span<const char> warm);

 private:
  void build_segments(const std::vector<char> &active);
  void eval_soft(double mu);
  void solve_free(double r2, Result &res);
  double secular(double r2, double hi, bool &pole, double &pole_at);
  void eval_one(Segment &s, double mu) const;

  const Problem &p_;
  const Options &o_;
  std::size_t n_;
  std::vector<Segment> segs_;
};

void Solver::build_segments(const std::vector<char> &active) {
  segs_.clear();
  std::size_t i = 0;
  while (i < n_) {
    if (active[i]) {
      ++i;
      continue;
    }
    Segment s;
    s.begin = i;
    while (i + 1 < n_ && !active[i + 1] && p_.couplings[i] > 0.0) ++i;
    s.end = ++i;
    const std::size_t len = s.end - s.begin;
    s.b.assign(len, 0.0);
    if (s.begin > 0 && active[s.begin - 1]) s.b[0] += p_.couplings[s.begin - 1] * p_.upper[s.begin - 1];
    if (s.end < n_ && active[s.end]) s.b[len - 1] += p_.couplings[s.end - 1] * p_.upper[s.end];
    for (double v : s.b) s.soft = s.soft || v > 0.0;
    segs_.push_back(std::move(s));
  }
  const int count = static_cast<int>(segs_.size());
  auto hard = [&](Segment &s) {
    if (s.soft) return;
    const std::size_t len = s.end - s.begin;
    auto ep = tridiag::irreducible_ground_state(p_.couplings.subspan(s.begin, len - 1), p_.gaps.subspan(s.begin, len - 1));
    s.ground = ep.value;
    s.vec = std::move(ep.vector);
  };
  if (o_.exec == Exec::parallel && count > 1) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) hard(segs_[k]);
  } else {
    for (int k = 0; k < count; ++k) hard(segs_[k]);
  }
}

void Solver::eval_one(Segment &s, double mu) const {
  const std::size_t len = s.end - s.begin;
  tridiag::ShiftedFactor f;
  s.ok = f.factor(p_.couplings.subspan(s.begin, len - 1), mu);
  if (!s.ok) return;
  s.vec.resize(len);
  std::vector<double> y(len);
  f.solve(s.b, s.vec);
  f.solve(s.vec, y);
  double phi = 0.0, dphi = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    phi += s.vec[k] * s.vec[k];
    dphi += s.vec[k] * y[k];
  }
  s.phi = phi;
  s.dphi = 2.0 * dphi;
}

void Solver::eval_soft(double mu) {
  const int count = static_cast<int>(segs_.size());
  if (o_.exec == Exec::parallel && count > 1) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k)
      if (segs_[k].soft) eval_one(segs_[k], mu);
  } else {
    for (int k = 0; k < count; ++k)
      if (segs_[k].soft) eval_one(segs_[k], mu);
  }
}

// Root of |x(mu)|^2 = r2 on (-inf, hi): safeguarded Newton on 1/sqrt(phi).
// Sets pole when the bracket collapses onto a soft eigenvalue with |x|^2 still below r2;
// mu is then the lower end and pole_at the upper end of the bracket.
double Solver::secular(double r2, double hi, bool &pole, double &pole_at) {
  pole = false;
  double lo_phi = -1.0;
  double bnorm2 = 0.0;
  for (const auto &s : segs_)
    if (s.soft)
      for (double v : s.b) bnorm2 += v * v;
  double lo = -std::sqrt(bnorm2 / r2) * (1.0 + 1e-9) - DBL_MIN;
  const double target = 1.0 / std::sqrt(r2);
  double mu = lo;
  double best_mu = NAN;
  double best_err = INFINITY;
  for (int it = 0; it < 600; ++it) {
    eval_soft(mu);
    bool ok = true;
    double phi = 0.0, dphi = 0.0;
    for (const auto &s : segs_) {
      if (!s.soft) continue;
      ok = ok && s.ok;
      phi += s.phi;
      dphi += s.dphi;
    }
    double next;
    if (!ok) {
      hi = mu;
      next = 0.5 * (lo + hi);
    } else {
      const double err = std::fabs(phi - r2) / r2;
      if (err < best_err) {
        best_err = err;
        best_mu = mu;
      }
      if (err <= 1e-14) return mu;
      if (phi < r2) {
        lo = mu;
        lo_phi = phi;
      } else {
        hi = mu;
      }
      const double psi = 1.0 / std::sqrt(phi) - target;
      const double dpsi = -0.5 * dphi / (phi * std::sqrt(phi));
      next = mu - psi / dpsi;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    }
    if (hi - lo <= 2.0 * DBL_EPSILON * std::max(std::fabs(lo), std::fabs(hi)) + DBL_MIN) break;
    mu = next;
  }
  if (std::isnan(best_mu)) throw NumericalError("secular equation has no positive-definite evaluation point");
  if (best_err > 1e-8 && lo_phi >= 0.0 && lo_phi < r2) {
    pole = true;
    pole_at = hi;
    return lo;
  }
  if (best_err > 1e-8) throw NumericalError("secular equation did not converge");
  return best_mu;
}

void Solver::solve_free(double r2, Result &res) {
  bool any_soft = false;
  double lambda_h = INFINITY;
  for (const auto &s : segs_) {
    any_soft = any_soft || s.soft;
    if (!s.soft) lambda_h = std::min(lambda_h, s.ground);
  }
  double mu;
  double remainder = 0.0;
  bool pole = false;
  double pole_at = INFINITY;
  res.hard_case = false;
  if (!any_soft) {
    mu = lambda_h;
    remainder = r2;
    res.hard_case = true;
  } else {
    bool use_hard = false;
    if (std::isfinite(lambda_h)) {
      eval_soft(lambda_h);
      double phi = 0.0;
      bool ok = true;
      for (const auto &s : segs_)
        if (s.soft) {
          ok = ok && s.ok;
          phi += s.phi;
        }
      if (ok && phi <= r2) {
        use_hard = true;
        remainder = r2 - phi;
      }
    }
    if (use_hard) {
      mu = lambda_h;
      res.hard_case = true;
    } else {
      mu = secular(r2, std::min(lambda_h, 2.0), pole, pole_at);
      eval_soft(mu);
      double phi = 0.0;
      for (const auto &s : segs_)
        if (s.soft) phi += s.phi;
      if (pole) {
        res.hard_case = true;
        remainder = r2 - phi;
      } else {
        const double scale = std::sqrt(r2 / phi);
        for (auto &s : segs_)
          if (s.soft)
            for (double &v : s.vec) v *= scale;
      }
    }
  }
  res.mu = mu;
  for (std::size_t i = 0; i < n_; ++i)
    if (!res.active[i]) res.xi[i] = 0.0;
  for (const auto &s : segs_)
    if (s.soft)
      for (std::size_t k = 0; k < s.vec.size(); ++k) res.xi[s.begin + k] = s.vec[k];
  if (!res.hard_case || remainder <= 0.0) return;
  // Spread the remainder over the ground vectors of the segments tied at mu. A soft
  // segment is tied when it is singular at the pole; its ground vector comes from
  // inverse iteration at mu, which lies within rounding of that pole.
  const double tie = 1e-13 * std::max(1.0, std::fabs(mu));
  std::vector<double> weight(segs_.size(), 0.0);
  std::vector<std::vector<double>> ground(segs_.size());
  double total = 0.0;
  for (std::size_t k = 0; k < segs_.size(); ++k) {
    const auto &s = segs_[k];
    const std::size_t len = s.end - s.begin;
    if (s.soft) {
      if (!pole) continue;
      const auto cs = p_.couplings.subspan(s.begin, len - 1);
      Segment probe = s;
      eval_one(probe, pole_at);
      if (probe.ok && probe.phi - s.phi < 0.1 * remainder) continue;
      tridiag::ShiftedFactor f;
      if (!f.factor(cs, mu)) throw NumericalError("soft segment is singular below the pole");
      std::vector<double> v(len, 1.0), w(len);
      for (int it = 0; it < 3; ++it) {
        f.solve(v, w);
        double nrm = 0.0;
        for (double x : w) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (std::size_t q = 0; q < len; ++q) v[q] = std::fabs(w[q]) / nrm;
      }
      ground[k] = std::move(v);
    } else {
      if (s.ground > std::min(mu, pole_at) + tie) continue;
      ground[k] = s.vec;
    }
    double w = INFINITY;
    for (std::size_t q = 0; q < len; ++q)
      if (ground[k][q] > 0.0) {
        const double u = p_.upper[s.begin + q];
        w = std::min(w, u * u / (ground[k][q] * ground[k][q]));
      }
    weight[k] = w;
    total += w;
  }
  if (!(total > 0.0)) throw NumericalError("hard case without a tied segment");
  const double n_inf = static_cast<double>(std::count_if(weight.begin(), weight.end(), [](double w) { return std::isinf(w); }));
  for (std::size_t k = 0; k < segs_.size(); ++k) {
    if (weight[k] <= 0.0) continue;
    const auto &s = segs_[k];
    const double share = std::isinf(total) ? (std::isinf(weight[k]) ? remainder / n_inf : 0.0) : remainder * weight[k] / total;
    // Solve |x + c v|^2 = |x|^2 + share for c >= 0; x is zero on hard segments.
    double xv = 0.0;
    for (std::size_t q = 0; q < ground[k].size(); ++q) xv += res.xi[s.begin + q] * ground[k][q];
    const double c = -xv + std::sqrt(xv * xv + share);
    for (std::size_t q = 0; q < ground[k].size(); ++q) res.xi[s.begin + q] += c * ground[k][q];
  }
}

Result Solver::run(std::span<const char> warm) {
  if (p_.couplings.size() + 1 != n_ || p_.gaps.size() != p_.couplings.size())
    throw DomainError("box-sphere problem has inconsistent lengths");
  long double cap = 0.0L;
  for (double u : p_.upper) {
    if (!(u >= 0.0)) throw DomainError("upper bounds must be nonnegative");
    cap += static_cast<long double>(u) * u;
  }
  if (cap < 1.0L - 1e-13L) throw DomainError("box-sphere problem is infeasible: sum of squared bounds below 1");

  Result res;
  res.xi.assign(n_, 0.0);
  res.active.assign(n_, 0);
  res.multipliers.assign(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) res.active[i] = p_.upper[i] <= 0.0;
  if (!warm.empty()) {
    if (warm.size() != n_) throw DomainError("warm-start mask has wrong length");
    long double used = 0.0L;
    for (std::size_t i = 0; i < n_; ++i)
      if (warm[i] || res.active[i]) used += static_cast<long double>(p_.upper[i]) * p_.upper[i];
    if (used < 1.0L - 1e-9L)
      for (std::size_t i = 0; i < n_; ++i) res.active[i] = res.active[i] || warm[i];
  }

  std::set<std::string> seen;
  bool batch = true;
  std::vector<double> hx(n_);
  const int cap_iter = 20 * static_cast<int>(n_) + 100;
  for (int it = 0; it < cap_iter; ++it) {
    res.iterations = it + 1;
    long double used = 0.0L;
    bool any_free = false;
    for (std::size_t i = 0; i < n_; ++i) {
      if (res.active[i]) {
        res.xi[i] = p_.upper[i];
        used += static_cast<long double>(p_.upper[i]) * p_.upper[i];
      } else {
        any_free = true;
      }
    }
    const double r2 = static_cast<double>(1.0L - used);
    if (!any_free || r2 <= 1e-15) {
      // Fully constrained: free entries sit at zero; the sphere multiplier is the
      // smallest value keeping every bound multiplier nonnegative.
      for (std::size_t i = 0; i < n_; ++i)
        if (!res.active[i]) res.xi[i] = 0.0;
      tridiag::apply(p_.couplings, res.xi, hx);
      res.mu = -INFINITY;
      for (std::size_t i = 0; i < n_; ++i)
        if (res.active[i] && p_.upper[i] > 0.0) res.mu = std::max(res.mu, hx[i] / res.xi[i]);
      for (std::size_t i = 0; i < n_; ++i)
        res.multipliers[i] = res.active[i] && p_.upper[i] > 0.0 ? res.mu - hx[i] / res.xi[i] : 0.0;
      return res;
    }
    build_segments(res.active);
    solve_free(r2, res);

    // Violated upper bounds.
    std::size_t worst = n_;
    double worst_ratio = 1.0 + o_.bound_tol;
    std::vector<std::size_t> viol;
    for (std::size_t i = 0; i < n_; ++i) {
      if (res.active[i]) continue;
      const double ratio = res.xi[i] / p_.upper[i];
      if (ratio > 1.0 + o_.bound_tol) {
        viol.push_back(i);
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          worst = i;
        }
      }
    }
    bool changed = false;
    if (!viol.empty()) {
      if (batch) {
        for (std::size_t i : viol) res.active[i] = 1;
      } else {
        res.active[worst] = 1;
      }
      changed = true;
    } else {
      tridiag::apply(p_.couplings, res.xi, hx);
      std::size_t release = n_;
      const double threshold = -o_.multiplier_tol * std::max(1.0, std::fabs(res.mu));
      double most_negative = threshold;
      std::vector<std::size_t> negative;
      for (std::size_t i = 0; i < n_; ++i) {
        res.multipliers[i] = 0.0;
        if (!res.active[i] || p_.upper[i] <= 0.0) continue;
        const double w = res.mu - hx[i] / res.xi[i];
        res.multipliers[i] = w;
        if (w < threshold) negative.push_back(i);
        if (w < most_negative) {
          most_negative = w;
          release = i;
        }
      }
      if (release == n_) return res;
      if (batch) {
        for (std::size_t i : negative) res.active[i] = 0;
      } else {
        res.active[release] = 0;
      }
      changed = true;
    }
    if (changed) {
      std::string key(res.active.begin(), res.active.end());
      if (!seen.insert(key).second) {
        if (!batch) throw NumericalError("active-set cycle detected after " + std::to_string(it + 1) + " iterations");
        batch = false;
        seen.clear();
        seen.insert(key);
      }
    }
  }
  throw NumericalError("active-set iteration cap reached");
}

}  // namespace

Result minimize(const Problem &problem, std::span<const char> warm_active, const Options &options) {
  Solver s(problem, options);
  return s.run(warm_active);
}

}  // namespace abstain::box_sphere
