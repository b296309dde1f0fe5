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

#ifndef ABSTAIN_ASYMPTOTICS_HPP
#define ABSTAIN_ASYMPTOTICS_HPP

#include "abstain/spin.hpp"

// Closed-form large-n quantities. Every formula is returned as written; choosing
// between the noisy and noiseless regimes is left to the caller.

namespace abstain::asymptotics {

/// Effective potential of the continuum filter equation at x = m/j.
double potential(double j, double r, double x);
/// Minimum of the potential, reached at x = 0.
double potential_floor(double j, double r);
/// Curvature of the harmonic expansion V ~ V0 + omega^2 x^2.
double harmonic_omega2(double j, double r);

/// Discrete counterpart 2 j^2 (1 - a_m) of the potential, from the exact couplings,
/// attached to the bond midpoint x = (m + 1/2)/j.
double discrete_potential(int n, HalfInt j, HalfInt m, double r);

/// Top-block ground value including the first finite-size correction.
double ultimate_bound(int n, double r);

/// Linear-in-abstention approximation of the multi-copy tradeoff.
double finite_S_approx(int n, double r, double S);

/// Deterministic uncertainty of the conjectured optimal probe.
double optimal_deterministic_bound(int n, double r);

/// Deterministic multi-copy asymptote 1/(n r^2).
double deterministic_multicopy(int n, double r);

/// Noiseless asymptote pi^2/n^2.
double pure_heisenberg(int n);
/// Exact noiseless value 2 - 2 cos(pi/(n+2)) = 4 sin^2(pi/(2(n+2))).
double pure_chain_minimum(int n);

/// Gaussian approximation of the multi-copy block probability around its peak j = r J.
double gaussian_block_probability(int n, double r, double j);

/// sum_m D^j_{m,m} for the multi-copy probe, closed form.
double multicopy_diag_sum(int n, HalfInt j, double r);

struct ScalingExponents {
  double log_s_star_per_n;      // d log s_J* / dn
  double log_s_star_per_j;      // d log s_j* / dj
  double log_p_top_per_n;       // d log p_J / dn
  double log_ultimate_success_per_n;  // d log(p_J s_J*) / dn
};

ScalingExponents scaling_exponents(double r);

}  // namespace abstain::asymptotics

#endif
