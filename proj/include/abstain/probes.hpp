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

#ifndef ABSTAIN_PROBES_HPP
#define ABSTAIN_PROBES_HPP

#include <string>

#include "abstain/spinblocks.hpp"

namespace abstain::probes {

/// n equatorial copies: c_m = sqrt(C(n, J-m) / 2^n).
SymmetricProbe multicopy(int n);

/// c_m proportional to cos(m pi/(n+2)) exp(-sqrt((1-r^2)/(r^2 n^3)) m^2).
SymmetricProbe optimal_gaussian(int n, double r);

/// Probe whose dephased top block equals the top-block ground state, so that block needs no filter.
SymmetricProbe ground_profile_probe(int n, double r);

/// Reads {"n": int, "coeffs": [n+1 reals ascending in m]}. Rescales unnormalized input;
/// *warning receives a message when the norm was off by more than 1e-6.
SymmetricProbe from_json_text(const std::string &text, std::string *warning = nullptr);
SymmetricProbe from_file(const std::string &path, std::string *warning = nullptr);

std::string to_json_text(const SymmetricProbe &probe);

}  // namespace abstain::probes

#endif
