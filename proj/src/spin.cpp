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

#include "abstain/spin.hpp"

#include <cmath>

#include <omp.h>

namespace abstain {

std::string HalfInt::str() const {
  if (twice % 2 == 0) return std::to_string(twice / 2);
  return std::to_string(twice) + "/2";
}

NoiseModel::NoiseModel(double r) : r_(r), p_f_((1.0 - r) / 2.0) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("dephasing parameter r must lie in [0, 1]");
}

NoiseModel NoiseModel::from_flip_probability(double p_f) {
  if (!(p_f >= 0.0 && p_f <= 0.5)) throw DomainError("flip probability must lie in [0, 1/2]");
  return NoiseModel(1.0 - 2.0 * p_f);
}

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace abstain
