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

#ifndef ABSTAIN_SIMULATE_HPP
#define ABSTAIN_SIMULATE_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "abstain/blocksolver.hpp"
#include "abstain/spinblocks.hpp"

namespace abstain::simulate {

struct EstimationSample {
  double theta = 0.0;
  bool success = false;
  double theta_hat = 0.0;  // meaningful only on success
  HalfInt block_j;
};

struct MonteCarloSummary {
  std::uint64_t samples = 0;
  std::uint64_t successes = 0;
  double mean_loss = 0.0;   // over successful rounds
  double std_error = 0.0;
  double success_rate = 0.0;
};

/// Joint density p(theta_hat, success | theta).
double outcome_density(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols,
                       double theta, double theta_hat);

/// Periodic loss 4 sin^2((theta - theta_hat)/2).
double loss(double theta, double theta_hat);

/// Stream seeding: splitmix64 of (seed, stream).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

class Simulator {
 public:
  Simulator(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols);

  EstimationSample sample(double theta, std::mt19937_64 &rng) const;

  /// theta drawn uniformly each round. Output is independent of the worker count.
  MonteCarloSummary run(std::uint64_t samples, std::uint64_t seed, Exec exec = Exec::parallel) const;

  /// Joint density p(theta_hat, success | theta).
  double density(double theta, double theta_hat) const;
  /// Success probability sum_j p_j s_j.
  double success() const { return success_; }
  /// Closed-form conditional uncertainty.
  double sigma2() const { return sigma2_; }

  static constexpr std::uint64_t kChunk = 1u << 15;

 private:
  struct Block {
    HalfInt j;
    double p = 0.0;
    double s = 0.0;                // c_0
    std::vector<double> coeffs;    // c_k, k = 0..2j
    double envelope = 0.0;         // bound on the normalized in-block density
    double conditional(double delta) const;
  };
  void chunk(std::uint64_t index, std::uint64_t count, std::uint64_t seed, double sums[3], std::uint64_t &hits) const;

  std::vector<Block> blocks_;
  std::vector<double> cumulative_;
  double success_ = 0.0;
  double sigma2_ = 0.0;
  int J2_ = 0;
};

EstimationSample sample(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols,
                        double theta, std::uint64_t rng_seed);

/// max over theta of |E[loss | theta, success] - sigma^2| by periodic trapezoid quadrature.
double worst_case_check(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols,
                        std::span<const double> thetas);

}  // namespace abstain::simulate

#endif
