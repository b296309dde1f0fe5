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

#include "abstain/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace abstain::simulate {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double x) {
  x = std::remainder(x, 2.0 * kPi);
  if (x <= -kPi) x += 2.0 * kPi;
  return x;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double loss(double theta, double theta_hat) {
  const double s = std::sin(0.5 * (theta - theta_hat));
  return 4.0 * s * s;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL));
}

double Simulator::Block::conditional(double delta) const {
  double v = coeffs[0];
  for (std::size_t k = 1; k < coeffs.size(); ++k) v += 2.0 * coeffs[k] * std::cos(k * delta);
  return v / (2.0 * kPi * coeffs[0]);
}

Simulator::Simulator(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols) {
  double coh = 0.0;
  double mass = 0.0;
  for (const auto &b : blocks) {
    J2_ = std::max(J2_, b.n);
    Block blk;
    blk.j = b.j;
    blk.p = b.p;
    const BlockSolution *sol = nullptr;
    for (const auto &s : sols)
      if (s.j == b.j) sol = &s;
    const std::size_t dim = b.dim();
    blk.coeffs.assign(dim, 0.0);
    if (sol) {
      if (sol->filter.size() != dim) throw DomainError("filter length does not match block");
      for (std::size_t k = 0; k < dim; ++k)
        for (std::size_t i = 0; i + k < dim; ++i) {
          const double ff = sol->filter[i] * sol->filter[i + k];
          if (ff > 0.0) blk.coeffs[k] += ff * (k == 0 ? b.diag[i] : b.entry(b.m_of(i), b.m_of(i + k)));
        }
    }
    blk.s = blk.coeffs[0];
    if (blk.s > 0.0) {
      const int grid = 4 * b.n + 16;  // 8J + 16
      double mx = 0.0;
      for (int g = 0; g < grid; ++g) mx = std::max(mx, blk.conditional(-kPi + 2.0 * kPi * g / grid));
      blk.envelope = 1.05 * mx;
    }
    mass += blk.p;
    success_ += blk.p * blk.s;
    if (dim > 1) coh += blk.p * blk.coeffs[1];
    cumulative_.push_back(mass);
    blocks_.push_back(std::move(blk));
  }
  if (!blocks_.empty()) cumulative_.back() = std::max(cumulative_.back(), 1.0);
  sigma2_ = success_ > 0.0 ? 2.0 - 2.0 * coh / success_ : std::numeric_limits<double>::quiet_NaN();
}

double Simulator::density(double theta, double theta_hat) const {
  const double delta = theta - theta_hat;
  double v = 0.0;
  for (const auto &b : blocks_) {
    if (b.p == 0.0) continue;
    double t = b.coeffs[0];
    for (std::size_t k = 1; k < b.coeffs.size(); ++k) t += 2.0 * b.coeffs[k] * std::cos(k * delta);
    v += b.p * t;
  }
  return v / (2.0 * kPi);
}

EstimationSample Simulator::sample(double theta, std::mt19937_64 &rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EstimationSample out;
  out.theta = theta;
  const double u = unit(rng) * cumulative_.back();
  const std::size_t k = std::min<std::size_t>(
      std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin(), blocks_.size() - 1);
  const Block &b = blocks_[k];
  out.block_j = b.j;
  if (!(b.s > 0.0) || unit(rng) >= b.s) return out;
  for (int tries = 0; tries < 1000000; ++tries) {
    const double delta = -kPi + 2.0 * kPi * unit(rng);
    const double q = b.conditional(delta);
    if (q > b.envelope) throw NumericalError("rejection envelope violated by the outcome density");
    if (unit(rng) * b.envelope <= q) {
      out.success = true;
      out.theta_hat = wrap(theta - delta);
      return out;
    }
  }
  throw NumericalError("rejection sampler failed to accept");
}

void Simulator::chunk(std::uint64_t index, std::uint64_t count, std::uint64_t seed, double sums[3],
                      std::uint64_t &hits) const {
  std::mt19937_64 rng(stream_seed(seed, index));
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  sums[0] = sums[1] = 0.0;
  hits = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const EstimationSample s = sample(angle(rng), rng);
    if (!s.success) continue;
    const double l = loss(s.theta, s.theta_hat);
    ++hits;
    sums[0] += l;
    sums[1] += l * l;
  }
}

MonteCarloSummary Simulator::run(std::uint64_t samples, std::uint64_t seed, Exec exec) const {
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<double> s0(chunks), s1(chunks);
  std::vector<std::uint64_t> hits(chunks);
  auto body = [&](std::int64_t c) {
    const std::uint64_t count = std::min<std::uint64_t>(kChunk, samples - static_cast<std::uint64_t>(c) * kChunk);
    double sums[3];
    chunk(static_cast<std::uint64_t>(c), count, seed, sums, hits[c]);
    s0[c] = sums[0];
    s1[c] = sums[1];
  };
  const std::int64_t nc = static_cast<std::int64_t>(chunks);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < nc; ++c) body(c);
  } else {
    for (std::int64_t c = 0; c < nc; ++c) body(c);
  }
  MonteCarloSummary out;
  out.samples = samples;
  double a = 0.0, b = 0.0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    out.successes += hits[c];
    a += s0[c];
    b += s1[c];
  }
  out.success_rate = samples ? static_cast<double>(out.successes) / samples : 0.0;
  if (out.successes > 0) {
    const double m = static_cast<double>(out.successes);
    out.mean_loss = a / m;
    const double var = std::max(0.0, b / m - out.mean_loss * out.mean_loss);
    out.std_error = out.successes > 1 ? std::sqrt(var / (m - 1.0)) : 0.0;
  }
  return out;
}

double outcome_density(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols,
                       double theta, double theta_hat) {
  return Simulator(blocks, sols).density(theta, theta_hat);
}

EstimationSample sample(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols,
                        double theta, std::uint64_t rng_seed) {
  std::mt19937_64 rng(stream_seed(rng_seed, 0));
  return Simulator(blocks, sols).sample(theta, rng);
}

double worst_case_check(const std::vector<DephasingBlock> &blocks, const std::vector<BlockSolution> &sols,
                        std::span<const double> thetas) {
  const Simulator sim(blocks, sols);
  if (!(sim.success() > 0.0)) throw DomainError("filters reject every outcome");
  int n = 1;
  for (const auto &b : blocks) n = std::max(n, b.n);
  const int points = 8 * n + 32;  // 16J + 32
  const double h = 2.0 * kPi / points;
  double worst = 0.0;
  for (double theta : thetas) {
    double mass = 0.0, moment = 0.0;
    for (int k = 0; k < points; ++k) {
      const double th = -kPi + h * k;
      const double p = sim.density(theta, th);
      mass += p;
      moment += p * loss(theta, th);
    }
    mass *= h;
    moment *= h;
    worst = std::max(worst, std::fabs(moment / mass - sim.sigma2()));
  }
  return worst;
}

}  // namespace abstain::simulate
