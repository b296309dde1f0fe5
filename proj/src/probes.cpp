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

#include "abstain/probes.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "abstain/blocksolver.hpp"

namespace abstain::probes {

namespace {

void check_n(int n) {
  if (n < 1) throw DomainError("qubit count must be positive");
}

// Normalizes exp(logs) without overflow.
SymmetricProbe from_logs(int n, const std::vector<double> &logs) {
  double mx = -INFINITY;
  for (double v : logs) mx = std::max(mx, v);
  std::vector<double> c(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) c[i] = std::exp(logs[i] - mx);
  return SymmetricProbe::normalized(n, std::move(c));
}

}  // namespace

SymmetricProbe multicopy(int n) {
  check_n(n);
  std::vector<double> logs(n + 1);
  for (int i = 0; i <= n; ++i) logs[i] = 0.5 * (log_binomial(n, n - i) - n * std::numbers::ln2);
  return from_logs(n, logs);
}

SymmetricProbe optimal_gaussian(int n, double r) {
  check_n(n);
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("r must lie in (0, 1]");
  const double width = std::sqrt((1.0 - r * r) / (r * r * std::pow(static_cast<double>(n), 3)));
  std::vector<double> c(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double m = i - 0.5 * n;
    c[i] = std::cos(m * std::numbers::pi / (n + 2)) * std::exp(-width * m * m);
  }
  return SymmetricProbe::normalized(n, std::move(c));
}

SymmetricProbe ground_profile_probe(int n, double r) {
  check_n(n);
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("r must lie in (0, 1]");
  const NoiseModel noise(r);
  const HalfInt J = HalfInt::from_twice(n);
  auto [lambda, xi] = unconstrained_minimum(coupling_matrix(n, J, noise));
  (void)lambda;
  std::vector<double> logs(n + 1);
  for (int i = 0; i <= n; ++i) {
    const HalfInt m = HalfInt::from_twice(2 * i - n);
    const double ld = log_dephasing_coefficient(n, J, m, m, noise);
    logs[i] = xi[i] > 0.0 ? std::log(xi[i]) + 0.5 * (log_binomial(n, (n - m.twice) / 2) - ld) : -INFINITY;
  }
  return from_logs(n, logs);
}

SymmetricProbe from_json_text(const std::string &text, std::string *warning) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(std::string("probe file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("coeffs"))
    throw ParseError("probe file needs keys \"n\" and \"coeffs\"");
  if (!doc["n"].is_number_integer()) throw ParseError("\"n\" must be an integer");
  if (!doc["coeffs"].is_array()) throw ParseError("\"coeffs\" must be an array");
  const int n = doc["n"].get<int>();
  std::vector<double> c;
  for (const auto &v : doc["coeffs"]) {
    if (!v.is_number()) throw ParseError("\"coeffs\" entries must be numbers");
    c.push_back(v.get<double>());
  }
  if (n < 1) throw DomainError("probe needs at least one qubit");
  if (c.size() != static_cast<std::size_t>(n) + 1)
    throw DomainError("expected " + std::to_string(n + 1) + " coefficients, got " + std::to_string(c.size()));
  double norm = 1.0;
  SymmetricProbe p = SymmetricProbe::normalized(n, std::move(c), &norm);
  if (warning) {
    warning->clear();
    if (std::fabs(norm - 1.0) > 1e-6) {
      std::ostringstream os;
      os << "probe norm was " << norm << "; coefficients rescaled to unit norm";
      *warning = os.str();
    }
  }
  return p;
}

SymmetricProbe from_file(const std::string &path, std::string *warning) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open probe file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(), warning);
}

std::string to_json_text(const SymmetricProbe &probe) {
  nlohmann::json doc;
  doc["n"] = probe.n();
  doc["coeffs"] = probe.coeffs();
  return doc.dump(2) + "\n";
}

}  // namespace abstain::probes
