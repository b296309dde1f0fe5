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

#include "abstain/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "abstain/asymptotics.hpp"
#include "abstain/oracle.hpp"
#include "abstain/probes.hpp"
#include "abstain/scavenge.hpp"
#include "abstain/simulate.hpp"
#include "abstain/tradeoff.hpp"

#ifndef ABSTAIN_VERSION
#define ABSTAIN_VERSION "0.0.0"
#endif

namespace abstain::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Common {
  int n = 0;
  double r = 0.8;
  std::string probe = "multicopy";
  std::string probe_file;
  std::string format = "csv";
  std::string out = "-";
  int threads = 0;
  std::optional<double> tol;
};

class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string &msg) : std::runtime_error(msg), code(code) {}
  int code;
};

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

std::string label(double v) { return fmt::format("{:g}", v); }

void emit(const Table &t, const Common &c, const std::string &invocation, std::ostream &stdout_) {
  std::ostringstream os;
  if (c.format == "json") {
    nlohmann::ordered_json doc;
    doc["tool"] = "abstain-metrology";
    doc["version"] = version();
    doc["invocation"] = invocation;
    doc["columns"] = t.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto &r : t.rows) {
      auto row = nlohmann::ordered_json::array();
      for (double v : r) {
        if (std::isfinite(v)) {
          row.push_back(v);
        } else {
          row.push_back(nullptr);
        }
      }
      rows.push_back(row);
    }
    doc["rows"] = rows;
    os << doc.dump(1) << "\n";
  } else {
    os << "# abstain-metrology " << version() << " | " << invocation << "\n";
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
    os << "\n";
    for (const auto &r : t.rows) {
      for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << number(r[k]);
      os << "\n";
    }
  }
  if (c.out == "-") {
    stdout_ << os.str();
  } else {
    std::ofstream f(c.out);
    if (!f) throw Failure(kExitUsage, "cannot write " + c.out);
    f << os.str();
  }
}

void add_common(CLI::App *sub, Common &c, bool with_probe) {
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "Output path, '-' for stdout");
  sub->add_option("--threads", c.threads, "Worker threads (default: ABSTAIN_METROLOGY_THREADS or all)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--tol", c.tol, "Acceptance tolerance for the self-check of this subcommand")
      ->check(CLI::PositiveNumber);
  sub->add_option("--r", c.r, "Dephasing parameter r in [0, 1]")->check(CLI::Range(0.0, 1.0));
  if (with_probe) {
    sub->add_option("--probe", c.probe, "Probe: multicopy, optimal or ground")
        ->check(CLI::IsMember({"multicopy", "optimal", "ground"}));
    sub->add_option("--probe-file", c.probe_file, "JSON probe file; overrides --probe");
  }
}

SymmetricProbe make_probe(const Common &c, int n, std::ostream &err) {
  if (!c.probe_file.empty()) {
    std::string warning;
    SymmetricProbe p = probes::from_file(c.probe_file, &warning);
    if (!warning.empty()) err << "warning: " << warning << "\n";
    return p;
  }
  if (n < 1) throw Failure(kExitUsage, "--n must be a positive integer");
  if (c.probe == "multicopy") return probes::multicopy(n);
  if (c.probe == "optimal") return probes::optimal_gaussian(n, c.r);
  return probes::ground_profile_probe(n, c.r);
}

std::string probe_name(const Common &c) { return c.probe_file.empty() ? c.probe : "file:" + c.probe_file; }

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) out[k] = count == 1 ? lo : lo + (hi - lo) * k / (count - 1);
  return out;
}

void check_gap(const TradeoffPoint &pt, double tol) {
  if (pt.duality_gap > tol)
    throw Failure(kExitNumerical, fmt::format("duality gap {:.3g} at S={:.6g} exceeds {:.3g}", pt.duality_gap, pt.S, tol));
}

void check_s_bar(double v) {
  if (!(v >= 0.0 && v < 1.0)) throw Failure(kExitUsage, "abstention values must lie in [0, 1)");
}

// Nearest block spin to r J with the parity of n.
HalfInt typical_spin(int n, double r) {
  int t = static_cast<int>(std::lround(r * n));
  if ((n - t) % 2) t += t < n ? 1 : -1;
  return HalfInt::from_twice(std::clamp(t, n % 2, n));
}

Table do_tradeoff(const Common &c, int grid, double s_bar_max, std::ostream &err) {
  if (grid < 1) throw Failure(kExitUsage, "--s-grid must be at least 1");
  check_s_bar(s_bar_max);
  const SymmetricProbe p = make_probe(c, c.n, err);
  const auto s_bar = linspace(0.0, s_bar_max, grid);
  std::vector<double> S(s_bar.size());
  for (std::size_t k = 0; k < S.size(); ++k) S[k] = 1.0 - s_bar[k];
  const auto curve = tradeoff_curve(p, NoiseModel(c.r), S, probe_name(c));
  Table t{{"S_bar", "S", "sigma2", "n_sigma2"}, {}};
  for (std::size_t k = 0; k < S.size(); ++k) {
    check_gap(curve.points[k], c.tol.value_or(1e-6));
    t.rows.push_back({s_bar[k], S[k], curve.points[k].sigma2, p.n() * curve.points[k].sigma2});
  }
  return t;
}

Table do_scaling(const Common &c, int n_min, int n_max, int n_step, const std::vector<double> &s_bars,
                 std::ostream &err) {
  if (n_min < 1 || n_max < n_min || n_step < 1) throw Failure(kExitUsage, "need 1 <= --n-min <= --n-max and --n-step >= 1");
  if (!(c.r > 0.0)) throw Failure(kExitUsage, "scaling needs r > 0");
  for (double v : s_bars) check_s_bar(v);
  Table t;
  t.columns.push_back("n");
  for (double v : s_bars) t.columns.push_back("sigma2_sbar_" + label(v));
  for (double v : s_bars) t.columns.push_back("approx_sbar_" + label(v));
  for (const char *col : {"ultimate_exact", "ultimate_bound", "deterministic_asymptote", "pure_heisenberg"})
    t.columns.push_back(col);
  std::vector<int> ns;
  for (int n = n_min; n <= n_max; n += n_step) ns.push_back(n);
  t.rows.resize(ns.size());
  const NoiseModel noise(c.r);
  for (std::size_t q = 0; q < ns.size(); ++q) {
    const int n = ns[q];
    const SymmetricProbe p = make_probe(c, n, err);
    if (p.n() != n) throw Failure(kExitUsage, "a probe file fixes n; scaling needs a generated probe");
    const auto blocks = build_blocks(p, noise);
    const auto hams = coupling_matrices(n, noise);
    std::vector<double> &row = t.rows[q];
    row.push_back(n);
    std::vector<double> vals(s_bars.size());
    const int count = static_cast<int>(s_bars.size());
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) {
      const auto pt = allocate(blocks, hams, 1.0 - s_bars[k], Exec::serial);
      vals[k] = pt.sigma2;
    }
    for (double v : vals) row.push_back(v);
    for (double v : s_bars) row.push_back(asymptotics::finite_S_approx(n, c.r, 1.0 - v));
    row.push_back(ultimate_postselect(blocks, hams).first);
    row.push_back(asymptotics::ultimate_bound(n, c.r));
    row.push_back(asymptotics::deterministic_multicopy(n, c.r));
    row.push_back(asymptotics::pure_heisenberg(n));
  }
  return t;
}

Table do_scavenge(const Common &c, int grid, double s_bar_max, std::ostream &err) {
  if (grid < 1) throw Failure(kExitUsage, "--s-grid must be at least 1");
  check_s_bar(s_bar_max);
  const SymmetricProbe p = make_probe(c, c.n, err);
  const NoiseModel noise(c.r);
  const auto blocks = build_blocks(p, noise);
  const auto hams = coupling_matrices(p.n(), noise);
  const double det = scavenge::deterministic_variance(blocks);
  const auto s_bar = linspace(0.0, s_bar_max, grid);
  Table t{{"S_bar", "sigma2_opt", "sigma2_bar", "sigma2_all", "sigma2_det"}, {}};
  t.rows.resize(s_bar.size());
  const int count = static_cast<int>(s_bar.size());
  std::vector<TradeoffPoint> pts(s_bar.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) pts[k] = allocate(blocks, hams, 1.0 - s_bar[k], Exec::serial);
  for (int k = 0; k < count; ++k) {
    check_gap(pts[k], c.tol.value_or(1e-6));
    const auto sc = scavenge::scavenged_variance(blocks, pts[k].solutions);
    const double all = scavenge::all_outcomes_variance(blocks, pts[k].solutions);
    t.rows[k] = {s_bar[k], pts[k].sigma2, sc.defined ? sc.sigma2_bar : kNaN, all, det};
  }
  return t;
}

Table do_profile(const Common &c, double s, std::optional<double> j_opt, std::ostream &err) {
  if (!(s > 0.0 && s <= 1.0)) throw Failure(kExitUsage, "--S must lie in (0, 1]");
  if (!(c.r > 0.0)) throw Failure(kExitUsage, "profile needs r > 0");
  const SymmetricProbe p = make_probe(c, c.n, err);
  const int n = p.n();
  HalfInt j = typical_spin(n, c.r);
  if (j_opt) {
    const double twice = 2.0 * *j_opt;
    if (std::fabs(twice - std::round(twice)) > 1e-9) throw Failure(kExitUsage, "--j must be an integer or half-integer");
    j = HalfInt::from_twice(static_cast<int>(std::lround(twice)));
  }
  const NoiseModel noise(c.r);
  const auto blocks = build_blocks(p, noise);
  const DephasingBlock *block = nullptr;
  for (const auto &b : blocks)
    if (b.j == j) block = &b;
  if (!block) throw Failure(kExitUsage, "spin " + j.str() + " is not a block of " + std::to_string(n) + " qubits");
  const auto sol = constrained_block_solve(*block, coupling_matrix(n, j, noise), s);
  const double jj = j.value();
  Table t{{"x", "phi_tilde", "phi", "V", "coincident"}, {}};
  for (std::size_t i = 0; i < block->dim(); ++i) {
    const double x = jj > 0 ? block->m_of(i).value() / jj : 0.0;
    t.rows.push_back({x, std::sqrt(jj * block->diag[i] / s), std::sqrt(jj) * sol.xi[i],
                      asymptotics::potential(jj, c.r, x), sol.coincidence[i] ? 1.0 : 0.0});
  }
  return t;
}

Table do_ultimate(const Common &c, std::ostream &err) {
  if (!(c.r > 0.0)) throw Failure(kExitUsage, "ultimate needs r > 0");
  const SymmetricProbe p = make_probe(c, c.n, err);
  const NoiseModel noise(c.r);
  const auto blocks = build_blocks(p, noise);
  const auto hams = coupling_matrices(p.n(), noise);
  const auto [sig, s] = ultimate_postselect(blocks, hams);
  return {{"n", "r", "sigma2_ult_exact", "sigma2_ult_bound", "S_star", "log_S_star", "pure_heisenberg"},
          {{static_cast<double>(p.n()), c.r, sig, asymptotics::ultimate_bound(p.n(), c.r), s,
            log_ultimate_success(blocks, hams), asymptotics::pure_heisenberg(p.n())}}};
}

Table do_simulate(const Common &c, double S, std::uint64_t samples, std::uint64_t seed, std::ostream &err) {
  if (!(S > 0.0 && S <= 1.0)) throw Failure(kExitUsage, "--S must lie in (0, 1]");
  if (samples == 0) throw Failure(kExitUsage, "--samples must be positive");
  const SymmetricProbe p = make_probe(c, c.n, err);
  const NoiseModel noise(c.r);
  const auto blocks = build_blocks(p, noise);
  const auto hams = coupling_matrices(p.n(), noise);
  const auto pt = allocate(blocks, hams, S);
  const simulate::Simulator sim(blocks, pt.solutions);
  const auto mc = sim.run(samples, seed);
  const std::vector<double> thetas{0.0, 1.0, -2.5};
  const double worst = simulate::worst_case_check(blocks, pt.solutions, thetas);
  if (worst > c.tol.value_or(1e-8))
    throw Failure(kExitNumerical, fmt::format("worst-case loss deviates by {:.3g}", worst));
  const double z = mc.std_error > 0 ? (mc.mean_loss - pt.sigma2) / mc.std_error : 0.0;
  return {{"n", "r", "S", "samples", "successes", "success_rate", "mean_loss", "std_error", "sigma2_exact", "z_score",
           "worst_case"},
          {{static_cast<double>(p.n()), c.r, S, static_cast<double>(mc.samples), static_cast<double>(mc.successes),
            mc.success_rate, mc.mean_loss, mc.std_error, pt.sigma2, z, worst}}};
}

Table do_oracle_check(const Common &c, double S, std::ostream &err) {
  if (!(S > 0.0 && S <= 1.0)) throw Failure(kExitUsage, "--S must lie in (0, 1]");
  const SymmetricProbe p = make_probe(c, c.n, err);
  if (p.n() > 6) throw Failure(kExitUsage, "oracle-check supports at most 6 qubits");
  const NoiseModel noise(c.r);
  const auto blocks = build_blocks(p, noise);
  const auto hams = coupling_matrices(p.n(), noise);
  const auto pt = allocate(blocks, hams, S);
  const auto basis = oracle::spin_basis(p.n());
  const oracle::Vector psi = oracle::symmetric_state(p);
  const oracle::Matrix rho = oracle::dense_dephase(psi * psi.transpose(), noise);
  double entry_diff = 0.0;
  for (const auto &b : blocks) {
    const auto [pj, rj] = oracle::block_state(basis, rho, b.j);
    entry_diff = std::max(entry_diff, std::fabs(pj - b.p));
    if (b.degenerate) continue;
    for (std::size_t a = 0; a < b.dim(); ++a)
      for (std::size_t q = 0; q < b.dim(); ++q)
        entry_diff = std::max(entry_diff, std::fabs(rj(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(q)) -
                                                    b.entry(b.m_of(a), b.m_of(q))));
  }
  const auto dense = oracle::brute_uncertainty(psi, oracle::seed_from_filters(basis, pt.solutions), noise);
  const double spin_S = scavenge::filtered_success(blocks, pt.solutions);
  const double spin_sigma2 = scavenge::filtered_variance(blocks, pt.solutions);
  const double diff = std::max({entry_diff, std::fabs(dense.S - spin_S), std::fabs(dense.sigma2 - spin_sigma2)});
  if (diff > c.tol.value_or(1e-10))
    throw Failure(kExitNumerical, fmt::format("spin and dense bases disagree by {:.3g}", diff));
  return {{"n", "r", "S", "sigma2_spin", "S_spin", "sigma2_dense", "S_dense", "max_abs_diff"},
          {{static_cast<double>(p.n()), c.r, S, spin_sigma2, spin_S, dense.sigma2, dense.S, diff}}};
}

std::string join(const std::vector<std::string> &args) {
  std::string s = "abstain-metrology";
  for (const auto &a : args) s += " " + a;
  return s;
}

void apply_threads(int flag) {
  if (flag > 0) {
    set_thread_count(flag);
    return;
  }
  if (const char *env = std::getenv("ABSTAIN_METROLOGY_THREADS")) {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) throw Failure(kExitUsage, "ABSTAIN_METROLOGY_THREADS must be a non-negative integer");
    set_thread_count(static_cast<int>(v));
  }
}

}  // namespace

std::string version() { return ABSTAIN_VERSION; }

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Phase estimation with abstention under dephasing noise", "abstain-metrology"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  Common c;
  int grid = 50;
  double s_bar_max = 0.99;
  int n_min = 10, n_max = 500, n_step = 10;
  std::vector<double> s_bars{0.0, 0.5, 0.9};
  double S = 0.75;
  std::optional<double> j_opt;
  std::uint64_t samples = 1000000, seed = 1;
  std::string kind;

  auto *tr = app.add_subcommand("tradeoff", "Uncertainty versus abstention for one probe");
  add_common(tr, c, true);
  tr->add_option("--n", c.n, "Qubit count");
  tr->add_option("--s-grid", grid, "Number of abstention values");
  tr->add_option("--s-bar-max", s_bar_max, "Largest abstention probability");

  auto *sc = app.add_subcommand("scaling", "Uncertainty versus qubit count at fixed abstention");
  add_common(sc, c, true);
  sc->add_option("--n-min", n_min, "Smallest qubit count");
  sc->add_option("--n-max", n_max, "Largest qubit count");
  sc->add_option("--n-step", n_step, "Qubit count step");
  sc->add_option("--s-bar", s_bars, "Abstention values")->delimiter(',');

  auto *sv = app.add_subcommand("scavenge", "Estimates from the abstention branch");
  add_common(sv, c, true);
  sv->add_option("--n", c.n, "Qubit count");
  sv->add_option("--s-grid", grid, "Number of abstention values");
  sv->add_option("--s-bar-max", s_bar_max, "Largest abstention probability");

  auto *pf = app.add_subcommand("profile", "Filtered and unfiltered profiles of one block");
  add_common(pf, c, true);
  pf->add_option("--n", c.n, "Qubit count");
  pf->add_option("--S", S, "Block success probability");
  pf->add_option("--j", j_opt, "Block spin (default: nearest to r n/2)");

  auto *ul = app.add_subcommand("ultimate", "Top-block post-selection bound");
  add_common(ul, c, true);
  ul->add_option("--n", c.n, "Qubit count");

  auto *sm = app.add_subcommand("simulate", "Monte Carlo run of the optimal protocol");
  add_common(sm, c, true);
  sm->add_option("--n", c.n, "Qubit count");
  sm->add_option("--S", S, "Global success probability");
  sm->add_option("--samples", samples, "Protocol rounds");
  sm->add_option("--seed", seed, "64-bit seed");

  auto *oc = app.add_subcommand("oracle-check", "Compare spin-block and dense computational-basis results");
  add_common(oc, c, true);
  oc->add_option("--n", c.n, "Qubit count, at most 6");
  oc->add_option("--S", S, "Global success probability");

  auto *pg = app.add_subcommand("probe-gen", "Write a probe file");
  add_common(pg, c, false);
  pg->add_option("kind", kind, "multicopy, optimal or ground")
      ->required()
      ->check(CLI::IsMember({"multicopy", "optimal", "ground"}));
  pg->add_option("--n", c.n, "Qubit count")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion &e) {
    out << version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  const std::string invocation = join(args);
  try {
    apply_threads(c.threads);
    if (pg->parsed()) {
      c.probe = kind;
      c.probe_file.clear();
      const std::string text = probes::to_json_text(make_probe(c, c.n, err));
      if (c.out == "-") {
        out << text;
      } else {
        std::ofstream f(c.out);
        if (!f) throw Failure(kExitUsage, "cannot write " + c.out);
        f << text;
      }
      return kExitOk;
    }
    Table t;
    if (tr->parsed()) t = do_tradeoff(c, grid, s_bar_max, err);
    if (sc->parsed()) t = do_scaling(c, n_min, n_max, n_step, s_bars, err);
    if (sv->parsed()) t = do_scavenge(c, grid, s_bar_max, err);
    if (pf->parsed()) t = do_profile(c, S, j_opt, err);
    if (ul->parsed()) t = do_ultimate(c, err);
    if (sm->parsed()) t = do_simulate(c, S, samples, seed, err);
    if (oc->parsed()) t = do_oracle_check(c, S, err);
    emit(t, c, invocation, out);
    return kExitOk;
  } catch (const Failure &e) {
    err << "error: " << e.what() << "\n";
    return e.code;
  } catch (const DomainError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError &e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception &e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace abstain::cli
