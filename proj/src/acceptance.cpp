#include "spectra/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "spectra/asymptotics.hpp"
#include "spectra/entropy.hpp"
#include "spectra/errors.hpp"
#include "spectra/langevin.hpp"
#include "spectra/quadrature.hpp"
#include "spectra/spectral.hpp"
#include "spectra/sweep.hpp"

namespace spectra::acceptance {

namespace {

using std::numbers::pi;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

class Recorder {
 public:
  explicit Recorder(std::vector<Check>& checks) : checks_(checks) {}

  void expect(bool ok, std::string text) { checks_.push_back({std::move(text), ok}); }

  void within(const std::string& what, double value, double target, double tol) {
    const double err = std::abs(value - target);
    expect(err <= tol, what + " = " + num(value) + ", target " + num(target) + ", |err| " + num(err) +
                           " <= " + num(tol));
  }

  void relative(const std::string& what, double value, double target, double tol) {
    const double err = std::abs(value / target - 1.0);
    expect(err <= tol, what + " = " + num(value) + ", target " + num(target) + ", rel err " + num(err) +
                           " <= " + num(tol));
  }

  void note(std::string text) { expect(true, std::move(text)); }

 private:
  std::vector<Check>& checks_;
};

const double kSqrt8OverPi = std::sqrt(8.0 / pi);

// Temperatures 1e-3, 10^-3.5, ..., 1e-5 with 1e-4 hit exactly.
std::vector<double> lsi_grid() { return {1e-3, std::pow(10.0, -3.5), 1e-4, std::pow(10.0, -4.5), 1e-5}; }

SweepOptions sweep_options(const SuiteOptions& opts) {
  SweepOptions s;
  s.jobs = opts.jobs;
  return s;
}

void exact_baseline(Recorder& r, const SuiteOptions&) {
  const auto pot = potentials::counterexample();
  const auto gap = poincare_constant(pot, 0.0);
  r.within("C_P(uniform on [-pi/2, pi/2])", gap.c_p, 1.0, 1e-4);
  const auto lsi = lsi_constant(pot, 0.0);
  r.within("C_LS lower bound", lsi.lower_bound, 1.0, 1e-3);
  r.expect(lsi.lower_bound <= lsi.upper_bound,
           "C_LS lower " + num(lsi.lower_bound) + " <= Rothaus upper " + num(lsi.upper_bound));
}

void gaussian_regime(Recorder& r, const SuiteOptions&) {
  const auto pot = potentials::gaussian();
  for (double t : {1.0, 0.1, 0.01}) {
    const auto gap = poincare_constant(pot, t);
    r.within("t = " + num(t) + ": C_P / t", gap.c_p / t, 1.0, 1e-3);
    const auto lsi = lsi_constant(pot, t);
    r.within("t = " + num(t) + ": C_LS / t", lsi.lower_bound / t, 1.0, 0.02);
  }
}

void poincare_fit(Recorder& r, const SuiteOptions& opts, const PiecewisePotential& pot,
                  const std::vector<double>& grid, double exponent, double exponent_tol, double coefficient,
                  double coefficient_tol) {
  const auto table = run_sweep(pot, grid, {.partition = false, .poincare = true}, {}, sweep_options(opts));
  const double c0 = pot.width() * pot.width() / (pi * pi);
  const auto fit = power_fit(table, Quantity::poincare, c0);
  r.note("fit over " + std::to_string(fit.ts.size()) + " rows, R^2 = " + num(fit.r_squared));
  r.within("exponent", fit.exponent, exponent, exponent_tol);
  r.relative("coefficient", fit.coefficient, coefficient, coefficient_tol);
}

void symmetric_asymptotics(Recorder& r, const SuiteOptions& opts) {
  poincare_fit(r, opts, potentials::counterexample(), log_grid(1e-2, 1e-5, 8), 0.5, 0.02, kSqrt8OverPi, 0.03);
}

void asymmetric_asymptotics(Recorder& r, const SuiteOptions& opts) {
  const auto pot = potentials::asymmetric(1.0, 4.0);
  const auto table = run_sweep(pot, log_grid(1e-2, 1e-5, 8), {.partition = false, .poincare = true}, {},
                               sweep_options(opts));
  const auto fit = power_fit(table, Quantity::poincare, 1.0);
  r.note("fitted exponent " + num(fit.exponent) + ", R^2 = " + num(fit.r_squared));
  r.relative("coefficient", fit.coefficient, theorem_1d_coefficient(1.0, 4.0), 0.03);
}

void quartic_exponent(Recorder& r, const SuiteOptions& opts) {
  const auto pot = potentials::quartic();
  const auto model = poincare_expansion_1d(pot);
  r.within("derived Lambda vs 4 Gamma(5/4) / pi", model.coefficient, 4.0 * std::tgamma(1.25) / pi, 1e-12);
  poincare_fit(r, opts, pot, log_grid(1e-6, 1e-10, 8), 0.25, 0.02, model.coefficient, 0.05);
}

void lsi_asymptotics(Recorder& r, const SuiteOptions& opts) {
  const auto pot = potentials::counterexample();
  const auto table = run_sweep(pot, lsi_grid(), {.partition = false, .poincare = true, .lsi = true}, {},
                               sweep_options(opts));
  double prev_gap = std::numeric_limits<double>::infinity();
  bool approaching = true;
  std::string ratios;
  for (const auto& row : table.rows) {
    if (!row.c_ls_lower) {
      r.expect(false, "t = " + num(row.t) + ": no LSI lower bound");
      return;
    }
    const double ratio = (*row.c_ls_lower - 1.0) / std::sqrt(row.t);
    ratios += (ratios.empty() ? "" : ", ") + num(ratio);
    const double gap = std::abs(ratio - kSqrt8OverPi);
    approaching = approaching && gap < prev_gap;
    prev_gap = gap;
    if (row.t == 1e-4) {
      r.expect(ratio >= 1.52 && ratio <= 1.63, "(c_ls_lower - 1) / sqrt(t) at t = 1e-4 is " + num(ratio) +
                                                   " in [1.52, 1.63]");
    }
  }
  r.expect(approaching, "ratios " + ratios + " approach sqrt(8/pi) = " + num(kSqrt8OverPi) + " monotonically");
}

void refutation(Recorder& r, const SuiteOptions& opts) {
  const auto pot = potentials::counterexample();
  const auto table = run_sweep(pot, lsi_grid(), {.partition = false, .poincare = true, .lsi = true}, {},
                               sweep_options(opts));
  const auto report = refutation_report(pot, table);
  r.expect(report.verdict == Verdict::refuted, std::string("verdict ") + std::string(verdict_name(report.verdict)));
  bool large = !report.ratios.empty();
  bool increasing = true;
  std::string listing;
  for (std::size_t i = 0; i < report.ratios.size(); ++i) {
    const auto [t, ratio] = report.ratios[i];
    listing += (listing.empty() ? "" : ", ") + num(ratio);
    large = large && ratio > 5.0;
    if (i > 0) increasing = increasing && ratio > report.ratios[i - 1].second;
  }
  r.expect(large, "every ratio (c_ls_lower - 1) / (2 C_PL t) > 5: " + listing);
  r.expect(increasing, "ratios increase as t decreases");
}

void identities(Recorder& r, const SuiteOptions&) {
  const std::pair<double, double> kappas[] = {{1.0, 1.0}, {1.0, 4.0}, {2.0, 0.5}, {3.0, 7.0}, {0.25, 9.0}};
  double worst_theorem = 0.0;
  double worst_lsi = 0.0;
  for (const auto& [ka, kb] : kappas) {
    const auto pot = potentials::asymmetric(ka, kb);
    const double lambda = poincare_expansion_1d(pot).coefficient;
    worst_theorem = std::max(worst_theorem, std::abs(lambda - theorem_1d_coefficient(ka, kb)));
    worst_lsi = std::max(worst_lsi, std::abs(lsi_expansion_1d(pot).coefficient - lambda));
  }
  r.expect(worst_theorem <= 1e-12, "Lambda formula vs closed form for quadratic wings, max |diff| " +
                                       num(worst_theorem) + " <= 1e-12");
  r.expect(worst_lsi <= 1e-12, "LSI vs Poincare expansion coefficient, max |diff| " + num(worst_lsi) +
                                   " <= 1e-12");
  r.within("Z expansion gamma (counterexample)", z_expansion(potentials::counterexample()).gamma,
           std::sqrt(2.0 * pi), 1e-12);
}

void partition_laplace(Recorder& r, const SuiteOptions&) {
  const auto series_pot = [](std::vector<PowerTerm> terms) {
    const auto wing = WingSpec::series(std::move(terms));
    return PiecewisePotential(-pi / 2, pi / 2, wing, wing);
  };
  const std::pair<const char*, PiecewisePotential> cases[] = {
      {"quadratic", potentials::counterexample()},
      {"quartic", potentials::quartic()},
      {"r^2/2 + r^3", series_pot({{0.5, 2.0}, {1.0, 3.0}})},
      {"r^4 + r^6", series_pot({{1.0, 4.0}, {1.0, 6.0}})},
  };
  const auto grid = log_grid(1e-2, 1e-6, 5);
  for (const auto& [name, pot] : cases) {
    const auto zx = z_expansion(pot);
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    std::string listing;
    for (double t : grid) {
      const auto est = partition_function_estimate(pot, t);
      const double scale = std::pow(t, zx.exponent);
      const double err = std::abs(est.value - pot.width() - zx.gamma * scale) / scale;
      // Rounding and discretization floor of the scaled remainder.
      const double floor =
          std::max(10.0 * est.relative_error, 64.0 * std::numeric_limits<double>::epsilon()) * est.value / scale;
      listing += (listing.empty() ? "" : ", ") + num(err);
      if (!(err < prev) && err > floor) decreasing = false;
      prev = err;
    }
    r.expect(decreasing, std::string(name) + ": scaled remainder " + listing +
                             " decreases (or sits at the rounding floor)");
  }
}

void properties(Recorder& r, const SuiteOptions& opts) {
  const std::pair<const char*, PiecewisePotential> cases[] = {
      {"counterexample", potentials::counterexample()},
      {"asymmetric(1,4)", potentials::asymmetric(1.0, 4.0)},
  };
  const auto grid = log_grid(1e-2, 1e-5, 4);
  double worst_residual = 0.0;
  bool lsi_ok = true;
  bool var_ok = true;
  int rows = 0;
  for (const auto& [name, pot] : cases) {
    const auto table =
        run_sweep(pot, grid, {.partition = false, .poincare = true, .lsi = true}, {}, sweep_options(opts));
    for (const auto& row : table.rows) {
      if (!row.c_p || !row.c_ls || !row.residual) {
        r.expect(false, std::string(name) + " t = " + num(row.t) + ": missing values");
        continue;
      }
      ++rows;
      worst_residual = std::max(worst_residual, *row.residual);
      if (*row.c_ls < *row.c_p) {
        lsi_ok = false;
        r.expect(false, std::string(name) + " t = " + num(row.t) + ": C_LS " + num(*row.c_ls) + " < C_P " +
                            num(*row.c_p));
      }
      const double var = variance(pot, row.t);
      if (var > *row.c_p) {
        var_ok = false;
        r.expect(false, std::string(name) + " t = " + num(row.t) + ": Var(x) " + num(var) + " > C_P");
      }
    }
  }
  r.expect(worst_residual <= 1e-8, "max eigen residual " + num(worst_residual) + " <= 1e-8");
  r.expect(lsi_ok, "C_LS >= C_P on all " + std::to_string(rows) + " rows");
  r.expect(var_ok, "Var_mu(x) <= C_P on all " + std::to_string(rows) + " rows");

  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> normal;
  const std::pair<double, double> pairs[] = {{1e-2, 0.1}, {1e-2, 0.5}, {1e-3, 0.1},
                                             {1e-3, 0.5}, {1e-4, 0.1}, {1e-4, 0.5}};
  int failures = 0;
  for (int k = 0; k < 200; ++k) {
    double c[6];
    for (double& v : c) v = normal(rng);
    for (const auto& [t, eps] : pairs) {
      const double s = 1.0 / std::sqrt(t);
      const auto g = [&](double x) {
        const double u = s * x;
        return c[0] + u * (c[1] + u * (c[2] + u * (c[3] + u * (c[4] + u * c[5]))));
      };
      const auto gp = [&](double x) {
        const double u = s * x;
        return s * (c[1] + u * (2.0 * c[2] + u * (3.0 * c[3] + u * (4.0 * c[4] + u * 5.0 * c[5]))));
      };
      if (!boundary_mean_control_check(g, gp, t, eps)) ++failures;
    }
  }
  r.expect(failures == 0, "mean-control inequality: " + std::to_string(failures) +
                              " violations over 200 random polynomials x 6 (t, eps)");

  const auto pot = potentials::counterexample();
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  std::string listing;
  for (double t : grid) {
    const double gap = std::abs(surrogate_constant(pot, t) - poincare_constant(pot, t).c_p) / std::sqrt(t);
    listing += (listing.empty() ? "" : ", ") + num(gap);
    decreasing = decreasing && gap < prev;
    prev = gap;
  }
  r.expect(decreasing, "|C_t - C_P| / sqrt(t) decreasing: " + listing);
}

struct LangevinCase {
  const char* name;
  PiecewisePotential pot;
  double t;
  double dt;
  int record_every;
};

GapEstimate langevin_run(const LangevinCase& c, double c_p, int refine) {
  constexpr double kHorizon = 1000.0;
  SimConfig cfg;
  cfg.t = c.t;
  cfg.dt = c.dt / refine;
  cfg.noise_substeps = 2 / refine;
  cfg.n_chains = 32;
  cfg.seed = 7;
  cfg.record_every = c.record_every * refine;
  cfg.n_steps = std::lround(kHorizon / cfg.dt);
  cfg.burn_in = std::lround(20.0 * c_p / c.dt) * refine;
  cfg.max_lag = std::lround(5.0 * c_p / (c.dt * c.record_every));
  cfg.observable = Observable::coordinate;
  return gap_estimate(simulate(c.pot, cfg));
}

void langevin(Recorder& r, const SuiteOptions&) {
  const LangevinCase cases[] = {
      {"Ornstein-Uhlenbeck", potentials::gaussian(), 1.0, 1e-2, 5},
      {"counterexample t = 1e-2", potentials::counterexample(), 1e-2, 1e-3, 10},
  };
  for (const auto& c : cases) {
    const double c_p = poincare_constant(c.pot, c.t).c_p;
    // Both runs share one Brownian path: the coarse one sums pairs of the
    // fine increments.
    const auto coarse = langevin_run(c, c_p, 1);
    const auto fine = langevin_run(c, c_p, 2);
    r.relative(std::string(c.name) + ": c_p_hat", coarse.c_p_hat, c_p, 0.10);
    const double shift = std::abs(fine.c_p_hat - coarse.c_p_hat);
    r.expect(shift < coarse.std_error, std::string(c.name) + ": dt-halving shift " + num(shift) + " < stderr " +
                                           num(coarse.std_error));
  }
}

using Body = void (*)(Recorder&, const SuiteOptions&);

struct Entry {
  CriterionInfo info;
  Body body;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> all = {
      {{1, "exact baseline on the uniform segment", 5.0, false}, exact_baseline},
      {{2, "Gaussian single-well regime", 10.0, false}, gaussian_regime},
      {{3, "Poincare asymptotics, symmetric quadratic wings", 60.0, false}, symmetric_asymptotics},
      {{4, "Poincare asymptotics, asymmetric quadratic wings", 60.0, false}, asymmetric_asymptotics},
      {{5, "Lojasiewicz exponent 4", 120.0, false}, quartic_exponent},
      {{6, "log-Sobolev asymptotics", 300.0, false}, lsi_asymptotics},
      {{7, "conjecture refutation", 300.0, false}, refutation},
      {{8, "internal consistency identities", 1.0, false}, identities},
      {{9, "partition-function Laplace check", 10.0, false}, partition_laplace},
      {{10, "property suites", 120.0, false}, properties},
      {{11, "Langevin cross-check", 300.0, true}, langevin},
  };
  return all;
}

}  // namespace

const std::vector<CriterionInfo>& criteria() {
  static const std::vector<CriterionInfo> infos = [] {
    std::vector<CriterionInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

Outcome run_criterion(int id, const SuiteOptions& opts) {
  for (const auto& e : entries()) {
    if (e.info.id != id) continue;
    Outcome out{id, e.info.title, false, 0.0, e.info.budget_seconds, {}, {}};
    Recorder rec(out.checks);
    const auto start = std::chrono::steady_clock::now();
    try {
      e.body(rec, opts);
    } catch (const std::exception& ex) {
      out.error = ex.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.expect(out.seconds < out.budget_seconds,
               "runtime " + num(out.seconds) + " s < " + num(out.budget_seconds) + " s");
    out.passed = out.error.empty();
    for (const auto& c : out.checks) out.passed = out.passed && c.passed;
    return out;
  }
  throw InvalidInput("no acceptance criterion " + std::to_string(id));
}

void print_outcome(const Outcome& o, std::ostream& out) {
  char head[160];
  std::snprintf(head, sizeof(head), "%s %2d %s (%.2f s)", o.passed ? "PASS" : "FAIL", o.id, o.title.c_str(),
                o.seconds);
  out << head << '\n';
  for (const auto& c : o.checks) out << "      " << (c.passed ? "ok   " : "FAIL ") << c.text << '\n';
  if (!o.error.empty()) out << "      error: " << o.error << '\n';
}

std::vector<Outcome> run_suite(const SuiteOptions& opts, std::ostream& out) {
  std::vector<Outcome> results;
  for (const auto& info : criteria()) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), info.id) == opts.only.end()) continue;
    if (info.statistical && !opts.statistical) continue;
    results.push_back(run_criterion(info.id, opts));
    print_outcome(results.back(), out);
    out.flush();
  }
  return results;
}

}  // namespace spectra::acceptance
