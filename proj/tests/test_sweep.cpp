#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "spectra/errors.hpp"
#include "spectra/sweep.hpp"

using namespace spectra;
using std::numbers::pi;

TEST_CASE("temperature grids") {
  const auto g = log_grid(1e-2, 1e-5, 4);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == 1e-2);
  CHECK(g[1] == doctest::Approx(1e-3));
  CHECK(g[3] == 1e-5);
  CHECK(parse_t_grid("1e-2:1e-5:8log").size() == 8);
  CHECK(parse_t_grid("0.1:0.1:1log") == std::vector<double>{0.1});
  CHECK_THROWS_AS(parse_t_grid("1e-2:1e-5:8"), InvalidInput);
  CHECK_THROWS_AS(parse_t_grid("a:1e-5:8log"), InvalidInput);
}

TEST_CASE("power fit on synthetic data") {
  std::vector<double> ts, vs;
  for (double t : log_grid(1e-2, 1e-6, 9)) {
    ts.push_back(t);
    vs.push_back(1.0 + 2.0 * std::sqrt(t));
  }
  const auto fit = power_fit(ts, vs, 1.0);
  CHECK(std::abs(fit.exponent - 0.5) < 1e-10);
  CHECK(std::abs(fit.coefficient - 2.0) < 1e-10);
  CHECK(fit.r_squared == doctest::Approx(1.0));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e-6, 1e-6);
  std::vector<double> noisy = vs;
  for (double& v : noisy) v *= 1.0 + u(rng);
  const auto nf = power_fit(ts, noisy, 1.0);
  CHECK(nf.exponent == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(nf.coefficient == doctest::Approx(2.0).epsilon(1e-2));

  std::vector<double> bad = vs;
  bad[2] = 0.9;
  CHECK_THROWS_AS(power_fit(ts, bad, 1.0), NumericalError);
  CHECK_THROWS_AS(power_fit({1e-2, 1e-3, 1e-4}, {1.2, 1.1, 1.05}, 1.0), NumericalError);
}

TEST_CASE("rows below the noise floor are left out of the fit") {
  std::vector<double> ts{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> vs, noise;
  for (double t : ts) {
    vs.push_back(1.0 + std::sqrt(t));
    noise.push_back(t < 1e-5 ? 1e-3 : 0.0);
  }
  const auto fit = power_fit(ts, vs, 1.0, noise);
  CHECK(fit.ts.size() == 4);
}

TEST_CASE("sweep preconditions and shapes") {
  const auto pot = potentials::counterexample();
  CHECK_THROWS_AS(run_sweep(pot, {1e-3, 1e-2}, {}), InvalidInput);
  CHECK_THROWS_AS(run_sweep(pot, {}, {}), InvalidInput);
  const auto one = run_sweep(pot, {1e-3}, {});
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].z_t.has_value());
  CHECK(one.rows[0].c_p.has_value());
  CHECK(!one.rows[0].c_ls.has_value());
  CHECK(one.rows[0].conjecture.value() == doctest::Approx(1.001));
}

TEST_CASE("complete table, C_LS >= C_P, and concurrent equals serial") {
  const auto pot = potentials::counterexample();
  const auto grid = log_grid(1e-2, 1e-5, 4);
  SweepOptions serial;
  serial.jobs = 1;
  SweepOptions parallel;
  parallel.jobs = 3;
  const Quantities all{.partition = true, .poincare = true, .lsi = true};
  const auto a = run_sweep(pot, grid, all, {}, serial);
  const auto b = run_sweep(pot, grid, all, {}, parallel);
  REQUIRE(a.rows.size() == 4);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& r = a.rows[i];
    CHECK(r.failures.empty());
    CHECK(*r.c_ls >= *r.c_p);
    CHECK(*r.c_ls_lower <= *r.c_ls_upper);
    CHECK(r.c_p == b.rows[i].c_p);
    CHECK(r.c_ls == b.rows[i].c_ls);
    CHECK(r.z_t == b.rows[i].z_t);
  }

  std::ostringstream csv;
  write_csv(a, csv);
  CHECK(csv.str().rfind("t,z_t,c_p,c_ls,c_ls_lower,c_ls_upper,asymptote_p,asymptote_ls,conjecture\n", 0) == 0);
  std::istringstream in(csv.str());
  const auto back = read_csv(in);
  REQUIRE(back.rows.size() == a.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(back.rows[i].t == a.rows[i].t);
    CHECK(back.rows[i].c_p == a.rows[i].c_p);
    CHECK(back.rows[i].c_ls_lower == a.rows[i].c_ls_lower);
  }

  const auto report = refutation_report(pot, a);
  CHECK(report.verdict == Verdict::refuted);
  CHECK(report.ratios.size() == 4);
  CHECK(report.ratios[1].second == doctest::Approx(std::sqrt(8.0 / pi) / std::sqrt(1e-3)).epsilon(0.05));
  CHECK(to_json(report).find("\"verdict\": \"REFUTED\"") != std::string::npos);
}

TEST_CASE("refutation verdicts outside the plateau regime") {
  CHECK(refutation_report(potentials::counterexample(), SweepTable{}).verdict == Verdict::inconclusive);
  const auto gauss = potentials::gaussian();
  const auto table = run_sweep(gauss, {1.0, 0.1, 0.01}, {.partition = false, .poincare = true, .lsi = true});
  const auto report = refutation_report(gauss, table);
  CHECK(report.verdict == Verdict::not_applicable);
  for (const auto& [t, ratio] : report.ratios) CHECK(ratio == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("quantity names") {
  CHECK(parse_quantity("poincare") == Quantity::poincare);
  CHECK(parse_quantity("lsi-lower") == Quantity::lsi_lower);
  CHECK_THROWS_AS(parse_quantity("gap"), InvalidInput);
  CHECK(verdict_name(Verdict::not_refuted) == "NOT-REFUTED");
}
