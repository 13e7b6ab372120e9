#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "spectra/errors.hpp"
#include "spectra/langevin.hpp"
#include "spectra/spectral.hpp"

using namespace spectra;
using std::numbers::pi;

namespace {

SimConfig ou_config() {
  SimConfig cfg;
  cfg.t = 1.0;
  cfg.dt = 1e-2;
  cfg.n_steps = 40000;
  cfg.n_chains = 16;
  cfg.seed = 3;
  cfg.record_every = 5;
  cfg.max_lag = 100;
  return cfg;
}

// Upper-tail chi-square quantile (Wilson-Hilferty), enough for a smoke test.
double chi2_quantile(double p_upper, int dof) {
  const double z = p_upper <= 0.001 ? 3.090232 : 2.326348;
  const double k = dof;
  const double c = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * c * c * c;
}

}  // namespace

TEST_CASE("counter-based normals") {
  CHECK(counter_normal(1, 2, 3) == counter_normal(1, 2, 3));
  CHECK(counter_normal(1, 2, 3) != counter_normal(1, 2, 4));
  CHECK(counter_normal(1, 2, 3) != counter_normal(2, 2, 3));
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = counter_normal(11, 0, static_cast<std::uint64_t>(i));
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("identical seeds give identical summaries") {
  const auto pot = potentials::gaussian();
  auto cfg = ou_config();
  cfg.n_steps = 2000;
  const auto a = simulate(pot, cfg);
  const auto b = simulate(pot, cfg);
  CHECK(a.series == b.series);
  CHECK(a.autocorrelation == b.autocorrelation);
  cfg.seed = 4;
  CHECK(simulate(pot, cfg).series != a.series);
}

TEST_CASE("Ornstein-Uhlenbeck stationary variance and gap") {
  const auto s = simulate(potentials::gaussian(), ou_config());
  // Effective sample size: total time / (2 * correlation time).
  const double n_eff = 16 * 400.0 / 2.0;
  CHECK(std::abs(s.variance - 1.0) < 3.0 * std::sqrt(2.0 / n_eff));
  CHECK(std::abs(s.mean) < 3.0 / std::sqrt(n_eff));
  const auto g = gap_estimate(s);
  CHECK(g.c_p_hat == doctest::Approx(1.0).epsilon(0.1));
  CHECK(g.std_error > 0.0);
  CHECK(g.lag_min < g.lag_max);
}

TEST_CASE("plateau occupation and histogram follow mu_t") {
  const auto pot = potentials::counterexample();
  const double t = 1e-2;
  SimConfig cfg;
  cfg.t = t;
  cfg.dt = 1e-3;
  cfg.n_steps = 200000;
  cfg.n_chains = 16;
  cfg.seed = 5;
  cfg.record_every = 2000;  // about two correlation times apart
  cfg.max_lag = 1;
  const double z = partition_function(pot, t);
  std::vector<double> edges{-2.2, -pi / 2, -1.0, -0.5, 0.0, 0.5, 1.0, pi / 2, 2.2};
  cfg.histogram_edges = edges;
  const auto s = simulate(pot, cfg);

  const double p = pi / z;
  const double n = 16.0 * 100.0;
  CHECK(std::abs(s.plateau_fraction - p) < 3.0 * std::sqrt(p * (1 - p) / n));

  long long total = 0;
  for (auto c : s.histogram) total += c;
  double chi2 = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    const double mass = weighted_moment(pot, t, [lo, hi](double x) { return x >= lo && x < hi ? 1.0 : 0.0; });
    const double expected = mass * static_cast<double>(total);
    chi2 += (s.histogram[i] - expected) * (s.histogram[i] - expected) / expected;
  }
  CHECK(chi2 < chi2_quantile(0.001, static_cast<int>(edges.size()) - 2));
}

TEST_CASE("burn-in is raised to the relaxation time") {
  auto cfg = ou_config();
  cfg.n_steps = 100;
  cfg.burn_in = 0;
  const auto s = simulate(potentials::gaussian(), cfg);
  CHECK(s.burn_in_used >= 1000);
  CHECK(!s.warnings.empty());
}

TEST_CASE("errors") {
  auto cfg = ou_config();
  cfg.dt = 0.5;
  CHECK_THROWS_AS(simulate(potentials::gaussian(), cfg), InvalidInput);
  cfg = ou_config();
  cfg.n_steps = 4000;
  cfg.max_lag = 3;
  const auto s = simulate(potentials::gaussian(), cfg);
  CHECK_THROWS_AS(gap_estimate(s), NumericalError);
}

TEST_CASE("autocorrelation CSV") {
  auto cfg = ou_config();
  cfg.n_steps = 1000;
  cfg.n_chains = 2;
  cfg.max_lag = 4;
  const auto s = simulate(potentials::gaussian(), cfg);
  std::ostringstream out;
  write_autocorrelation_csv(s, out);
  const std::string text = out.str();
  CHECK(text.rfind("chain,lag,autocorrelation\npooled,0,1\n", 0) == 0);
}

TEST_CASE("coupled Brownian paths across a dt halving") {
  const auto pot = potentials::gaussian();
  auto coarse = ou_config();
  coarse.n_steps = 2000;
  coarse.burn_in = 1000;
  coarse.noise_substeps = 2;
  coarse.record_every = 1;
  auto fine = coarse;
  fine.dt /= 2;
  fine.noise_substeps = 1;
  fine.n_steps *= 2;
  fine.burn_in *= 2;
  fine.record_every = 2;
  const auto a = simulate(pot, coarse);
  const auto b = simulate(pot, fine);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.series[0].size(); ++i) worst = std::max(worst, std::abs(a.series[0][i] - b.series[0][i]));
  CHECK(worst < 0.05);
}
