#include "spectra/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "spectra/errors.hpp"
#include "spectra/format.hpp"
#include "spectra/kernels.hpp"
#include "spectra/spectral.hpp"

namespace spectra {

namespace {

constexpr std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

void validate(const SimConfig& cfg) {
  if (!(cfg.t > 0.0)) throw InvalidInput("simulation temperature must be > 0");
  if (!(cfg.dt > 0.0)) throw InvalidInput("dt must be > 0");
  if (cfg.n_steps <= 0) throw InvalidInput("n_steps must be > 0");
  if (cfg.n_chains < 2) throw InvalidInput("need at least two chains for error bars");
  if (cfg.record_every < 1) throw InvalidInput("record_every must be >= 1");
  if (cfg.noise_substeps < 1) throw InvalidInput("noise_substeps must be >= 1");
  if (cfg.burn_in < 0 || cfg.max_lag < 0) throw InvalidInput("burn_in and max_lag must be >= 0");
  if (cfg.observable == Observable::custom_nodes &&
      (cfg.custom_nodes.size() < 2 || cfg.custom_nodes.size() != cfg.custom_values.size())) {
    throw InvalidInput("custom observable needs matching nodes and values (at least two)");
  }
  if (!cfg.histogram_edges.empty() &&
      (cfg.histogram_edges.size() < 2 ||
       !std::is_sorted(cfg.histogram_edges.begin(), cfg.histogram_edges.end()))) {
    throw InvalidInput("histogram edges must be sorted with at least two entries");
  }
}

// Autocorrelation of one series around a given mean, normalized by variance.
std::vector<double> autocovariance(const std::vector<double>& y, double mean, long max_lag) {
  const long n = static_cast<long>(y.size());
  std::vector<double> centered(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) centered[i] = y[i] - mean;
  std::vector<double> out(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (long lag = 0; lag <= max_lag && lag < n; ++lag) {
    double s = 0.0;
    for (long i = 0; i + lag < n; ++i) s += centered[i] * centered[i + lag];
    out[lag] = s / static_cast<double>(n - lag);
  }
  return out;
}

struct LineFit {
  double slope;
  bool ok;
};

LineFit fit_log_decay(const std::vector<double>& ac, std::size_t first, std::size_t last, double sample_dt) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t lag = first; lag <= last; ++lag) {
    if (!(ac[lag] > 0.0)) continue;
    const double x = lag * sample_dt;
    const double y = std::log(ac[lag]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return {0.0, false};
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) return {0.0, false};
  return {(m * sxy - sx * sy) / denom, true};
}

}  // namespace

double counter_normal(std::uint64_t seed, std::uint64_t chain, std::uint64_t step) {
  const std::uint64_t key = splitmix(seed ^ splitmix(chain + 0x632be59bd9b4e019ULL));
  const std::uint64_t h1 = splitmix(key ^ (step * 0xd1b54a32d192ed03ULL));
  const std::uint64_t h2 = splitmix(h1);
  const double u1 = to_unit_open(h1);
  const double u2 = to_unit_open(h2);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SimSummary simulate(const PiecewisePotential& pot, const SimConfig& cfg) {
  validate(cfg);
  const double t = cfg.t;
  const auto mesh_nodes = build_nodes(pot, t, cfg.grid);
  double curvature = 0.0;
  for (double x : mesh_nodes) {
    const double h = std::abs(pot.eval_hess(x));
    if (std::isfinite(h)) curvature = std::max(curvature, h);
  }
  if (cfg.dt * curvature / t > 0.1) {
    throw InvalidInput("dt too large for stability: dt * sup|V''| / t = " +
                       format_double(cfg.dt * curvature / t) + " > 0.1");
  }

  SimSummary out{};
  out.t = t;
  out.sample_dt = cfg.dt * cfg.record_every;
  out.n_chains = cfg.n_chains;

  const SpectralResult gap = poincare_constant(pot, t, cfg.grid);
  const long needed = static_cast<long>(std::ceil(10.0 * gap.c_p / cfg.dt));
  out.burn_in_used = std::max(cfg.burn_in, needed);
  if (out.burn_in_used > cfg.burn_in) {
    out.warnings.push_back("burn_in raised from " + std::to_string(cfg.burn_in) + " to " +
                           std::to_string(out.burn_in_used) + " steps (10 C_P / dt)");
  }

  const double lo = pot.plateau_left() - truncation_radius(pot.left_wing(), t, cfg.grid.truncation_threshold) -
                    10.0 * layer_scale(pot.left_wing(), t);
  const double hi = pot.plateau_right() + truncation_radius(pot.right_wing(), t, cfg.grid.truncation_threshold) +
                    10.0 * layer_scale(pot.right_wing(), t);

  const auto observe = [&](double x) {
    switch (cfg.observable) {
      case Observable::coordinate: return x;
      case Observable::gap_eigenfunction: return interpolate(gap.nodes, gap.eigenfunction, x);
      case Observable::custom_nodes: return interpolate(cfg.custom_nodes, cfg.custom_values, x);
    }
    return x;
  };

  const auto chains = static_cast<std::size_t>(cfg.n_chains);
  const long n_records = cfg.n_steps / cfg.record_every;
  out.series.assign(chains, std::vector<double>());
  for (auto& s : out.series) s.reserve(static_cast<std::size_t>(n_records));
  if (!cfg.histogram_edges.empty()) out.histogram.assign(cfg.histogram_edges.size() - 1, 0);

  std::vector<double> x(chains);
  std::vector<double> drift(chains);
  for (std::size_t c = 0; c < chains; ++c) {
    x[c] = pot.plateau_left() + pot.width() * (static_cast<double>(c) + 0.5) / static_cast<double>(chains);
  }
  const auto profile = pot.profile();
  const auto substeps = static_cast<std::uint64_t>(cfg.noise_substeps);
  const double noise = std::sqrt(2.0 * cfg.dt / static_cast<double>(substeps));
  long long in_plateau = 0;
  long long recorded = 0;
  const long total = out.burn_in_used + cfg.n_steps;
  for (long step = 0; step < total; ++step) {
    kernels::gibbs_drift(profile, 1.0 / t, x, drift);
    for (std::size_t c = 0; c < chains; ++c) {
      double xi = 0.0;
      for (std::uint64_t j = 0; j < substeps; ++j) {
        xi += counter_normal(cfg.seed, c, static_cast<std::uint64_t>(step) * substeps + j);
      }
      x[c] += cfg.dt * drift[c] + noise * xi;
      if (!(x[c] >= lo && x[c] <= hi)) {
        throw NumericalError("Langevin chain " + std::to_string(c) + " left the truncated domain at step " +
                             std::to_string(step) + " (x = " + format_double(x[c]) +
                             "); reduce dt");
      }
    }
    const long k = step - out.burn_in_used;
    if (k >= 0 && (k + 1) % cfg.record_every == 0) {
      for (std::size_t c = 0; c < chains; ++c) {
        out.series[c].push_back(observe(x[c]));
        if (x[c] >= pot.plateau_left() && x[c] <= pot.plateau_right()) ++in_plateau;
        if (!out.histogram.empty()) {
          const auto& e = cfg.histogram_edges;
          if (x[c] >= e.front() && x[c] < e.back()) {
            const auto it = std::upper_bound(e.begin(), e.end(), x[c]);
            ++out.histogram[static_cast<std::size_t>(it - e.begin()) - 1];
          }
        }
      }
      recorded += static_cast<long long>(chains);
    }
  }
  out.plateau_fraction = static_cast<double>(in_plateau) / static_cast<double>(recorded);

  double sum = 0.0;
  double count = 0.0;
  for (const auto& s : out.series) {
    const double m = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double v = 0.0;
    for (double y : s) v += (y - m) * (y - m);
    out.chain_means.push_back(m);
    out.chain_variances.push_back(v / static_cast<double>(s.size()));
    sum += std::accumulate(s.begin(), s.end(), 0.0);
    count += static_cast<double>(s.size());
  }
  out.mean = sum / count;
  double var = 0.0;
  for (const auto& s : out.series) {
    for (double y : s) var += (y - out.mean) * (y - out.mean);
  }
  out.variance = var / count;

  const long max_lag = std::min<long>(cfg.max_lag > 0 ? cfg.max_lag : n_records / 10, n_records - 1);
  out.autocorrelation.assign(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (std::size_t c = 0; c < chains; ++c) {
    const auto pooled = autocovariance(out.series[c], out.mean, max_lag);
    for (std::size_t l = 0; l < pooled.size(); ++l) out.autocorrelation[l] += pooled[l] / static_cast<double>(chains);
    auto own = autocovariance(out.series[c], out.chain_means[c], max_lag);
    const double v0 = own[0] > 0.0 ? own[0] : 1.0;
    for (double& a : own) a /= v0;
    out.chain_autocorrelation.push_back(std::move(own));
  }
  const double v0 = out.autocorrelation[0];
  if (v0 > 0.0) {
    for (double& a : out.autocorrelation) a /= v0;
  }
  return out;
}

GapEstimate gap_estimate(const SimSummary& summary) {
  const auto& ac = summary.autocorrelation;
  std::size_t below = ac.size();
  for (std::size_t l = 1; l < ac.size(); ++l) {
    if (ac[l] < 0.05) {
      below = l;
      break;
    }
  }
  if (below == ac.size()) {
    throw NumericalError("autocorrelation never decays below 0.05: window too short");
  }
  std::size_t first = 1;
  while (first < below && ac[first] > 0.9) ++first;
  std::size_t last = first;
  while (last + 1 < below && ac[last + 1] >= 0.1) ++last;
  if (last <= first) throw NumericalError("too few lags with autocorrelation in [0.1, 0.9]");

  const auto fit = fit_log_decay(ac, first, last, summary.sample_dt);
  if (!fit.ok || !(fit.slope < 0.0)) throw NumericalError("autocorrelation does not decay exponentially");

  const std::size_t chains = summary.chain_autocorrelation.size();
  const std::size_t batches = std::min<std::size_t>(chains, 8);
  std::vector<double> estimates;
  for (std::size_t b = 0; b < batches; ++b) {
    std::vector<double> avg(ac.size(), 0.0);
    int members = 0;
    for (std::size_t c = b; c < chains; c += batches) {
      for (std::size_t l = 0; l < ac.size(); ++l) avg[l] += summary.chain_autocorrelation[c][l];
      ++members;
    }
    for (double& a : avg) a /= members;
    const auto bf = fit_log_decay(avg, first, last, summary.sample_dt);
    if (bf.ok && bf.slope < 0.0) estimates.push_back(-1.0 / bf.slope);
  }
  double std_error = std::numeric_limits<double>::infinity();
  if (estimates.size() >= 2) {
    const double m = std::accumulate(estimates.begin(), estimates.end(), 0.0) / static_cast<double>(estimates.size());
    double v = 0.0;
    for (double e : estimates) v += (e - m) * (e - m);
    v /= static_cast<double>(estimates.size() - 1);
    std_error = std::sqrt(v / static_cast<double>(estimates.size()));
  }
  return {-1.0 / fit.slope, std_error, first * summary.sample_dt, last * summary.sample_dt};
}

void write_autocorrelation_csv(const SimSummary& summary, std::ostream& out) {
  out << "chain,lag,autocorrelation\n";
  for (std::size_t l = 0; l < summary.autocorrelation.size(); ++l) {
    out << "pooled," << format_double(l * summary.sample_dt) << ',' << format_double(summary.autocorrelation[l])
        << '\n';
  }
  for (std::size_t c = 0; c < summary.chain_autocorrelation.size(); ++c) {
    const auto& ac = summary.chain_autocorrelation[c];
    for (std::size_t l = 0; l < ac.size(); ++l) {
      out << c << ',' << format_double(l * summary.sample_dt) << ',' << format_double(ac[l]) << '\n';
    }
  }
}

}  // namespace spectra
