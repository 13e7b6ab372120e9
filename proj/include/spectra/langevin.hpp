#pragma once

// Overdamped Langevin dynamics dX = -V'(X)/t ds + sqrt(2) dB, whose invariant
// law is mu_t, and a spectral-gap estimate from observable autocorrelations.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spectra/potential.hpp"
#include "spectra/quadrature.hpp"

namespace spectra {

enum class Observable { gap_eigenfunction, coordinate, custom_nodes };

struct SimConfig {
  double t = 1.0;
  double dt = 1e-2;
  long n_steps = 100000;  // recorded-phase steps per chain
  int n_chains = 16;
  long burn_in = 0;       // raised to at least 10 C_P / dt
  std::uint64_t seed = 1;
  Observable observable = Observable::coordinate;
  int record_every = 1;   // keep every k-th step of the observable
  long max_lag = 0;       // autocorrelation window in records (0: n_records / 10)
  // Each increment is the sum of this many unit draws on a finer clock, so a run
  // with (dt, 2) and one with (dt / 2, 1) share a Brownian path.
  int noise_substeps = 1;
  // Piecewise-linear observable for Observable::custom_nodes.
  std::vector<double> custom_nodes;
  std::vector<double> custom_values;
  // Optional histogram of positions during the recorded phase.
  std::vector<double> histogram_edges;
  GridSpec grid{};
};

struct SimSummary {
  double t;
  double sample_dt;  // dt * record_every
  int n_chains;
  std::vector<std::vector<double>> series;  // observable per chain
  std::vector<double> chain_means;
  std::vector<double> chain_variances;
  double mean;
  double variance;
  double plateau_fraction;               // share of recorded positions in [a, b]
  std::vector<double> autocorrelation;   // pooled over chains, lag 0..max_lag
  std::vector<std::vector<double>> chain_autocorrelation;
  std::vector<long long> histogram;
  long burn_in_used;
  std::vector<std::string> warnings;
};

SimSummary simulate(const PiecewisePotential& pot, const SimConfig& cfg);

struct GapEstimate {
  double c_p_hat;
  double std_error;
  double lag_min;  // fit window in time units
  double lag_max;
};

GapEstimate gap_estimate(const SimSummary& summary);

/// chain,lag,autocorrelation rows; lag in time units, chain "pooled" for the average.
void write_autocorrelation_csv(const SimSummary& summary, std::ostream& out);

/// Standard normal draw for (seed, chain, step), reproducible in any order.
double counter_normal(std::uint64_t seed, std::uint64_t chain, std::uint64_t step);

}  // namespace spectra
