#pragma once

// Temperature sweeps, power-law fits of C(t) - C(0), and the check of the
// linear-in-t conjecture against measured log-Sobolev constants.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spectra/entropy.hpp"
#include "spectra/potential.hpp"
#include "spectra/quadrature.hpp"

namespace spectra {

enum class Quantity { partition, poincare, lsi, lsi_lower };

Quantity parse_quantity(const std::string& name);  // partition | poincare | lsi | lsi-lower

struct Quantities {
  bool partition = true;
  bool poincare = true;
  bool lsi = false;
};

struct SweepOptions {
  int jobs = 1;
  LsiOptions lsi{};
  bool noise_floor = true;  // estimate discretization error by mesh bisection
  double pl_radius = 10.0;  // window for the PL constant in the conjecture column
};

struct SweepRow {
  double t;
  std::optional<double> z_t;
  std::optional<double> c_p;
  std::optional<double> c_ls;
  std::optional<double> c_ls_lower;
  std::optional<double> c_ls_upper;
  std::optional<double> asymptote_p;
  std::optional<double> asymptote_ls;
  std::optional<double> conjecture;
  double noise_z = 0.0;
  double noise_p = 0.0;
  std::optional<double> residual;
  std::map<std::string, std::string> failures;  // column -> reason
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

/// N log-spaced temperatures from `from` down to `to`.
std::vector<double> log_grid(double from, double to, int n);
/// "A:B:Nlog"
std::vector<double> parse_t_grid(const std::string& spec);

SweepTable run_sweep(const PiecewisePotential& pot, const std::vector<double>& t_grid,
                     const Quantities& quantities, const GridSpec& grid = {}, const SweepOptions& opts = {});

struct FitResult {
  double exponent;
  double coefficient;
  double r_squared;
  std::vector<double> residuals;  // log-space residual per used row
  std::vector<double> ts;         // temperatures of the rows used
};

/// Least squares of log(C - c0) on log t.
FitResult power_fit(const std::vector<double>& ts, const std::vector<double>& values, double c0,
                    const std::vector<double>& noise = {});
FitResult power_fit(const SweepTable& table, Quantity quantity, double c0);

enum class Verdict { refuted, not_refuted, not_applicable, inconclusive };
std::string_view verdict_name(Verdict v);

struct RefutationReport {
  Verdict verdict;
  std::vector<std::pair<double, double>> ratios;  // (t, (c_ls_lower - c0) / (2 C_PL t))
  std::optional<FitResult> fit;
  std::vector<std::string> notes;
};

RefutationReport refutation_report(const PiecewisePotential& pot, const SweepTable& table, double c_pl);
RefutationReport refutation_report(const PiecewisePotential& pot, const SweepTable& table);

void write_csv(const SweepTable& table, std::ostream& out);
/// Reads the columns written by write_csv (empty cells become missing values).
SweepTable read_csv(std::istream& in);

std::string to_json(const FitResult& fit);
std::string to_json(const RefutationReport& report);
std::string to_json(const SweepTable& table);

}  // namespace spectra
