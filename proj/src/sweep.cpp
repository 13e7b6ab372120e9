#include "spectra/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <regex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "spectra/asymptotics.hpp"
#include "spectra/errors.hpp"
#include "spectra/format.hpp"
#include "spectra/spectral.hpp"

namespace spectra {

using nlohmann::json;

namespace {

const char* const kColumns[] = {"t",          "z_t",          "c_p",          "c_ls",      "c_ls_lower",
                                "c_ls_upper", "asymptote_p", "asymptote_ls", "conjecture"};

std::optional<double>* column(SweepRow& row, std::size_t i) {
  switch (i) {
    case 1: return &row.z_t;
    case 2: return &row.c_p;
    case 3: return &row.c_ls;
    case 4: return &row.c_ls_lower;
    case 5: return &row.c_ls_upper;
    case 6: return &row.asymptote_p;
    case 7: return &row.asymptote_ls;
    case 8: return &row.conjecture;
    default: return nullptr;
  }
}

template <class F>
void guarded(SweepRow& row, const std::string& name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    row.failures[name] = e.what();
  }
}

// Everything computed for one temperature; independent of other cells.
SweepRow compute_cell(const PiecewisePotential& pot, double t, const Quantities& want, const GridSpec& grid,
                      const SweepOptions& opts, const std::optional<double>& c_pl,
                      const std::string& c_pl_failure) {
  SweepRow row;
  row.t = t;
  if (want.partition) {
    guarded(row, "z_t", [&] {
      const auto est = partition_function_estimate(pot, t, grid);
      row.z_t = est.value;
      row.noise_z = est.relative_error * est.value;
    });
  }
  if (want.poincare || want.lsi) {
    guarded(row, "c_p", [&] {
      const Assembly problem = assemble(pot, t, grid);
      const SpectralResult gap = solve_gap(problem);
      row.c_p = gap.c_p;
      row.residual = gap.residual;
      if (opts.noise_floor) {
        const auto fine = solve_gap(assemble_on_nodes(pot, t, bisect_nodes(problem.mesh.nodes)));
        row.noise_p = std::abs(fine.c_p - gap.c_p);
      }
      if (want.lsi) {
        guarded(row, "c_ls", [&] {
          LsiResult lsi = maximize_lsi_quotient(problem, gap, opts.lsi);
          row.c_ls = lsi.c_ls;
          row.c_ls_lower = lsi.lower_bound;
          guarded(row, "c_ls_upper", [&] {
            const auto [a, b] = defective_lsi_components(pot, t, grid);
            row.c_ls_upper = rothaus_tighten(a, b, gap.c_p);
          });
        });
      }
    });
  }
  guarded(row, "asymptote_p", [&] {
    if (pot.degenerate()) {
      row.asymptote_p = theorem_cs_limits(pot, opts.pl_radius).poincare_slope * t;
    } else {
      row.asymptote_p = poincare_expansion_1d(pot).evaluate(t);
    }
  });
  guarded(row, "asymptote_ls", [&] {
    if (pot.degenerate()) {
      row.asymptote_ls = theorem_cs_limits(pot, opts.pl_radius).lsi_slope * t;
    } else {
      row.asymptote_ls = lsi_expansion_1d(pot).evaluate(t);
    }
  });
  if (c_pl) {
    row.conjecture = conjecture_prediction(pot, t, *c_pl);
  } else {
    row.failures["conjecture"] = c_pl_failure;
  }
  return row;
}

bool any_value(const SweepRow& row) {
  return row.z_t || row.c_p || row.c_ls;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

Quantity parse_quantity(const std::string& name) {
  if (name == "partition") return Quantity::partition;
  if (name == "poincare") return Quantity::poincare;
  if (name == "lsi") return Quantity::lsi;
  if (name == "lsi-lower" || name == "lsi_lower") return Quantity::lsi_lower;
  throw InvalidInput("unknown quantity '" + name + "' (partition, poincare, lsi, lsi-lower)");
}

std::vector<double> log_grid(double from, double to, int n) {
  if (!(from > 0.0) || !(to > 0.0) || n < 1) throw InvalidInput("log grid needs positive endpoints and n >= 1");
  if (n == 1) return {from};
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = std::log(to / from) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = from * std::exp(step * i);
  out.front() = from;
  out.back() = to;
  return out;
}

std::vector<double> parse_t_grid(const std::string& spec) {
  static const std::regex re(R"(\s*([^:\s]+)\s*:\s*([^:\s]+)\s*:\s*(\d+)\s*log\s*)");
  std::smatch m;
  if (!std::regex_match(spec, m, re)) throw InvalidInput("t-grid: expected A:B:Nlog, got '" + spec + "'");
  try {
    std::size_t used = 0;
    const double a = std::stod(m[1].str(), &used);
    if (used != m[1].str().size()) throw std::invalid_argument("a");
    const double b = std::stod(m[2].str(), &used);
    if (used != m[2].str().size()) throw std::invalid_argument("b");
    return log_grid(a, b, std::stoi(m[3].str()));
  } catch (const InvalidInput&) {
    throw;
  } catch (const std::exception&) {
    throw InvalidInput("t-grid: expected A:B:Nlog, got '" + spec + "'");
  }
}

SweepTable run_sweep(const PiecewisePotential& pot, const std::vector<double>& t_grid, const Quantities& quantities,
                     const GridSpec& grid, const SweepOptions& opts) {
  if (t_grid.empty()) throw InvalidInput("t-grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || !std::isfinite(t_grid[i])) throw InvalidInput("t-grid values must be positive");
    if (i > 0 && !(t_grid[i] < t_grid[i - 1])) throw InvalidInput("t-grid must be strictly decreasing");
  }
  grid.validate();

  std::optional<double> c_pl;
  std::string c_pl_failure;
  try {
    c_pl = pl_constant(pot, opts.pl_radius);
  } catch (const std::exception& e) {
    c_pl_failure = e.what();
  }

  SweepTable table;
  table.rows.resize(t_grid.size());
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(t_grid.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < t_grid.size(); i = next++) {
      table.rows[i] = compute_cell(pot, t_grid[i], quantities, grid, opts, c_pl, c_pl_failure);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (std::none_of(table.rows.begin(), table.rows.end(), any_value)) {
    std::string reason = "every sweep cell failed";
    if (!table.rows.front().failures.empty()) reason += ": " + table.rows.front().failures.begin()->second;
    throw NumericalError(reason);
  }
  return table;
}

FitResult power_fit(const std::vector<double>& ts, const std::vector<double>& values, double c0,
                    const std::vector<double>& noise) {
  if (ts.size() != values.size() || (!noise.empty() && noise.size() != ts.size())) {
    throw InvalidInput("power_fit: mismatched column lengths");
  }
  FitResult fit{};
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double diff = values[i] - c0;
    const double floor = noise.empty() ? 0.0 : noise[i];
    if (diff <= 10.0 * floor) {
      if (diff <= 0.0 && (floor == 0.0 || diff < -10.0 * floor)) {
        throw NumericalError("expansion coefficient nonpositive or below noise at t = " + format_double(ts[i]));
      }
      continue;
    }
    xs.push_back(std::log(ts[i]));
    ys.push_back(std::log(diff));
    fit.ts.push_back(ts[i]);
  }
  const std::size_t m = xs.size();
  if (m < 4) throw NumericalError("power_fit needs at least 4 usable rows, got " + std::to_string(m));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidInput("power_fit needs distinct temperatures");
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.coefficient = std::exp(intercept);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ys[i] - (intercept + fit.exponent * xs[i]);
    fit.residuals.push_back(r);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

FitResult power_fit(const SweepTable& table, Quantity quantity, double c0) {
  std::vector<double> ts, values, noise;
  for (const auto& row : table.rows) {
    std::optional<double> v;
    double floor = row.noise_p;
    switch (quantity) {
      case Quantity::partition:
        v = row.z_t;
        floor = row.noise_z;
        break;
      case Quantity::poincare: v = row.c_p; break;
      case Quantity::lsi: v = row.c_ls; break;
      case Quantity::lsi_lower: v = row.c_ls_lower; break;
    }
    if (!v) continue;
    ts.push_back(row.t);
    values.push_back(*v);
    noise.push_back(floor);
  }
  return power_fit(ts, values, c0, noise);
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::refuted: return "REFUTED";
    case Verdict::not_refuted: return "NOT-REFUTED";
    case Verdict::not_applicable: return "NOT-APPLICABLE";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

RefutationReport refutation_report(const PiecewisePotential& pot, const SweepTable& table, double c_pl) {
  if (!(c_pl > 0.0) || !std::isfinite(c_pl)) throw InvalidInput("PL constant must be finite and > 0");
  RefutationReport report{};
  const double c0 = pot.width() * pot.width() / (std::numbers::pi * std::numbers::pi);
  for (const auto& row : table.rows) {
    if (row.c_ls_lower) report.ratios.emplace_back(row.t, (*row.c_ls_lower - c0) / (2.0 * c_pl * row.t));
  }
  if (pot.degenerate()) {
    report.verdict = Verdict::not_applicable;
    report.notes.push_back(
        "unique minimizer: the conjecture concerns measures with several minimizers; "
        "the ratio tends to 1 in the single-well regime");
    return report;
  }
  if (report.ratios.size() < 3) {
    report.verdict = Verdict::inconclusive;
    report.notes.push_back("fewer than 3 rows with a certified LSI lower bound");
    return report;
  }
  std::vector<double> large;
  for (const auto& [t, r] : report.ratios) {
    if (r > 5.0) large.push_back(r);
  }
  const bool increasing = std::adjacent_find(large.begin(), large.end(),
                                             [](double prev, double cur) { return !(cur > prev); }) == large.end();
  report.verdict = (large.size() >= 3 && increasing) ? Verdict::refuted : Verdict::not_refuted;

  try {
    report.fit = power_fit(table, Quantity::lsi_lower, c0);
    report.notes.push_back("measured exponent " + format_double(report.fit->exponent) +
                           " for C_LS(mu_t) - C_LS(mu_0) versus exponent 1 predicted by C_LS(mu_0) + 2 C_PL t");
  } catch (const std::exception& e) {
    report.notes.push_back(std::string("no power fit: ") + e.what());
  }
  report.notes.push_back(
      "with several minimizers the boundary layers add a sqrt(t) correction, so the ratio to the "
      "linear prediction grows without bound as t -> 0");
  return report;
}

RefutationReport refutation_report(const PiecewisePotential& pot, const SweepTable& table) {
  return refutation_report(pot, table, pl_constant(pot, 10.0));
}

void write_csv(const SweepTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    SweepRow copy = row;
    out << format_double(row.t);
    for (std::size_t i = 1; i < std::size(kColumns); ++i) out << ',' << cell(*column(copy, i));
    out << '\n';
  }
}

SweepTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("csv: empty input");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) header.push_back(name);
  }
  std::vector<int> index(header.size(), -1);
  for (std::size_t h = 0; h < header.size(); ++h) {
    for (std::size_t c = 0; c < std::size(kColumns); ++c) {
      if (header[h] == kColumns[c]) index[h] = static_cast<int>(c);
    }
  }
  if (std::find(index.begin(), index.end(), 0) == index.end()) throw InvalidInput("csv: missing column 't'");
  SweepTable table;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    SweepRow row{};
    std::stringstream ss(line);
    std::string field;
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (!std::getline(ss, field, ',')) field.clear();
      if (index[h] < 0 || field.empty()) continue;
      double v = 0.0;
      try {
        v = std::stod(field);
      } catch (const std::exception&) {
        throw InvalidInput("csv line " + std::to_string(line_no) + ": column " + header[h] + " is not a number");
      }
      if (index[h] == 0) {
        row.t = v;
      } else {
        *column(row, static_cast<std::size_t>(index[h])) = v;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string to_json(const FitResult& fit) {
  json j = {{"exponent", fit.exponent},
            {"coefficient", fit.coefficient},
            {"r_squared", fit.r_squared},
            {"residuals", fit.residuals},
            {"t", fit.ts}};
  return j.dump(2);
}

std::string to_json(const RefutationReport& report) {
  json ratios = json::array();
  for (const auto& [t, r] : report.ratios) ratios.push_back({{"t", t}, {"ratio", r}});
  json j = {{"verdict", std::string(verdict_name(report.verdict))},
            {"ratios", ratios},
            {"fit", report.fit ? json::parse(to_json(*report.fit)) : json(nullptr)},
            {"notes", report.notes}};
  return j.dump(2);
}

std::string to_json(const SweepTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = {{"t", row.t},
              {"z_t", opt_json(row.z_t)},
              {"c_p", opt_json(row.c_p)},
              {"c_ls", opt_json(row.c_ls)},
              {"c_ls_lower", opt_json(row.c_ls_lower)},
              {"c_ls_upper", opt_json(row.c_ls_upper)},
              {"asymptote_p", opt_json(row.asymptote_p)},
              {"asymptote_ls", opt_json(row.asymptote_ls)},
              {"conjecture", opt_json(row.conjecture)}};
    if (!row.failures.empty()) r["failures"] = row.failures;
    rows.push_back(std::move(r));
  }
  return json{{"rows", rows}}.dump(2);
}

}  // namespace spectra
