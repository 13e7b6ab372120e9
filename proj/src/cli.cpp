#include "spectra/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "spectra/acceptance.hpp"
#include "spectra/asymptotics.hpp"
#include "spectra/config.hpp"
#include "spectra/errors.hpp"
#include "spectra/format.hpp"
#include "spectra/langevin.hpp"
#include "spectra/sweep.hpp"

namespace spectra::cli {

namespace {

using nlohmann::json;

// Everything a command needs; filled from --config first, then from flags.
struct Settings {
  std::string command;
  std::string potential = "counterexample";
  std::optional<json> potential_doc;  // inline definition from a dumped config
  std::optional<double> t;
  std::vector<double> t_grid;
  GridSpec grid;
  std::uint64_t seed = LsiOptions{}.seed;
  std::string format;
  std::string output;
  int jobs = 1;
  // sweep / fit / report
  std::vector<std::string> quantities{"partition", "poincare"};
  std::string fit;
  std::string input;
  std::optional<double> c0;
  std::optional<double> c_pl;
  bool noise_floor = true;
  // simulate
  double dt = 1e-3;
  long steps = 200000;
  int chains = 16;
  long burn_in = 0;
  std::string observable = "coordinate";
  int record_every = 1;
  long max_lag = 0;
  // verify
  std::string suite = "paper";
  std::vector<int> only;
  bool statistical = true;
};

int default_jobs() {
  if (const char* env = std::getenv("SPECTRA_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw InvalidInput("SPECTRA_JOBS: expected a positive integer, got '" + std::string(env) + "'");
  }
  return 1;
}

json settings_to_json(const Settings& s, const PiecewisePotential& pot) {
  json j = {{"command", s.command},
            {"potential", potential_to_json(pot)},
            {"grid",
             {{"tau", s.grid.truncation_threshold},
              {"n_plateau", s.grid.n_plateau},
              {"layer_cells", s.grid.layer_cells_per_scale},
              {"ratio", s.grid.refinement_ratio}}},
            {"seed", s.seed},
            {"format", s.format},
            {"quantities", s.quantities},
            {"noise_floor", s.noise_floor}};
  if (s.t) j["t"] = *s.t;
  if (!s.t_grid.empty()) j["t_grid"] = s.t_grid;
  if (!s.fit.empty()) j["fit"] = s.fit;
  if (s.c0) j["c0"] = *s.c0;
  if (s.c_pl) j["c_pl"] = *s.c_pl;
  if (s.command == "simulate") {
    j["simulate"] = {{"dt", s.dt},
                     {"steps", s.steps},
                     {"chains", s.chains},
                     {"burn_in", s.burn_in},
                     {"observable", s.observable},
                     {"record_every", s.record_every},
                     {"max_lag", s.max_lag}};
  }
  return j;
}

template <class T>
void read_field(const json& j, const char* key, T& into, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(where + key + ": wrong type");
  }
}

void apply_config_file(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("config: " + path + ": " + e.what());
  }
  if (j.contains("potential")) {
    if (j["potential"].is_string()) {
      s.potential = j["potential"].get<std::string>();
    } else {
      s.potential_doc = j["potential"];
    }
  }
  if (j.contains("t")) {
    double t = 0.0;
    read_field(j, "t", t, "config.");
    s.t = t;
  }
  read_field(j, "t_grid", s.t_grid, "config.");
  if (j.contains("grid")) {
    const json& g = j["grid"];
    read_field(g, "tau", s.grid.truncation_threshold, "config.grid.");
    read_field(g, "n_plateau", s.grid.n_plateau, "config.grid.");
    read_field(g, "layer_cells", s.grid.layer_cells_per_scale, "config.grid.");
    read_field(g, "ratio", s.grid.refinement_ratio, "config.grid.");
  }
  read_field(j, "seed", s.seed, "config.");
  read_field(j, "format", s.format, "config.");
  read_field(j, "quantities", s.quantities, "config.");
  read_field(j, "noise_floor", s.noise_floor, "config.");
  read_field(j, "fit", s.fit, "config.");
  if (j.contains("c0")) {
    double c0 = 0.0;
    read_field(j, "c0", c0, "config.");
    s.c0 = c0;
  }
  if (j.contains("c_pl")) {
    double c_pl = 0.0;
    read_field(j, "c_pl", c_pl, "config.");
    s.c_pl = c_pl;
  }
  if (j.contains("simulate")) {
    const json& m = j["simulate"];
    read_field(m, "dt", s.dt, "config.simulate.");
    read_field(m, "steps", s.steps, "config.simulate.");
    read_field(m, "chains", s.chains, "config.simulate.");
    read_field(m, "burn_in", s.burn_in, "config.simulate.");
    read_field(m, "observable", s.observable, "config.simulate.");
    read_field(m, "record_every", s.record_every, "config.simulate.");
    read_field(m, "max_lag", s.max_lag, "config.simulate.");
  }
}

PiecewisePotential resolve_potential(const Settings& s) {
  if (s.potential_doc) return potential_from_json(*s.potential_doc);
  return load_potential(s.potential);
}

void emit(const Settings& s, const std::string& text, std::ostream& out) {
  if (s.output.empty() || s.output == "-") {
    out << text;
    return;
  }
  std::ofstream file(s.output);
  if (!file) throw InvalidInput("output: cannot write '" + s.output + "'");
  file << text;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string table_text(const SweepTable& table, const std::string& format) {
  if (format == "csv") {
    std::ostringstream ss;
    write_csv(table, ss);
    return ss.str();
  }
  return to_json(table) + "\n";
}

Quantities parse_quantities(const std::vector<std::string>& names) {
  Quantities q{.partition = false, .poincare = false, .lsi = false};
  for (const auto& n : names) {
    switch (parse_quantity(n)) {
      case Quantity::partition: q.partition = true; break;
      case Quantity::poincare: q.poincare = true; break;
      case Quantity::lsi:
      case Quantity::lsi_lower: q.lsi = true; break;
    }
  }
  return q;
}

SweepOptions sweep_options(const Settings& s) {
  SweepOptions o;
  o.jobs = s.jobs;
  o.noise_floor = s.noise_floor;
  o.lsi.seed = s.seed;
  return o;
}

double require_t(const Settings& s) {
  if (!s.t) throw InvalidInput("--t is required for " + s.command);
  if (!(*s.t > 0.0) || !std::isfinite(*s.t)) throw InvalidInput("--t must be positive");
  return *s.t;
}

const std::vector<double>& require_grid(const Settings& s) {
  if (s.t_grid.empty()) throw InvalidInput("--t-grid is required for " + s.command);
  return s.t_grid;
}

int run_analyze(const Settings& s, const PiecewisePotential& pot, std::ostream& out) {
  const double t = require_t(s);
  const auto table =
      run_sweep(pot, {t}, {.partition = true, .poincare = true, .lsi = true}, s.grid, sweep_options(s));
  if (s.format == "csv") {
    emit(s, table_text(table, "csv"), out);
    return 0;
  }
  const SweepRow& row = table.rows.front();
  json j = {{"t", t},
            {"z_t", opt(row.z_t)},
            {"c_p", opt(row.c_p)},
            {"residual", opt(row.residual)},
            {"c_ls", opt(row.c_ls)},
            {"c_ls_lower", opt(row.c_ls_lower)},
            {"c_ls_upper", opt(row.c_ls_upper)},
            {"asymptote_p", opt(row.asymptote_p)},
            {"asymptote_ls", opt(row.asymptote_ls)},
            {"conjecture", opt(row.conjecture)},
            {"noise_z", row.noise_z},
            {"noise_p", row.noise_p}};
  if (!row.failures.empty()) j["failures"] = row.failures;
  emit(s, j.dump(2) + "\n", out);
  return 0;
}

int run_sweep_command(const Settings& s, const PiecewisePotential& pot, std::ostream& out, std::ostream& err) {
  Quantities q = parse_quantities(s.quantities);
  std::optional<Quantity> fit_q;
  if (!s.fit.empty()) {
    fit_q = parse_quantity(s.fit);
    if (*fit_q == Quantity::partition) q.partition = true;
    if (*fit_q == Quantity::poincare) q.poincare = true;
    if (*fit_q == Quantity::lsi || *fit_q == Quantity::lsi_lower) q.lsi = true;
  }
  const auto table = run_sweep(pot, require_grid(s), q, s.grid, sweep_options(s));
  std::optional<FitResult> fit;
  std::string fit_error;
  if (fit_q) {
    const double c0 = s.c0 ? *s.c0 : (*fit_q == Quantity::partition ? pot.width()
                                                                     : pot.width() * pot.width() /
                                                                           (std::numbers::pi * std::numbers::pi));
    try {
      fit = power_fit(table, *fit_q, c0);
    } catch (const NumericalError& e) {
      fit_error = e.what();
    }
  }
  if (s.format == "json") {
    json j = json::parse(to_json(table));
    if (fit) j["fit"] = json::parse(to_json(*fit));
    if (!fit_error.empty()) j["fit_error"] = fit_error;
    emit(s, j.dump(2) + "\n", out);
  } else {
    emit(s, table_text(table, "csv"), out);
    std::ostream& side = (s.output.empty() || s.output == "-") ? err : out;
    if (fit) side << to_json(*fit) << '\n';
  }
  if (!fit_error.empty()) {
    err << "fit failed: " << fit_error << '\n';
    return 1;
  }
  return 0;
}

SweepTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("input: cannot open '" + path + "'");
  return read_csv(in);
}

int run_fit(const Settings& s, std::ostream& out) {
  if (s.input.empty()) throw InvalidInput("--input is required for fit");
  const auto table = read_table(s.input);
  const Quantity q = parse_quantity(s.fit.empty() ? "poincare" : s.fit);
  double c0 = 0.0;
  if (s.c0) {
    c0 = *s.c0;
  } else {
    const auto pot = resolve_potential(s);
    c0 = q == Quantity::partition ? pot.width()
                                  : pot.width() * pot.width() / (std::numbers::pi * std::numbers::pi);
  }
  emit(s, to_json(power_fit(table, q, c0)) + "\n", out);
  return 0;
}

int run_report(const Settings& s, const PiecewisePotential& pot, std::ostream& out) {
  SweepTable table;
  if (!s.input.empty()) {
    table = read_table(s.input);
  } else {
    const std::vector<double> grid = s.t_grid.empty() ? parse_t_grid("1e-3:1e-5:5log") : s.t_grid;
    table = run_sweep(pot, grid, {.partition = false, .poincare = true, .lsi = true}, s.grid, sweep_options(s));
  }
  const auto report = s.c_pl ? refutation_report(pot, table, *s.c_pl) : refutation_report(pot, table);
  if (s.format == "csv") {
    std::ostringstream ss;
    ss << "t,ratio\n";
    for (const auto& [t, r] : report.ratios) ss << format_double(t) << ',' << format_double(r) << '\n';
    emit(s, ss.str(), out);
  } else {
    emit(s, to_json(report) + "\n", out);
  }
  return 0;
}

Observable parse_observable(const std::string& name) {
  if (name == "coordinate") return Observable::coordinate;
  if (name == "gap-eigenfunction" || name == "gap_eigenfunction") return Observable::gap_eigenfunction;
  throw InvalidInput("observable: expected coordinate or gap-eigenfunction, got '" + name + "'");
}

int run_simulate(const Settings& s, const PiecewisePotential& pot, std::ostream& out) {
  SimConfig cfg;
  cfg.t = require_t(s);
  cfg.dt = s.dt;
  cfg.n_steps = s.steps;
  cfg.n_chains = s.chains;
  cfg.burn_in = s.burn_in;
  cfg.seed = s.seed;
  cfg.observable = parse_observable(s.observable);
  cfg.record_every = s.record_every;
  cfg.max_lag = s.max_lag;
  cfg.grid = s.grid;
  const auto summary = simulate(pot, cfg);
  if (s.format == "csv") {
    std::ostringstream ss;
    write_autocorrelation_csv(summary, ss);
    emit(s, ss.str(), out);
    return 0;
  }
  json j = {{"t", summary.t},
            {"n_chains", summary.n_chains},
            {"sample_dt", summary.sample_dt},
            {"burn_in_used", summary.burn_in_used},
            {"mean", summary.mean},
            {"variance", summary.variance},
            {"plateau_fraction", summary.plateau_fraction},
            {"warnings", summary.warnings}};
  int code = 0;
  try {
    const auto gap = gap_estimate(summary);
    j["gap_estimate"] = {{"c_p_hat", gap.c_p_hat},
                         {"std_error", gap.std_error},
                         {"lag_min", gap.lag_min},
                         {"lag_max", gap.lag_max}};
  } catch (const NumericalError& e) {
    j["gap_estimate"] = {{"error", e.what()}};
    code = 1;
  }
  emit(s, j.dump(2) + "\n", out);
  return code;
}

int run_verify(const Settings& s, std::ostream& out) {
  if (s.suite != "paper") throw InvalidInput("suite: only 'paper' is available, got '" + s.suite + "'");
  acceptance::SuiteOptions opts;
  opts.jobs = s.jobs;
  opts.statistical = s.statistical;
  opts.only = s.only;
  const auto results = acceptance::run_suite(opts, out);
  int failed = 0;
  json j = json::array();
  for (const auto& r : results) {
    if (!r.passed) ++failed;
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back({{"text", c.text}, {"passed", c.passed}});
    j.push_back({{"id", r.id},
                 {"title", r.title},
                 {"passed", r.passed},
                 {"seconds", r.seconds},
                 {"checks", checks},
                 {"error", r.error}});
  }
  out << (results.size() - failed) << " of " << results.size() << " criteria passed\n";
  if (!s.output.empty() && s.output != "-") emit(s, j.dump(2) + "\n", out);
  return failed == 0 ? 0 : 1;
}

// Flags shared by every subcommand.
void add_common(CLI::App* sub, Settings& s, std::string& config_path, std::string& dump_path,
                std::string& t_grid_spec, std::optional<double>& t_flag) {
  sub->add_option("--potential", s.potential, "built-in name or .toml/.json file");
  sub->add_option("--config", config_path, "settings written by --dump-config");
  sub->add_option("--dump-config", dump_path, "write the effective settings as JSON");
  sub->add_option("--t", t_flag, "temperature");
  sub->add_option("--t-grid", t_grid_spec, "A:B:Nlog, N log-spaced temperatures from A down to B");
  sub->add_option("--tau", s.grid.truncation_threshold, "truncate where V / t exceeds tau");
  sub->add_option("--n-plateau", s.grid.n_plateau, "uniform cells on the plateau");
  sub->add_option("--layer-cells", s.grid.layer_cells_per_scale, "cells per boundary-layer width");
  sub->add_option("--ratio", s.grid.refinement_ratio, "geometric growth of wing cells");
  sub->add_option("--output,-o", s.output, "output file (default stdout)");
  sub->add_option("--seed", s.seed, "random seed");
  sub->add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--jobs,-j", s.jobs, "concurrent workers (default $SPECTRA_JOBS or 1)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  std::string config_path;
  std::string dump_path;
  std::string t_grid_spec;
  std::optional<double> t_flag;

  CLI::App app{"Poincare and log-Sobolev constants of low-temperature Gibbs measures on plateau potentials",
               "spectra"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "spectra 0.1.0");

  std::vector<CLI::App*> subs;
  auto* analyze = app.add_subcommand("analyze", "constants, brackets and asymptotes at one temperature");
  auto* sweep = app.add_subcommand("sweep", "table over a temperature grid, optional power fit");
  auto* fit = app.add_subcommand("fit", "power fit of C(t) - c0 from a sweep CSV");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  auto* sim = app.add_subcommand("simulate", "overdamped Langevin run and autocorrelation gap estimate");
  auto* report = app.add_subcommand("report", "linear-in-t conjecture check from LSI lower bounds");
  subs = {analyze, sweep, fit, verify, sim, report};

  try {
    s.jobs = default_jobs();
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  for (auto* sub : subs) add_common(sub, s, config_path, dump_path, t_grid_spec, t_flag);
  for (auto* sub : {sweep, fit, report}) {
    sub->add_option("--c0", s.c0, "C(0); default (b - a)^2 / pi^2, or b - a for the partition function");
  }
  sweep->add_option("--quantities", s.quantities, "partition, poincare, lsi")->delimiter(',');
  sweep->add_option("--fit", s.fit, "fit this column: partition, poincare, lsi, lsi-lower");
  sweep->add_flag("!--no-noise-floor", s.noise_floor, "skip the mesh-bisection error estimate");
  fit->add_option("--input,-i", s.input, "CSV written by sweep")->check(CLI::ExistingFile);
  fit->add_option("--quantity,--fit", s.fit, "column to fit (default poincare)");
  report->add_option("--input,-i", s.input, "CSV written by sweep with c_ls_lower")->check(CLI::ExistingFile);
  report->add_option("--c-pl", s.c_pl, "PL constant (default: sampled on a radius-10 window)");
  sim->add_option("--dt", s.dt, "time step");
  sim->add_option("--steps", s.steps, "recorded steps per chain");
  sim->add_option("--chains", s.chains, "independent chains");
  sim->add_option("--burn-in", s.burn_in, "discarded steps (raised to 10 C_P / dt)");
  sim->add_option("--observable", s.observable, "coordinate or gap-eigenfunction");
  sim->add_option("--record-every", s.record_every, "keep every k-th step");
  sim->add_option("--max-lag", s.max_lag, "autocorrelation window in records");
  verify->add_option("--suite", s.suite, "acceptance suite name")->check(CLI::IsMember({"paper"}));
  verify->add_option("--only", s.only, "run only these criterion numbers")->delimiter(',');
  verify->add_flag("!--skip-statistical", s.statistical, "skip the Langevin criterion");

  // Settings from --config are loaded before parsing so that explicit flags win.
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
      if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }
    if (!config_path.empty()) apply_config_file(config_path, s);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  const bool potential_from_config = s.potential_doc.has_value();
  const std::string config_potential = s.potential;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    for (auto* sub : subs) {
      if (sub->parsed()) s.command = sub->get_name();
    }
    if (potential_from_config && s.potential != config_potential) s.potential_doc.reset();
    if (t_flag) s.t = t_flag;
    if (!t_grid_spec.empty()) s.t_grid = parse_t_grid(t_grid_spec);
    if (s.format.empty()) s.format = (s.command == "sweep" || s.command == "simulate") ? "csv" : "json";
    s.grid.validate();

    if (s.command == "verify") return run_verify(s, out);
    if (s.command == "fit" && s.c0 && dump_path.empty()) return run_fit(s, out);

    const auto pot = resolve_potential(s);
    if (!dump_path.empty()) {
      std::ofstream dump(dump_path);
      if (!dump) throw InvalidInput("dump-config: cannot write '" + dump_path + "'");
      dump << settings_to_json(s, pot).dump(2) << '\n';
    }
    if (s.command == "analyze") return run_analyze(s, pot, out);
    if (s.command == "sweep") return run_sweep_command(s, pot, out, err);
    if (s.command == "fit") return run_fit(s, out);
    if (s.command == "simulate") return run_simulate(s, pot, out);
    if (s.command == "report") return run_report(s, pot, out);
    throw InvalidInput("unknown command");
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace spectra::cli
