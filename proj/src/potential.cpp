#include "spectra/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spectra/errors.hpp"

namespace spectra {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_terms(const std::vector<PowerTerm>& terms) {
  if (terms.empty()) throw InvalidInput("wing needs at least one power term");
  for (const auto& term : terms) {
    if (!std::isfinite(term.coefficient) || term.coefficient <= 0.0) {
      throw InvalidInput("wing coefficient must be finite and > 0");
    }
    if (!std::isfinite(term.exponent) || term.exponent <= 0.0) {
      throw InvalidInput("wing exponent must be finite and > 0");
    }
  }
}

std::vector<PowerTerm> normalized(std::vector<PowerTerm> terms) {
  check_terms(terms);
  std::sort(terms.begin(), terms.end(),
            [](const PowerTerm& l, const PowerTerm& r) { return l.exponent < r.exponent; });
  std::vector<PowerTerm> merged;
  for (const auto& term : terms) {
    if (!merged.empty() && merged.back().exponent == term.exponent) {
      merged.back().coefficient += term.coefficient;
    } else {
      merged.push_back(term);
    }
  }
  return merged;
}

// Maximizes f on [lo, hi] by golden-section search.
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, int iterations = 100) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iterations && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

WingSpec::WingSpec(WingKind kind, std::vector<PowerTerm> terms, double upper)
    : kind_(kind), terms_(normalized(std::move(terms))), upper_exponent_(upper) {
  if (!std::isfinite(upper_exponent_) || upper_exponent_ <= 0.0) {
    throw InvalidInput("upper_exponent must be finite and > 0");
  }
}

WingSpec WingSpec::power(double coefficient, double exponent, std::optional<double> upper) {
  return WingSpec(WingKind::power, {{coefficient, exponent}}, upper.value_or(exponent));
}

WingSpec WingSpec::quadratic(double curvature) {
  if (!(curvature > 0.0)) throw InvalidInput("quadratic wing curvature must be > 0");
  return WingSpec(WingKind::quadratic, {{0.5 * curvature, 2.0}}, 2.0);
}

WingSpec WingSpec::series(std::vector<PowerTerm> terms, std::optional<double> upper) {
  check_terms(terms);
  double lead = terms.front().exponent;
  for (const auto& term : terms) lead = std::min(lead, term.exponent);
  return WingSpec(WingKind::series, std::move(terms), upper.value_or(lead));
}

double WingSpec::value(double r) const {
  double v = 0.0;
  for (const auto& term : terms_) v += term.coefficient * std::pow(r, term.exponent);
  return v;
}

double WingSpec::slope(double r) const {
  double d = 0.0;
  for (const auto& term : terms_) {
    const double q = term.exponent - 1.0;
    if (q == 0.0) {
      d += term.coefficient;
    } else if (r > 0.0) {
      d += term.coefficient * term.exponent * std::pow(r, q);
    } else if (q < 0.0) {
      return kInf;
    }
  }
  return d;
}

double WingSpec::curvature(double r) const {
  double d = 0.0;
  for (const auto& term : terms_) {
    const double p = term.exponent;
    const double c = term.coefficient * p * (p - 1.0);
    if (c == 0.0) continue;
    if (p == 2.0) {
      d += c;
    } else if (r > 0.0) {
      d += c * std::pow(r, p - 2.0);
    } else if (p < 2.0) {
      d += c > 0.0 ? kInf : -kInf;
    }
  }
  return d;
}

std::optional<double> WingSpec::junction_curvature() const {
  if (exponent() != 2.0) return std::nullopt;
  return 2.0 * coefficient();
}

double WingSpec::inverse(double level) const {
  if (level <= 0.0) return 0.0;
  if (terms_.size() == 1) return std::pow(level / coefficient(), 1.0 / exponent());
  double hi = 1.0;
  while (value(hi) < level) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) < level ? lo : hi) = mid;
  }
  return hi;
}

WingSpec WingSpec::scaled(double s) const {
  std::vector<PowerTerm> terms = terms_;
  for (auto& term : terms) term.coefficient *= std::pow(s, -term.exponent);
  return WingSpec(kind_, std::move(terms), upper_exponent_);
}

PiecewisePotential::PiecewisePotential(double plateau_left, double plateau_right,
                                       WingSpec left_wing, WingSpec right_wing)
    : a_(plateau_left), b_(plateau_right), left_(std::move(left_wing)), right_(std::move(right_wing)) {
  if (!std::isfinite(a_) || !std::isfinite(b_) || a_ > b_) {
    throw InvalidInput("plateau must be a finite interval [a, b] with a <= b");
  }
}

double PiecewisePotential::distance(double x) const {
  if (x > b_) return x - b_;
  if (x < a_) return a_ - x;
  return 0.0;
}

double PiecewisePotential::eval(double x) const {
  if (x > b_) return right_.value(x - b_);
  if (x < a_) return left_.value(a_ - x);
  return 0.0;
}

double PiecewisePotential::eval_grad(double x) const {
  if (x > b_) return right_.slope(x - b_);
  if (x < a_) return -left_.slope(a_ - x);
  return 0.0;
}

double PiecewisePotential::eval_hess(double x) const {
  if (x >= b_) return right_.curvature(x - b_);
  if (x <= a_) return left_.curvature(a_ - x);
  return 0.0;
}

kernels::PlateauProfile PiecewisePotential::profile() const {
  return {a_, b_, left_.terms(), right_.terms()};
}

PiecewisePotential PiecewisePotential::scaled(double s) const {
  if (!(s > 0.0)) throw InvalidInput("scale factor must be > 0");
  return PiecewisePotential(s * a_, s * b_, left_.scaled(s), right_.scaled(s));
}

namespace potentials {

PiecewisePotential counterexample() {
  const double h = std::numbers::pi / 2.0;
  return PiecewisePotential(-h, h, WingSpec::quadratic(1.0), WingSpec::quadratic(1.0));
}

PiecewisePotential gaussian() {
  return PiecewisePotential(0.0, 0.0, WingSpec::quadratic(1.0), WingSpec::quadratic(1.0));
}

PiecewisePotential asymmetric(double kappa_left, double kappa_right) {
  const double h = std::numbers::pi / 2.0;
  return PiecewisePotential(-h, h, WingSpec::quadratic(kappa_left), WingSpec::quadratic(kappa_right));
}

PiecewisePotential quartic() {
  const double h = std::numbers::pi / 2.0;
  return PiecewisePotential(-h, h, WingSpec::power(1.0, 4.0), WingSpec::power(1.0, 4.0));
}

}  // namespace potentials

double pl_constant(const PiecewisePotential& pot, PlWindow window, int n_samples) {
  if (!(window.r_min >= 0.0) || !(window.r_max > window.r_min) || n_samples < 3) {
    throw InvalidInput("PL window needs 0 <= r_min < r_max and at least 3 samples");
  }
  double best = 0.0;
  for (int side = 0; side < 2; ++side) {
    const WingSpec& wing = side == 0 ? pot.left_wing() : pot.right_wing();
    const auto to_x = [&](double r) {
      return side == 0 ? pot.plateau_left() - r : pot.plateau_right() + r;
    };
    if (std::isinf(window.r_max) && wing.largest_exponent() < 2.0) {
      const double r = 1e6;
      throw PlDivergence("PL inequality fails globally: V/V'^2 grows like r^(2-p) with p = " +
                             std::to_string(wing.largest_exponent()) + " < 2",
                         to_x(r));
    }
    if (window.r_min == 0.0 && wing.exponent() > 2.0) {
      throw PlDivergence("PL ratio unbounded as r -> 0 for growth exponent > 2", to_x(0.0));
    }
    const auto ratio = [&](double r) {
      const double g = wing.slope(r);
      return wing.value(r) / (g * g);
    };
    const double lo = window.r_min > 0.0 ? window.r_min
                                         : 1e-12 * (std::isinf(window.r_max) ? 1.0 : window.r_max);
    const double hi = std::isinf(window.r_max) ? lo * 1e10 : window.r_max;
    const double step = std::log(hi / lo) / (n_samples - 1);
    int arg = 0;
    double arg_val = -1.0;
    for (int i = 0; i < n_samples; ++i) {
      const double val = ratio(lo * std::exp(step * i));
      if (val > arg_val) {
        arg_val = val;
        arg = i;
      }
    }
    const double left = lo * std::exp(step * std::max(0, arg - 1));
    const double right = std::min(hi, lo * std::exp(step * std::min(n_samples - 1, arg + 1)));
    const auto [r_star, refined] = golden_max(ratio, left, right);
    (void)r_star;
    best = std::max({best, arg_val, refined});
  }
  return best;
}

double pl_constant(const PiecewisePotential& pot, double search_radius, int n_samples) {
  return pl_constant(pot, PlWindow{1e-3 * search_radius, search_radius}, n_samples);
}

GrowthCheck quadratic_growth_check(const PiecewisePotential& pot, double c_pl,
                                   const std::vector<double>& xs) {
  if (!(c_pl > 0.0)) throw InvalidInput("c_pl must be > 0");
  GrowthCheck out{true, std::numeric_limits<double>::quiet_NaN(), kInf};
  for (double x : xs) {
    const double d = pot.distance(x);
    const double bound = d * d / (4.0 * c_pl);
    const double v = pot.eval(x);
    const double scale = std::max({v, bound, std::numeric_limits<double>::min()});
    const double margin = (v - bound) / scale;
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_x = x;
    }
    if (bound > v + 1e-12 * scale) out.holds = false;
  }
  return out;
}

bool gradient_flow_decay_check(const PiecewisePotential& pot, double c_pl, double y0,
                               double horizon, double dt) {
  if (!(c_pl > 0.0) || !(dt > 0.0) || !(horizon >= 0.0)) {
    throw InvalidInput("gradient flow check needs c_pl > 0, dt > 0, horizon >= 0");
  }
  const double h0 = std::abs(pot.eval_hess(y0));
  if (std::isfinite(h0) && dt * h0 > 0.1) {
    throw InvalidInput("gradient flow step too large: dt * |V''(y0)| > 0.1");
  }
  const double v0 = pot.eval(y0);
  if (v0 == 0.0) return true;
  const auto field = [&](double y) { return -pot.eval_grad(y); };
  double y = y0;
  double v_prev = v0;
  const auto steps = static_cast<long>(std::ceil(horizon / dt));
  for (long k = 1; k <= steps; ++k) {
    const double k1 = field(y);
    const double k2 = field(y + 0.5 * dt * k1);
    const double k3 = field(y + 0.5 * dt * k2);
    const double k4 = field(y + dt * k3);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double v = pot.eval(y);
    if (!std::isfinite(v) || v > v_prev * (1.0 + 1e-12)) {
      throw NumericalError("gradient flow unstable: V increased at step " + std::to_string(k));
    }
    const double s = dt * static_cast<double>(k);
    if (v > std::exp(-s / c_pl) * v0 * (1.0 + 1e-6)) return false;
    v_prev = v;
  }
  return true;
}

std::vector<AssumptionCheck> validate_assumptions(const PiecewisePotential& pot) {
  std::vector<AssumptionCheck> report;
  const auto describe = [](const char* side, double value) {
    std::ostringstream os;
    os << side << " = " << value;
    return os.str();
  };

  report.push_back({"argmin is a bounded interval [a, b] with a < b", pot.width() > 0.0,
                    describe("b - a", pot.width())});

  bool positive = true;
  for (const WingSpec* wing : {&pot.left_wing(), &pot.right_wing()}) {
    for (const auto& term : wing->terms()) positive = positive && term.coefficient > 0.0;
  }
  report.push_back({"coefficients positive", positive, positive ? "" : "non-positive coefficient"});

  // Convexity: V'' >= 0 on sampled wing points and V' nondecreasing, including
  // across the junction (plateau slope is 0).
  bool convex = true;
  std::string convex_detail;
  for (int side = 0; side < 2; ++side) {
    const WingSpec& wing = side == 0 ? pot.left_wing() : pot.right_wing();
    double prev_slope = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double r = 1e-8 * std::pow(10.0, 10.0 * i / 400.0);
      const double s = wing.slope(r);
      const double c = wing.curvature(r);
      if (c < 0.0 || s < prev_slope * (1.0 - 1e-12) || s < 0.0) {
        convex = false;
        convex_detail = describe(side == 0 ? "violated on left wing at r" : "violated on right wing at r", r);
        break;
      }
      prev_slope = s;
    }
  }
  report.push_back({"V convex", convex, convex_detail});

  const double al = pot.left_wing().exponent();
  const double ar = pot.right_wing().exponent();
  report.push_back({"α ≥ 1", al >= 1.0 && ar >= 1.0,
                    describe("alpha_left", al) + ", " + describe("alpha_right", ar)});
  report.push_back({"α < 2β",
                    al < 2.0 * pot.left_wing().upper_exponent() &&
                        ar < 2.0 * pot.right_wing().upper_exponent(),
                    describe("beta_left", pot.left_wing().upper_exponent()) + ", " +
                        describe("beta_right", pot.right_wing().upper_exponent())});
  report.push_back({"V is C1 at the plateau ends", al > 1.0 && ar > 1.0,
                    "requires growth exponent > 1 on both wings"});
  return report;
}

bool all_passed(const std::vector<AssumptionCheck>& report) {
  return std::all_of(report.begin(), report.end(), [](const auto& c) { return c.passed; });
}

}  // namespace spectra
