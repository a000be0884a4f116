#include "kslab/potential.hpp"

#include <cmath>
#include <stdexcept>

#include "kslab/errors.hpp"

namespace kslab {

PotentialDerivatives QuarticPotential::eval(double x) const {
  const double s = x * x - 1.0;
  return {s * s, 4.0 * x * s, 12.0 * x * x - 4.0};
}

const std::string& QuarticPotential::name() const {
  static const std::string n = "quartic";
  return n;
}

SixthOrderPotential::SixthOrderPotential(double b) : b_(b), name_("sixth_order") {
  if (!(b >= 0.0 && b < 2.0))
    throw config_error("sixth_order shape parameter must lie in [0, 2)");
}

PotentialDerivatives SixthOrderPotential::eval(double x) const {
  const double a = 1.0 + b_;
  const double s = x * x - 1.0;
  const double value = s * s * (a + b_ * s);
  const double first = 2.0 * x * s * (2.0 * a + 3.0 * b_ * s);
  const double second =
      4.0 * x * x * (2.0 * a + 6.0 * b_ * s) + 2.0 * s * (2.0 * a + 3.0 * b_ * s);
  return {value, first, second};
}

const std::string& SixthOrderPotential::name() const { return name_; }

std::shared_ptr<const Potential> make_potential(const std::string& name, double shape) {
  if (name == "quartic") return std::make_shared<QuarticPotential>();
  if (name == "sixth_order" || name == "sixth")
    return std::make_shared<SixthOrderPotential>(shape);
  throw config_error("unknown potential: " + name);
}

PotentialDerivatives eval_potential(const Potential& p, double x) {
  if (!std::isfinite(x)) throw std::domain_error("eval_potential: non-finite x");
  return p.eval(x);
}

bool AssumptionReport::core_pass() const {
  for (const auto& c : checks)
    if (!c.advisory && !c.pass) return false;
  return true;
}

bool AssumptionReport::advisory_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

AssumptionReport check_assumptions(const Potential& p, int sample_count, double tol) {
  if (sample_count < 100)
    throw config_error("check_assumptions: need at least 100 samples");
  if (!(tol > 0.0)) throw config_error("check_assumptions: tol must be positive");

  std::vector<double> xs;
  xs.reserve(sample_count + 5);
  for (int i = 0; i < sample_count; ++i)
    xs.push_back(-4.0 + 8.0 * i / (sample_count - 1));
  for (double x : {0.0, 1.0, -1.0, 2.0, -2.0}) xs.push_back(x);

  AssumptionReport rep;
  auto add = [&rep](const std::string& name, double worst, double tol_, bool advisory) {
    rep.checks.push_back({name, worst <= tol_, advisory, worst});
  };

  double even_worst = 0.0, nonneg_worst = 0.0, inner_worst = 0.0, outer_worst = 0.0;
  for (double x : xs) {
    const auto d = p.eval(x);
    const auto m = p.eval(-x);
    even_worst = std::max(even_worst, std::abs(d.value - m.value));
    nonneg_worst = std::max(nonneg_worst, -d.value);
    const double ax = std::abs(x);
    // slope direction, skipping the stationary points themselves
    if (ax > 1e-3 && ax < 1.0 - 1e-3)
      inner_worst = std::max(inner_worst, x * d.first);   // want x H' < 0
    else if (ax > 1.0 + 1e-3)
      outer_worst = std::max(outer_worst, -x * d.first);  // want x H' > 0
  }
  add("even_symmetry", even_worst, tol, false);
  add("nonnegative", nonneg_worst, tol, false);
  add("slope_sign_inner", inner_worst, tol, false);
  add("slope_sign_outer", outer_worst, tol, false);

  const auto at0 = p.eval(0.0);
  const auto at1 = p.eval(1.0);
  const auto atm1 = p.eval(-1.0);
  const auto at2 = p.eval(2.0);
  const auto atm2 = p.eval(-2.0);

  double well_worst = std::max({std::abs(at1.value), std::abs(atm1.value),
                                std::abs(at1.first), std::abs(atm1.first)});
  add("well_zero", well_worst, tol, false);
  add("barrier_normalized", std::max(std::abs(at0.value - 1.0), std::abs(at0.first)),
      tol, false);
  // pass requires H''(0) <= -tol and H''(1) >= tol
  add("curvature_barrier_negative", std::max(0.0, at0.second + 2.0 * tol), tol, false);
  add("curvature_well_positive", std::max(0.0, 2.0 * tol - at1.second), tol, false);
  add("boundary_height", std::max(std::abs(at2.value - 1.0), std::abs(atm2.value - 1.0)),
      tol, true);

  return rep;
}

double derivative_consistency(const Potential& p, const std::vector<double>& points,
                              double h) {
  if (!(h > 0.0)) throw config_error("derivative_consistency: h must be positive");
  double worst = 0.0;
  for (double x : points) {
    if (!std::isfinite(x)) throw std::domain_error("derivative_consistency: non-finite point");
    const auto c = p.eval(x);
    const auto r = p.eval(x + h);
    const auto l = p.eval(x - h);
    worst = std::max(worst, std::abs((r.value - l.value) / (2.0 * h) - c.first));
    worst = std::max(worst, std::abs((r.first - l.first) / (2.0 * h) - c.second));
  }
  return worst;
}

}  // namespace kslab
