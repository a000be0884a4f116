#include "kslab/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kslab/errors.hpp"

namespace kslab {

RateConstant kramers_rate(const Potential& p) {
  const double cb = p.eval(0.0).second;
  const double cw = p.eval(1.0).second;
  if (!(cb < 0.0) || !(cw > 0.0))
    throw config_error("kramers_rate: potential lacks double-well curvature");
  return {std::sqrt(-cb * cw) / std::numbers::pi, cb, cw};
}

double eta(const EpsilonContext& ctx, double x) {
  if (!std::isfinite(x)) throw std::domain_error("eta: non-finite x");
  return ctx.layer->eval_eta(x);
}

double u_tilde(const EpsilonContext& ctx, double u, double x) {
  if (!(u > 0.0 && u < 2.0)) throw std::domain_error("u_tilde: u must lie in (0,2)");
  return 1.0 + (u - 1.0) * eta(ctx, x);
}

LayerIntegral layer_resistance_integral(const EpsilonContext& ctx, double u) {
  if (!(u > 0.0 && u < 2.0))
    throw std::domain_error("layer_resistance_integral: u must lie in (0,2)");
  const RateConstant rate = kramers_rate(*ctx.potential);

  LayerIntegral out;
  if (std::abs(u - 1.0) < 1e-8)
    out.limit = 4.0 / rate.k;  // continuous extension of 2 ln(u/(2-u)) / (k(u-1))
  else
    out.limit = 2.0 * std::log(u / (2.0 - u)) / (rate.k * (u - 1.0));

  auto f = [&](double x) { return 1.0 / u_tilde(ctx, u, x); };
  out.finite_eps = integrate_inverse_gamma(ctx, f, ctx.intervals.J_zero);
  return out;
}

namespace {

double extremal_log_gamma(const EpsilonContext& ctx, const Interval& iv, bool want_max) {
  // endpoint candidates plus a uniform scan; the structure of H makes the
  // extrema land on interval endpoints, the scan guards odd shapes
  const int samples = 512;
  double best = log_gamma(ctx, iv.lo);
  for (int i = 1; i <= samples; ++i) {
    const double x = iv.lo + iv.length() * i / samples;
    const double v = log_gamma(ctx, x);
    best = want_max ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

}  // namespace

const MeasureLimitEntry& MeasureLimitTable::by_name(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw std::out_of_range("measure limit entry not found: " + name);
}

MeasureLimitTable measure_limit_table(const EpsilonContext& ctx) {
  const auto one = [](double) { return 1.0; };
  const RateConstant rate = kramers_rate(*ctx.potential);
  const auto& iv = ctx.intervals;

  double bar_mass = 0.0;
  double bar_sup_lg = -std::numeric_limits<double>::infinity();
  for (const auto& piece : iv.J_bar) {
    if (!(piece.hi > piece.lo)) continue;
    bar_mass += integrate_gamma_weighted(ctx, one, piece);
    bar_sup_lg = std::max(bar_sup_lg, extremal_log_gamma(ctx, piece, true));
  }

  const double inf_lg =
      std::min(extremal_log_gamma(ctx, iv.I_plus, false),
               extremal_log_gamma(ctx, iv.I_minus, false));

  MeasureLimitTable t;
  t.entries.push_back(
      {"int_J_plus_gamma", integrate_gamma_weighted(ctx, one, iv.J_plus), 0.5, false});
  t.entries.push_back({"int_J_bar_gamma", bar_mass, 0.0, false});
  t.entries.push_back({"sup_J_bar_gamma", std::exp(bar_sup_lg), 0.0, false});
  t.entries.push_back(
      {"tau_inv_inf_I_gamma", std::exp(inf_lg - ctx.log_tau), 0.0, true});
  t.entries.push_back({"int_J0_tau_over_gamma",
                       integrate_inverse_gamma(ctx, one, iv.J_zero), 4.0 / rate.k,
                       false});
  t.entries.push_back({"int_I_tau_over_gamma",
                       integrate_inverse_gamma(ctx, one, iv.I_plus) +
                           integrate_inverse_gamma(ctx, one, iv.I_minus),
                       0.0, false});
  return t;
}

}  // namespace kslab
