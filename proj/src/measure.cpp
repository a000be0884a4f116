#include "kslab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kslab/errors.hpp"

namespace kslab {

double TransitionLayer::eval_eta(double xq) const {
  if (xq >= 1.0) return 1.0;
  if (xq <= -1.0) return -1.0;
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  const size_t hi = static_cast<size_t>(it - x.begin());
  const size_t lo = hi - 1;
  const double t = (xq - x[lo]) / (x[hi] - x[lo]);
  const double c = cum[lo] + t * (cum[hi] - cum[lo]);
  return std::clamp(c / half_mass, -1.0, 1.0);
}

namespace {

// H(x_return) = H(0) on x > 1; exists because H increases beyond the well.
double find_return_point(const Potential& p) {
  const double barrier = p.eval(0.0).value;
  double hi = 1.5;
  while (p.eval(hi).value < barrier) {
    hi *= 2.0;
    if (hi > 1e3) throw config_error("potential never regains barrier height beyond the well");
  }
  double lo = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (p.eval(mid).value < barrier ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::shared_ptr<const TransitionLayer> build_layer(const EpsilonContext& ctx) {
  // Graded nodes on [0,1]; the crossing weight tau/gamma is a spike of width
  // ~eps/2 at the barrier.
  const int n_half = 2048;
  const double scale = std::max(ctx.epsilon / 4.0, 1e-3);
  std::vector<double> pos =
      graded_nodes(0.0, 1.0, n_half, {{0.0, scale, 40.0}});

  auto q = [&ctx](double x) {
    return std::exp(ctx.log_tau - log_gamma(ctx, x));
  };

  // per-segment Gauss so the prefix sums are quadrature-accurate
  const GaussRule& g = gauss_legendre(8);
  std::vector<double> prefix(pos.size(), 0.0);
  for (size_t i = 1; i < pos.size(); ++i) {
    const double a = pos[i - 1], b = pos[i];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (size_t j = 0; j < g.x.size(); ++j) s += g.w[j] * q(c + h * g.x[j]);
    prefix[i] = prefix[i - 1] + s * h;
  }

  auto layer = std::make_shared<TransitionLayer>();
  const size_t m = pos.size();
  layer->x.resize(2 * m - 1);
  layer->cum.resize(2 * m - 1);
  for (size_t i = 0; i < m; ++i) {
    layer->x[m - 1 + i] = pos[i];
    layer->cum[m - 1 + i] = prefix[i];
    layer->x[m - 1 - i] = -pos[i];
    layer->cum[m - 1 - i] = -prefix[i];
  }
  layer->half_mass = prefix[m - 1];
  if (!(layer->half_mass > 0.0) || !std::isfinite(layer->half_mass))
    throw numerical_error("transition layer: degenerate crossing mass");
  return layer;
}

}  // namespace

EpsilonContext make_context(std::shared_ptr<const Potential> p, double epsilon,
                            double alpha, double domain_half_width,
                            const QuadratureSettings& quad) {
  if (!p) throw config_error("make_context: null potential");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw config_error("epsilon must lie in (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("alpha must lie in (0,1)");
  // Disjoint well windows need eps^alpha < 1; the barrier window may overlap
  // them at desk-scale eps, which only blurs the asymptotic bookkeeping.
  const double w = std::pow(epsilon, alpha);
  if (!(w < 1.0))
    throw config_error("window too wide: need eps^alpha < 1");
  if (!(domain_half_width >= 2.5))
    throw config_error("domain half-width must be at least 2.5");

  if (!check_assumptions(*p).core_pass())
    throw config_error("potential fails the double-well assumptions");

  EpsilonContext ctx;
  ctx.potential = std::move(p);
  ctx.epsilon = epsilon;
  ctx.alpha = alpha;
  ctx.domain_half_width = domain_half_width;
  ctx.quad = quad;

  ctx.log_tau = -2.0 * std::log(epsilon) - 1.0 / (epsilon * epsilon);
  ctx.tau = std::exp(ctx.log_tau);
  if (ctx.tau <= 0.0)
    throw numerical_error("tau underflows at this epsilon");

  ctx.x_return = find_return_point(*ctx.potential);
  if (!(2.0 * w < ctx.x_return))
    throw config_error("window too wide for the slope region: need 2 eps^alpha < x_return");
  if (!(domain_half_width > ctx.x_return))
    throw config_error("domain must contain the return point of the potential");

  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  auto weight = [&](double x) { return std::exp(-ctx.potential->eval(x).value * inv_eps2); };
  const double L = domain_half_width;
  const double Z = integrate(weight, -L, L, {-1.0, 0.0, 1.0}, quad);
  if (!(Z > 0.0)) throw numerical_error("partition integral vanished");
  ctx.log_partition = std::log(Z);

  ctx.intervals.J_plus = {1.0 - w, 1.0 + w};
  ctx.intervals.J_minus = {-1.0 - w, -1.0 + w};
  ctx.intervals.J_zero = {-w, w};
  ctx.intervals.I_plus = {w, ctx.x_return - w};
  ctx.intervals.I_minus = {-(ctx.x_return - w), -w};
  ctx.intervals.J_bar = {{-L, -1.0 - w}, {-1.0 + w, 1.0 - w}, {1.0 + w, L}};

  ctx.layer = build_layer(ctx);
  return ctx;
}

double log_gamma(const EpsilonContext& ctx, double x) {
  if (!std::isfinite(x) || std::abs(x) > ctx.domain_half_width + 1e-12)
    throw std::domain_error("log_gamma: point outside the truncated domain");
  const double inv_eps2 = 1.0 / (ctx.epsilon * ctx.epsilon);
  return -ctx.potential->eval(x).value * inv_eps2 - ctx.log_partition;
}

double asymptotic_partition(const Potential& p, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw config_error("asymptotic_partition: epsilon must lie in (0,1)");
  const double curb = p.eval(1.0).second;
  if (!(curb > 0.0))
    throw std::domain_error("asymptotic_partition: well curvature must be positive");
  return epsilon * 2.0 * std::sqrt(2.0 * std::numbers::pi) / std::sqrt(curb);
}

namespace {

void require_inside(const EpsilonContext& ctx, const Interval& iv) {
  const double L = ctx.domain_half_width + 1e-12;
  if (iv.lo < -L || iv.hi > L)
    throw std::domain_error("interval leaves the truncated domain");
}

}  // namespace

double integrate_gamma_weighted(const EpsilonContext& ctx,
                                const std::function<double(double)>& f,
                                const Interval& iv) {
  require_inside(ctx, iv);
  if (!(iv.hi > iv.lo)) return 0.0;
  auto integrand = [&](double x) { return f(x) * std::exp(log_gamma(ctx, x)); };
  return integrate(integrand, iv.lo, iv.hi, {-1.0, 0.0, 1.0}, ctx.quad);
}

double integrate_inverse_gamma(const EpsilonContext& ctx,
                               const std::function<double(double)>& f,
                               const Interval& iv) {
  require_inside(ctx, iv);
  if (!(iv.hi > iv.lo)) return 0.0;
  auto integrand = [&](double x) {
    return f(x) * std::exp(ctx.log_tau - log_gamma(ctx, x));
  };
  return integrate(integrand, iv.lo, iv.hi, {-1.0, 0.0, 1.0}, ctx.quad);
}

}  // namespace kslab
