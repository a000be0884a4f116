#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "kslab/potential.hpp"
#include "kslab/quadrature.hpp"

namespace kslab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Windows around the wells/barrier of half-width w = eps^alpha:
//   J_plus/J_minus  well windows (+-1 - w, +-1 + w)
//   J_zero          barrier window (-w, w)
//   I_plus/I_minus  slope regions (w, x_return - w) and its mirror
//   J_bar           complement of the well windows in [-L, L]
// x_return is the point beyond the well where H climbs back to barrier
// height; for a potential normalized to H(+-2) = 1 it equals 2.
struct IntervalFamily {
  Interval J_plus, J_minus, J_zero, I_plus, I_minus;
  std::vector<Interval> J_bar;
};

// Cached cumulative barrier crossing profile:
//   cum(x) = tau * int_0^x dy / gamma(y)   on [-1, 1], odd in x.
// eta(x) = cum(x)/cum(1) clamped to [-1, 1] outside the wells.
struct TransitionLayer {
  std::vector<double> x;    // nodes on [-1, 1]
  std::vector<double> cum;  // strictly increasing, odd
  double half_mass = 0.0;   // cum at x = 1; 2*half_mass = tau * int_{-1}^{1} dy/gamma
  double eval_eta(double x) const;
};

struct EpsilonContext {
  std::shared_ptr<const Potential> potential;
  double epsilon = 0.0;
  double alpha = 0.5;
  double tau = 0.0;        // eps^-2 exp(-1/eps^2)
  double log_tau = 0.0;
  double log_partition = 0.0;  // log int_{-L}^{L} exp(-H/eps^2)
  double domain_half_width = 3.0;
  double x_return = 2.0;
  IntervalFamily intervals;
  QuadratureSettings quad;
  std::shared_ptr<const TransitionLayer> layer;
};

// Builds the rescaled-measure context: tau, the truncated partition integral,
// the interval family, and the transition-layer cache.  Requires the core
// potential assumptions to hold, eps and alpha in (0,1) with 2 eps^alpha < 1,
// and L >= 2.5 with L > x_return.
EpsilonContext make_context(std::shared_ptr<const Potential> p, double epsilon,
                            double alpha = 0.5, double domain_half_width = 3.0,
                            const QuadratureSettings& quad = {});

// log gamma_eps(x) = -H(x)/eps^2 - log_partition, valid on [-L, L].
double log_gamma(const EpsilonContext& ctx, double x);

// Leading-order partition integral: eps * 2 sqrt(2 pi) / sqrt(H''(1)).
double asymptotic_partition(const Potential& p, double epsilon);

// int_iv f(x) gamma(x) dx, evaluated through the log density.
double integrate_gamma_weighted(const EpsilonContext& ctx,
                                const std::function<double(double)>& f,
                                const Interval& iv);

// int_iv f(x) tau / gamma(x) dx; the weight is exp(log_tau - log_gamma).
double integrate_inverse_gamma(const EpsilonContext& ctx,
                               const std::function<double(double)>& f,
                               const Interval& iv);

}  // namespace kslab
