#pragma once

#include <string>
#include <vector>

#include "kslab/measure.hpp"

namespace kslab {

struct RateConstant {
  double k = 0.0;                 // pi^-1 sqrt(|H''(0)| H''(1))
  double curvature_barrier = 0.0; // H''(0) < 0
  double curvature_well = 0.0;    // H''(1) > 0
};

RateConstant kramers_rate(const Potential& p);

// Clamped transition profile: odd, nondecreasing, eta(+-1) = +-1, constant
// beyond the wells.
double eta(const EpsilonContext& ctx, double x);

// u_tilde(x) = 1 + (u - 1) eta(x) for u in (0, 2).
double u_tilde(const EpsilonContext& ctx, double u, double x);

struct LayerIntegral {
  double finite_eps = 0.0;  // int_{J_zero} tau / (gamma u_tilde) dx
  double limit = 0.0;       // 2 ln(u/(2-u)) / (k (u-1)),  4/k at u = 1
};

// Effective barrier resistance weighted by the layer profile for mass split u.
LayerIntegral layer_resistance_integral(const EpsilonContext& ctx, double u);

struct MeasureLimitEntry {
  std::string name;
  double value = 0.0;
  double target = 0.0;   // meaningful only when diverges == false
  bool diverges = false; // entry is expected to grow without bound
};

// The six small-eps checkpoints of the invariant measure:
//   int_{J_plus} gamma           -> 1/2
//   int_{J_bar} gamma            -> 0
//   sup_{J_bar} gamma            -> 0
//   tau^-1 inf_I gamma           -> infinity
//   int_{J_zero} tau/gamma       -> 4/k
//   int_I tau/gamma              -> 0
struct MeasureLimitTable {
  std::vector<MeasureLimitEntry> entries;
  const MeasureLimitEntry& by_name(const std::string& name) const;
};

MeasureLimitTable measure_limit_table(const EpsilonContext& ctx);

}  // namespace kslab
