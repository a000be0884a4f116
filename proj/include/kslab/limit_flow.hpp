#pragma once

#include <functional>

namespace kslab {

// Two-state Kramers dynamics for the mass coordinate u in (0, 2):
//   du/dt = -k (u - 1),   E(u) = (u ln u + (2-u) ln(2-u)) / 2,
//   g_u(v, v) = v^2 ln(u/(2-u)) / (2 k (u-1)),  extended by v^2/k at u = 1.

double limit_solution(double u0, double k, double t);

double limit_energy(double u);                       // valid on [0, 2]
double limit_energy_slope(double u, double v);       // DE(u) v, u in (0, 2)

double limit_metric(double k, double u, double v);

// int_0^T [ g_u(v,v)/2 + DE(u) v ] dt for caller-supplied paths, composite
// 16-node Gauss-Legendre on n_panels equal panels.
double limit_rayleigh(double k, const std::function<double(double)>& u_path,
                      const std::function<double(double)>& v_path, double T,
                      int n_panels = 64);

}  // namespace kslab
