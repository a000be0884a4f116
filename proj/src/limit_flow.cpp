#include "kslab/limit_flow.hpp"

#include <cmath>
#include <stdexcept>

#include "kslab/errors.hpp"
#include "kslab/quadrature.hpp"

namespace kslab {

double limit_solution(double u0, double k, double t) {
  if (!(u0 >= 0.0 && u0 <= 2.0))
    throw std::domain_error("limit_solution: u0 must lie in [0,2]");
  if (!(k > 0.0)) throw std::domain_error("limit_solution: rate must be positive");
  return 1.0 + (u0 - 1.0) * std::exp(-k * t);
}

double limit_energy(double u) {
  if (!(u >= 0.0 && u <= 2.0))
    throw std::domain_error("limit_energy: u must lie in [0,2]");
  const double a = (u > 0.0) ? u * std::log(u) : 0.0;
  const double b = (u < 2.0) ? (2.0 - u) * std::log(2.0 - u) : 0.0;
  return 0.5 * (a + b);
}

double limit_energy_slope(double u, double v) {
  if (!(u > 0.0 && u < 2.0))
    throw std::domain_error("limit_energy_slope: u must lie in (0,2)");
  return 0.5 * v * std::log(u / (2.0 - u));
}

double limit_metric(double k, double u, double v) {
  if (!(u > 0.0 && u < 2.0))
    throw std::domain_error("limit_metric: u must lie in (0,2)");
  if (!(k > 0.0)) throw std::domain_error("limit_metric: rate must be positive");
  const double d = u - 1.0;
  if (std::abs(d) < 1e-8) return v * v / k;  // removable singularity at u = 1
  return v * v * std::log(u / (2.0 - u)) / (2.0 * k * d);
}

double limit_rayleigh(double k, const std::function<double(double)>& u_path,
                      const std::function<double(double)>& v_path, double T,
                      int n_panels) {
  if (!(T > 0.0)) throw config_error("limit_rayleigh: T must be positive");
  if (n_panels < 1) throw config_error("limit_rayleigh: n_panels must be >= 1");
  const GaussRule& rule = gauss_legendre(16);
  const double h = T / n_panels;
  double total = 0.0;
  for (int p = 0; p < n_panels; ++p) {
    const double mid = (p + 0.5) * h, half = 0.5 * h;
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const double t = mid + half * rule.x[q];
      const double u = u_path(t), v = v_path(t);
      total += half * rule.w[q] *
               (0.5 * limit_metric(k, u, v) + limit_energy_slope(u, v));
    }
  }
  return total;
}

}  // namespace kslab
