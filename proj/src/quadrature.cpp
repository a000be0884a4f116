#include "kslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "kslab/errors.hpp"

namespace kslab {

const GaussRule& gauss_legendre(int n) {
  if (n < 2 || n > 128) throw config_error("gauss_legendre: order out of range");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root of P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

namespace {

double panel(const std::function<double(double)>& f, double a, double b,
             const GaussRule& g) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
  return s * h;
}

double refine(const std::function<double(double)>& f, double a, double b,
              double whole, const GaussRule& g, double scale,
              const QuadratureSettings& qs, int depth) {
  const double m = 0.5 * (a + b);
  const double left = panel(f, a, m, g);
  const double right = panel(f, m, b, g);
  const double err = std::abs(left + right - whole);
  const double tol =
      std::max(qs.abs_tol, qs.rel_tol * (std::abs(left + right) + 1e-3 * scale));
  if (depth >= qs.max_depth || err <= tol) return left + right;
  return refine(f, a, m, left, g, scale, qs, depth + 1) +
         refine(f, m, b, right, g, scale, qs, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const std::vector<double>& attractors,
                 const QuadratureSettings& qs) {
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw config_error("integrate: non-finite bounds");
  if (!(b > a)) return 0.0;

  const GaussRule& g = gauss_legendre(qs.nodes);
  const double span = b - a;

  std::vector<double> cuts{a, b};
  for (double c : attractors) {
    if (c > a && c < b) cuts.push_back(c);
    // geometric ladder on both sides so panels shrink toward the attractor
    for (int j = 2; j <= qs.ladder_levels; ++j) {
      const double d = span * std::ldexp(1.0, -j);
      if (c + d > a && c + d < b) cuts.push_back(c + d);
      if (c - d > a && c - d < b) cuts.push_back(c - d);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> first(cuts.size() - 1);
  double scale = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    first[i] = panel(f, cuts[i], cuts[i + 1], g);
    scale += std::abs(first[i]);
  }

  double total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    total += refine(f, cuts[i], cuts[i + 1], first[i], g, scale, qs, 0);
  if (!std::isfinite(total)) throw numerical_error("integrate: non-finite result");
  return total;
}

std::vector<double> graded_nodes(double a, double b, int n_cells,
                                 const std::vector<Attractor>& attractors) {
  if (!(b > a) || n_cells < 1)
    throw config_error("graded_nodes: bad interval or count");

  auto density_integral = [&](double x) {
    double v = x - a;
    for (const auto& at : attractors) {
      if (at.scale <= 0.0) throw config_error("graded_nodes: bad scale");
      v += at.strength * at.scale *
           (std::atan((x - at.center) / at.scale) -
            std::atan((a - at.center) / at.scale));
    }
    return v;
  };

  const double total = density_integral(b);
  std::vector<double> nodes(n_cells + 1);
  nodes[0] = a;
  nodes[n_cells] = b;
  double lo = a;
  for (int j = 1; j < n_cells; ++j) {
    const double target = total * j / n_cells;
    // bisection on the monotone antiderivative
    double x0 = lo, x1 = b;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (x0 + x1);
      if (density_integral(mid) < target)
        x0 = mid;
      else
        x1 = mid;
    }
    nodes[j] = 0.5 * (x0 + x1);
    lo = nodes[j];
  }
  return nodes;
}

}  // namespace kslab
