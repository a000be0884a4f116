#pragma once

#include <functional>
#include <vector>

namespace kslab {

struct QuadratureSettings {
  int nodes = 16;          // Gauss-Legendre nodes per panel
  double rel_tol = 1e-10;  // accept a panel once bisection changes it less than this
  double abs_tol = 1e-280; // floor so genuinely vanishing panels terminate
  int max_depth = 30;
  int ladder_levels = 14;  // geometric panel grading levels around attractors
};

// Gauss-Legendre rule on [-1,1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussRule& gauss_legendre(int n);

// Adaptive composite Gauss-Legendre integral of f over [a,b].  Initial panels
// are graded geometrically toward each attractor point, then panels are
// bisected until successive refinements agree to rel_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const std::vector<double>& attractors,
                 const QuadratureSettings& settings = {});

struct Attractor {
  double center = 0.0;
  double scale = 0.1;      // width of the refined zone
  double strength = 30.0;  // node density boost at the center
};

// n_cells+1 monotone node positions on [a,b], equidistributed against a
// density that peaks at the attractors.  Endpoints are hit exactly.
std::vector<double> graded_nodes(double a, double b, int n_cells,
                                 const std::vector<Attractor>& attractors);

}  // namespace kslab
