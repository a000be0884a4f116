#include "kslab/grid.hpp"

#include <algorithm>
#include <cmath>

#include "kslab/errors.hpp"
#include "kslab/quadrature.hpp"

namespace kslab {

double Grid::min_width() const {
  return *std::min_element(widths.begin(), widths.end());
}

Grid build_grid(double L, int n_base, const GradingSpec& grading) {
  if (!(L >= 2.5)) throw config_error("build_grid: L must be at least 2.5");
  if (n_base < 200) throw config_error("build_grid: need at least 200 cells");
  const int n_half = (n_base + 1) / 2;

  // positive half [0, L]; the negative half is the exact mirror so that x = 0
  // sits on a face and the mesh is symmetric to the bit
  std::vector<double> pos;
  if (grading.mode == GradingSpec::Mode::uniform) {
    pos.resize(n_half + 1);
    for (int i = 0; i <= n_half; ++i) pos[i] = L * i / n_half;
  } else {
    const double s = grading.eps_aware
                         ? std::max(grading.epsilon / 4.0, grading.scale_floor)
                         : 0.08;
    pos = graded_nodes(0.0, L, n_half,
                       {{0.0, s, grading.strength}, {1.0, s, grading.strength}});
  }

  Grid g;
  g.L = L;
  const int n = 2 * n_half;
  g.edges.resize(n + 1);
  for (int i = 0; i <= n_half; ++i) {
    g.edges[n_half + i] = pos[i];
    g.edges[n_half - i] = -pos[i];
  }
  g.centers.resize(n);
  g.widths.resize(n);
  for (int i = 0; i < n; ++i) {
    g.centers[i] = 0.5 * (g.edges[i] + g.edges[i + 1]);
    g.widths[i] = g.edges[i + 1] - g.edges[i];
  }
  g.face_gaps.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) g.face_gaps[i] = g.centers[i + 1] - g.centers[i];
  return g;
}

}  // namespace kslab
