#pragma once

#include <vector>

namespace kslab {

struct GradingSpec {
  enum class Mode { uniform, graded };
  Mode mode = Mode::graded;
  bool eps_aware = true;    // scale the refined zones with epsilon
  double epsilon = 0.25;
  double strength = 30.0;   // density boost at {0, +-1}
  double scale_floor = 0.02;
};

// Symmetric cell-centered mesh on [-L, L] with x = 0 on a cell face.
struct Grid {
  double L = 0.0;
  std::vector<double> edges;     // n+1 edges, edges[n/2] == 0
  std::vector<double> centers;   // n cell centers
  std::vector<double> widths;    // n cell widths
  std::vector<double> face_gaps; // n-1 center-to-center distances
  int n() const { return static_cast<int>(centers.size()); }
  double min_width() const;
};

// Requires L >= 2.5 and n_base >= 200 (n_base rounded up to even).
Grid build_grid(double L, int n_base, const GradingSpec& grading);

}  // namespace kslab
