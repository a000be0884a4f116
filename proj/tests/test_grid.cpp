#include <cmath>

#include "doctest.h"
#include "kslab/errors.hpp"
#include "kslab/grid.hpp"

using namespace kslab;

TEST_CASE("graded grid is exactly mirror symmetric") {
  GradingSpec gs;
  gs.epsilon = 0.25;
  const Grid g = build_grid(3.0, 400, gs);
  const int n = g.n();
  REQUIRE(n >= 400);
  REQUIRE(static_cast<int>(g.edges.size()) == n + 1);

  CHECK(g.edges[n / 2] == 0.0);  // a face sits exactly on the barrier
  for (int i = 0; i <= n; ++i) CHECK(g.edges[i] == -g.edges[n - i]);
  for (int i = 0; i < n; ++i) CHECK(g.centers[i] == -g.centers[n - 1 - i]);

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    CHECK(g.widths[i] > 0.0);
    total += g.widths[i];
  }
  CHECK(total == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(g.min_width() > 0.0);
}

TEST_CASE("grading concentrates cells at the wells and barrier") {
  GradingSpec gs;
  gs.epsilon = 0.25;
  const Grid g = build_grid(3.0, 400, gs);
  auto local_width = [&](double x) {
    for (int i = 0; i < g.n(); ++i)
      if (g.edges[i] <= x && x <= g.edges[i + 1]) return g.widths[i];
    return -1.0;
  };
  CHECK(local_width(1.0) < 0.2 * local_width(2.4));
  CHECK(local_width(0.0) < 0.2 * local_width(2.4));
}

TEST_CASE("uniform grid") {
  GradingSpec gs;
  gs.mode = GradingSpec::Mode::uniform;
  const Grid g = build_grid(3.0, 400, gs);
  for (int i = 0; i < g.n(); ++i)
    CHECK(g.widths[i] == doctest::Approx(g.widths[0]).epsilon(1e-12));
  CHECK(g.edges[g.n() / 2] == 0.0);
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS_AS(build_grid(2.0, 400, {}), config_error);
  CHECK_THROWS_AS(build_grid(3.0, 100, {}), config_error);
}
