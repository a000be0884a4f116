#include <cmath>
#include <limits>

#include "doctest.h"
#include "kslab/errors.hpp"
#include "kslab/quadrature.hpp"

using namespace kslab;

TEST_CASE("Gauss-Legendre rule basics") {
  const GaussRule& r = gauss_legendre(16);
  REQUIRE(r.x.size() == 16);
  double wsum = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    wsum += r.w[i];
    CHECK(r.x[i] == doctest::Approx(-r.x[15 - i]).epsilon(1e-14));
    CHECK(r.w[i] == doctest::Approx(r.w[15 - i]).epsilon(1e-14));
  }
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(gauss_legendre(1), config_error);
  CHECK_THROWS_AS(gauss_legendre(200), config_error);
}

TEST_CASE("polynomials integrate exactly") {
  const double v = integrate([](double x) { return x * x * x * x * x; }, 0.0, 1.0, {});
  CHECK(v == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("gaussian integral against the closed form") {
  const double v = integrate([](double x) { return std::exp(-x * x); }, -3.0, 3.0, {});
  CHECK(v == doctest::Approx(1.7724146965190425).epsilon(1e-10));
}

TEST_CASE("narrow peak is resolved through the attractor ladder") {
  const double s = 0.01;
  const double v = integrate(
      [s](double x) { return std::exp(-(x / s) * (x / s)); }, -1.0, 1.0, {0.0});
  CHECK(v == doctest::Approx(s * std::sqrt(std::acos(-1.0))).epsilon(1e-9));
}

TEST_CASE("non-finite integrand is rejected") {
  CHECK_THROWS_AS(integrate(
                      [](double x) {
                        return x > 0.5 ? std::numeric_limits<double>::quiet_NaN()
                                       : 1.0;
                      },
                      0.0, 1.0, {}),
                  numerical_error);
}

TEST_CASE("graded nodes crowd around attractors") {
  const auto nodes = graded_nodes(0.0, 3.0, 300, {{1.0, 0.05, 30.0}});
  REQUIRE(nodes.size() == 301);
  CHECK(nodes.front() == 0.0);
  CHECK(nodes.back() == 3.0);
  int near = 0, far = 0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    CHECK(nodes[i + 1] > nodes[i]);
    const double mid = 0.5 * (nodes[i] + nodes[i + 1]);
    if (std::abs(mid - 1.0) < 0.1) ++near;
    if (std::abs(mid - 2.5) < 0.1) ++far;
  }
  CHECK(near > 4 * far);
}
