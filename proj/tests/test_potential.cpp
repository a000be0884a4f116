#include <cmath>

#include "doctest.h"
#include "kslab/errors.hpp"
#include "kslab/potential.hpp"

using namespace kslab;

namespace {

// Deliberately broken: single well, no barrier.
struct SingleWell final : Potential {
  PotentialDerivatives eval(double x) const override {
    return {x * x, 2.0 * x, 2.0};
  }
  const std::string& name() const override {
    static const std::string n = "single_well";
    return n;
  }
};

}  // namespace

TEST_CASE("quartic values and derivatives") {
  QuarticPotential p;
  CHECK(p.eval(0.0).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.eval(1.0).value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.eval(-1.0).value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.eval(2.0).value == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(p.eval(0.5).first == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(p.eval(0.0).second == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(p.eval(1.0).second == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(p.barrier_height() == doctest::Approx(1.0));
}

TEST_CASE("sixth-order values and derivatives") {
  SixthOrderPotential p(0.5);
  CHECK(p.shape() == 0.5);
  CHECK(p.eval(0.0).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.eval(1.0).value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.eval(2.0).value == doctest::Approx(27.0).epsilon(1e-14));
  CHECK(p.eval(0.0).second == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(p.eval(1.0).second == doctest::Approx(12.0).epsilon(1e-15));
  CHECK_THROWS_AS(SixthOrderPotential(-0.1), config_error);
  CHECK_THROWS_AS(SixthOrderPotential(2.0), config_error);
}

TEST_CASE("analytic derivatives match finite differences") {
  const std::vector<double> pts = {-1.7, -0.6, 0.3, 1.2, 2.1};
  CHECK(derivative_consistency(QuarticPotential{}, pts, 1e-5) < 1e-6);
  CHECK(derivative_consistency(SixthOrderPotential{0.5}, pts, 1e-5) < 1e-6);
  CHECK(derivative_consistency(SixthOrderPotential{1.7}, pts, 1e-5) < 1e-5);
}

TEST_CASE("factory") {
  CHECK(make_potential("quartic")->name() == "quartic");
  CHECK(make_potential("sixth_order", 0.5)->name() == "sixth_order");
  CHECK(make_potential("sixth", 0.5)->name() == "sixth_order");
  CHECK_THROWS_AS(make_potential("bogus"), config_error);
}

TEST_CASE("assumption audit accepts the built-in potentials") {
  for (const char* name : {"quartic", "sixth"}) {
    auto p = make_potential(name, 0.5);
    const AssumptionReport rep = check_assumptions(*p);
    CAPTURE(name);
    CHECK(rep.core_pass());
    // Neither family is normalized to H(+-2) = 1, so the boundary-height
    // advisory is expected to fail while the core checks stay green.
    bool found_advisory = false;
    for (const auto& c : rep.checks)
      if (c.name == "boundary_height") {
        found_advisory = true;
        CHECK(c.advisory);
        CHECK_FALSE(c.pass);
      }
    CHECK(found_advisory);
  }
}

TEST_CASE("assumption audit rejects a single well") {
  const AssumptionReport rep = check_assumptions(SingleWell{});
  CHECK_FALSE(rep.core_pass());
}
