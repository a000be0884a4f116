#include <cmath>

#include "doctest.h"
#include "kslab/errors.hpp"
#include "kslab/measure.hpp"

using namespace kslab;

namespace {

EpsilonContext quartic_ctx(double eps) {
  return make_context(make_potential("quartic"), eps);
}

// Normalized so that H(+-2) = 1: (x^2-1)^2 / (1+x^2)^p with p = ln9/ln5.
struct NormalizedWell final : Potential {
  PotentialDerivatives eval(double x) const override {
    auto value = [](double y) {
      const double p = std::log(9.0) / std::log(5.0);
      const double s = y * y - 1.0;
      return s * s * std::pow(1.0 + y * y, -p);
    };
    const double h = 1e-6;
    const double v = value(x);
    const double d1 = (value(x + h) - value(x - h)) / (2.0 * h);
    const double d2 = (value(x + h) - 2.0 * v + value(x - h)) / (h * h);
    return {v, d1, d2};
  }
  const std::string& name() const override {
    static const std::string n = "normalized_well";
    return n;
  }
};

}  // namespace

TEST_CASE("time scale tau") {
  const EpsilonContext ctx = quartic_ctx(0.2);
  CHECK(ctx.tau == doctest::Approx(3.4719859662410051e-10).epsilon(1e-13));
  CHECK(ctx.log_tau == doctest::Approx(-21.781124175131799).epsilon(1e-13));
}

TEST_CASE("partition integral approaches the leading-order form") {
  auto p = make_potential("quartic");
  CHECK(asymptotic_partition(*p, 0.2) ==
        doctest::Approx(0.35449077018110321).epsilon(1e-14));
  const double r2 = std::exp(quartic_ctx(0.2).log_partition) /
                    asymptotic_partition(*p, 0.2);
  const double r1 = std::exp(quartic_ctx(0.1).log_partition) /
                    asymptotic_partition(*p, 0.1);
  CHECK(std::abs(r2 - 1.0) > 1e-3);  // finite-eps correction is visible
  CHECK(std::abs(r2 - 1.0) < 0.02);
  CHECK(std::abs(r1 - 1.0) < std::abs(r2 - 1.0));
}

TEST_CASE("gamma is a probability density on the truncated domain") {
  const EpsilonContext ctx = quartic_ctx(0.25);
  const double total = integrate_gamma_weighted(ctx, [](double) { return 1.0; },
                                                {-3.0, 3.0});
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  const double well = integrate_gamma_weighted(ctx, [](double) { return 1.0; },
                                               ctx.intervals.J_plus);
  CHECK(well == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("return point") {
  CHECK(quartic_ctx(0.2).x_return ==
        doctest::Approx(1.4142135623730950).epsilon(1e-10));
  const EpsilonContext sixth =
      make_context(make_potential("sixth_order", 0.5), 0.2);
  CHECK(sixth.x_return == doctest::Approx(1.3160740129524925).epsilon(1e-10));
  const EpsilonContext norm =
      make_context(std::make_shared<NormalizedWell>(), 0.2);
  CHECK(norm.x_return == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("interval family geometry") {
  const EpsilonContext ctx = quartic_ctx(0.2);
  const double w = std::sqrt(0.2);
  CHECK(ctx.intervals.J_plus.lo == doctest::Approx(1.0 - w));
  CHECK(ctx.intervals.J_plus.hi == doctest::Approx(1.0 + w));
  CHECK(ctx.intervals.J_minus.hi == doctest::Approx(-1.0 + w));
  CHECK(ctx.intervals.J_zero.hi == doctest::Approx(w));
  CHECK(ctx.intervals.I_plus.lo == doctest::Approx(w));
  CHECK(ctx.intervals.I_plus.hi == doctest::Approx(ctx.x_return - w));
  CHECK(ctx.intervals.I_minus.lo == doctest::Approx(-(ctx.x_return - w)));
  REQUIRE(ctx.intervals.J_bar.size() == 3);
  CHECK(ctx.intervals.J_bar[0].lo == doctest::Approx(-3.0));
  CHECK(ctx.intervals.J_bar[1].lo == doctest::Approx(-1.0 + w));
  CHECK(ctx.intervals.J_bar[1].hi == doctest::Approx(1.0 - w));
  CHECK(ctx.intervals.J_bar[2].hi == doctest::Approx(3.0));
}

TEST_CASE("transition profile shape") {
  const EpsilonContext ctx = quartic_ctx(0.2);
  const auto& layer = *ctx.layer;
  CHECK(layer.eval_eta(0.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(layer.eval_eta(1.0) == 1.0);
  CHECK(layer.eval_eta(-1.0) == -1.0);
  CHECK(layer.eval_eta(1.7) == 1.0);   // clamped beyond the well
  CHECK(layer.eval_eta(-3.0) == -1.0);
  for (double x : {0.05, 0.2, 0.45, 0.8}) {
    CHECK(layer.eval_eta(-x) == doctest::Approx(-layer.eval_eta(x)).epsilon(1e-12));
    CHECK(layer.eval_eta(x) > layer.eval_eta(x - 0.04));
  }
  // The profile is asymptotically erf(x sqrt(|H''(0)|/2) / eps).
  CHECK(std::abs(layer.eval_eta(0.1) - 0.6826894921370859) < 0.01);
  CHECK(layer.eval_eta(0.4) > 0.99);
  const EpsilonContext fine = quartic_ctx(0.1);
  CHECK(std::abs(fine.layer->eval_eta(0.1) - 0.95449973610364159) < 0.005);
}

TEST_CASE("half mass approaches half the barrier resistance") {
  const EpsilonContext ctx = quartic_ctx(0.2);
  const double four_over_k = 2.2214414690791831;
  CHECK(std::abs(2.0 * ctx.layer->half_mass / four_over_k - 1.0) < 0.05);
}

TEST_CASE("context preconditions") {
  auto p = make_potential("quartic");
  CHECK_THROWS_AS(make_context(nullptr, 0.2), config_error);
  CHECK_THROWS_AS(make_context(p, 1.1), config_error);
  CHECK_THROWS_AS(make_context(p, -0.2), config_error);
  CHECK_THROWS_AS(make_context(p, 0.6, 0.5), config_error);  // 2 eps^alpha >= x_return
  CHECK_NOTHROW(make_context(p, 0.35, 0.5));  // overlap with the barrier window is fine
  CHECK_THROWS_AS(make_context(p, 0.2, 1.5), config_error);
  CHECK_THROWS_AS(make_context(p, 0.2, 0.5, 2.0), config_error);  // L too small
}

TEST_CASE("log density domain") {
  const EpsilonContext ctx = quartic_ctx(0.2);
  CHECK(log_gamma(ctx, 1.0) == doctest::Approx(-ctx.log_partition));
  CHECK_THROWS_AS(log_gamma(ctx, 3.5), std::domain_error);
}
