#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "kslab/errors.hpp"
#include "kslab/experiments.hpp"
#include "kslab/io.hpp"

using namespace kslab;

namespace {

RunConfig tiny_config() {
  RunConfig cfg;
  cfg.u0 = 1.5;
  cfg.T = 0.05;
  cfg.n_base = 240;
  cfg.dt = 5e-4;
  cfg.snapshots_per_unit = 100.0;
  return cfg;
}

}  // namespace

TEST_CASE("rate fit recovers an exact power law") {
  std::vector<std::pair<double, double>> pts = {
      {0.1, 0.01}, {0.2, 0.04}, {0.4, 0.16}};
  const FitResult fit = fit_rate(pts);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(fit.intercept) < 1e-12);
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(fit_rate({{0.1, 0.01}, {0.2, 0.04}}), config_error);
  CHECK_THROWS_AS(fit_rate({{0.1, 0.01}, {0.2, -1.0}, {0.4, 0.16}}), config_error);
  CHECK_THROWS_AS(fit_rate({{0.2, 0.01}, {0.2, 0.04}, {0.2, 0.16}}), config_error);
}

TEST_CASE("competitor velocities never beat the recorded one") {
  const auto ctx = make_context(make_potential("quartic"), 0.3);
  GradingSpec gs;
  gs.epsilon = 0.3;
  const auto op = assemble_operator(ctx, build_grid(3.0, 300, gs));
  EvolveControls ec;
  ec.dt = 1e-3;
  ec.record_every_step = true;
  const Field init = well_prepared_initial(ctx, op, 1.5);
  const Trajectory traj = evolve(ctx, op, init, 0.02, ec);

  const auto gaps = minimality_probe(op, ctx, traj, 20, 7);
  REQUIRE(gaps.size() == 20);
  for (double g : gaps) CHECK(g >= -1e-9);

  const auto again = minimality_probe(op, ctx, traj, 20, 7);
  CHECK(gaps == again);
  const auto other = minimality_probe(op, ctx, traj, 20, 8);
  CHECK(gaps != other);

  CHECK_THROWS_AS(minimality_probe(op, ctx, traj, 0, 7), config_error);
  CHECK_THROWS_AS(minimality_probe(op, ctx, Trajectory{}, 5, 7), config_error);
}

TEST_CASE("sweep merges runs in descending epsilon order") {
  const RunConfig cfg = tiny_config();
  const ConvergenceReport rep = sweep(cfg, {0.3, 0.35, 0.3});

  REQUIRE(rep.runs.size() == 2);
  CHECK(rep.runs[0].epsilon == 0.35);
  CHECK(rep.runs[1].epsilon == 0.3);
  CHECK(rep.config.epsilons == std::vector<double>{0.35, 0.3});
  for (const auto& r : rep.runs) {
    REQUIRE(r.ok);
    CHECK(r.error.empty());
    CHECK(r.partition_ratio_err > 0.0);
    CHECK(r.partition_ratio_err < 0.1);
    CHECK(r.mass_drift <= 1e-10);
    CHECK(r.max_apriori1 <= 1e-6);
    // The dissipation identity carries a startup defect ~3.6e-3 * tau(eps)
    // from the first implicit step, so its cap is eps-aware; at eps <= 0.3
    // the allowance collapses to the plain 1e-6.
    CHECK(r.apriori2_tol >= 1e-6);
    CHECK(r.max_apriori2 <= r.apriori2_tol);
    if (r.epsilon <= 0.3) CHECK(r.max_apriori2 <= 1e-6);
    CHECK(r.energy_monotone);
    CHECK(r.limits.entries.size() == 6);
    REQUIRE(r.times.size() == r.u_plus_path.size());
    REQUIRE(r.times.size() == r.u_limit_path.size());
    CHECK(r.times.front() == 0.0);
    CHECK(r.times.back() == doctest::Approx(cfg.T).epsilon(1e-12));
    CHECK(r.u_limit_path.front() == 1.5);
  }

  const std::vector<std::string> expected = {
      "runs_ok",
      "partition_ratio_monotone",
      "u_error_monotone",
      "metric_gap_monotone",
      "de_gap_monotone",
      "layer_sup_monotone",
      "layer_l2t_monotone",
      "resistance_dev_monotone",
      "u_error_cap",
      "mass_conserved",
      "apriori_residuals_small",
      "energy_monotone"};
  REQUIRE(rep.verdicts.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(rep.verdicts[i].name == expected[i]);
  CHECK(rep.verdicts[0].pass);
  CHECK_FALSE(rep.u_error_fit.has_value());
}

TEST_CASE("sweep output is deterministic") {
  const RunConfig cfg = tiny_config();
  const std::string a = report_to_json(sweep(cfg, {0.35, 0.3}));
  const std::string b = report_to_json(sweep(cfg, {0.35, 0.3}));
  CHECK(a == b);
}

TEST_CASE("sweep rejects custom initial profiles") {
  RunConfig cfg = tiny_config();
  cfg.initial_profile = "profile.csv";
  CHECK_THROWS_AS(sweep(cfg, {0.35, 0.3}), config_error);
  cfg.initial_profile.clear();
  CHECK_THROWS_AS(sweep(cfg, {}), config_error);
}

TEST_CASE("a failing epsilon is reported, not fatal") {
  const RunConfig cfg = tiny_config();
  // At 0.55 the well windows swallow the slope region and the context must
  // fail cleanly.
  const ConvergenceReport rep = sweep(cfg, {0.55, 0.35});
  REQUIRE(rep.runs.size() == 2);
  CHECK_FALSE(rep.runs[0].ok);
  CHECK_FALSE(rep.runs[0].error.empty());
  CHECK(rep.runs[1].ok);
  REQUIRE(!rep.verdicts.empty());
  CHECK(rep.verdicts[0].name == "runs_ok");
  CHECK_FALSE(rep.verdicts[0].pass);
  CHECK_FALSE(rep.all_pass());
}
