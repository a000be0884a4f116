#include <cmath>
#include <vector>

#include "doctest.h"
#include "kslab/asymptotics.hpp"
#include "kslab/diagnostics.hpp"
#include "kslab/errors.hpp"
#include "kslab/fokker_planck.hpp"
#include "kslab/limit_flow.hpp"

using namespace kslab;

namespace {

struct Bench {
  EpsilonContext ctx;
  DiscreteOperator op;
};

Bench make_bench(double eps, int n_base = 400) {
  Bench b;
  b.ctx = make_context(make_potential("quartic"), eps);
  GradingSpec gs;
  gs.epsilon = eps;
  b.op = assemble_operator(b.ctx, build_grid(3.0, n_base, gs));
  return b;
}

Field unit_field(const DiscreteOperator& op) {
  return custom_initial(op, std::vector<double>(op.n(), 1.0));
}

}  // namespace

TEST_CASE("mass split of the invariant state") {
  const Bench b = make_bench(0.25);
  const MassSplit ms = masses(b.op, unit_field(b.op));
  CHECK(std::abs(ms.total - 1.0) < 1e-13);
  CHECK(std::abs(ms.u_plus - 1.0) < 1e-13);
  CHECK(std::abs(ms.u_minus - 1.0) < 1e-13);
}

TEST_CASE("mass split of a well-prepared state") {
  const Bench b = make_bench(0.25);
  const Field f = well_prepared_initial(b.ctx, b.op, 1.5);
  const MassSplit ms = masses(b.op, f);
  CHECK(std::abs(ms.total - 1.0) < 1e-12);
  CHECK(ms.u_plus == doctest::Approx(1.5).epsilon(2e-3));
  CHECK(ms.u_minus == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("interval masses partition the domain") {
  const Bench b = make_bench(0.25);
  const Field f = unit_field(b.op);
  const IntervalMasses im = interval_masses(b.op, b.ctx, f);
  // Well windows and their complement tile [-L, L], straddling cells split
  // by overlap fraction, so the three integrals recover the total mass.
  CHECK(std::abs(im.J_plus + im.J_minus + im.J_bar - 1.0) < 1e-12);
  CHECK(im.J_plus == doctest::Approx(0.5).epsilon(0.02));
  CHECK(im.J_minus == doctest::Approx(0.5).epsilon(0.02));
  CHECK(im.J_bar < 0.01);
}

TEST_CASE("entropy energy of the invariant state") {
  const Bench b = make_bench(0.25);
  CHECK(energy_epsilon(b.op, unit_field(b.op)) ==
        doctest::Approx(-b.op.log_partition).epsilon(1e-13));
  Field f = unit_field(b.op);
  f.u[5] = 0.0;
  CHECK(std::isnan(energy_epsilon(b.op, f)));
}

TEST_CASE("recovery velocity shape") {
  const Bench b = make_bench(0.25);
  const auto vel = recovery_velocity(b.ctx, b.op, 1.0);
  REQUIRE(static_cast<int>(vel.size()) == b.op.n());

  double tot = 0.0;
  const double w = std::pow(b.ctx.epsilon, b.ctx.alpha);
  for (int i = 0; i < b.op.n(); ++i) {
    tot += vel[i] * b.op.grid.widths[i];
    const double x = b.op.grid.centers[i];
    if (std::abs(x - 1.0) >= w && std::abs(x + 1.0) >= w) CHECK(vel[i] == 0.0);
  }
  CHECK(std::abs(tot) < 1e-14);

  const IntervalMasses im = interval_velocity_masses(b.op, b.ctx, vel);
  CHECK(im.J_plus == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(im.J_minus == doctest::Approx(-0.5).epsilon(1e-3));
  CHECK(im.J_bar < 1e-4);

  CHECK_THROWS_AS(interval_velocity_masses(b.op, b.ctx, std::vector<double>(3, 0.0)),
                  config_error);
}

TEST_CASE("metric discharge is quadratic and positive") {
  const Bench b = make_bench(0.25);
  const Field f = well_prepared_initial(b.ctx, b.op, 1.5);
  const auto v1 = recovery_velocity(b.ctx, b.op, 1.0);
  const auto v2 = recovery_velocity(b.ctx, b.op, 2.0);
  const double g1 = metric_step(b.op, f.u, v1);
  const double g2 = metric_step(b.op, f.u, v2);
  CHECK(g1 > 0.0);
  CHECK(g2 == doctest::Approx(4.0 * g1).epsilon(1e-12));

  CHECK_THROWS_AS(metric_step(b.op, f.u, std::vector<double>(b.op.n(), 1.0)),
                  std::domain_error);
  CHECK_THROWS_AS(de_pairing(b.op, f.u, std::vector<double>(b.op.n(), 1.0)),
                  std::domain_error);
}

TEST_CASE("recovery metric approaches the two-state metric") {
  const Bench b = make_bench(0.2);
  const RateConstant rate = kramers_rate(*b.ctx.potential);
  const Field f = well_prepared_initial(b.ctx, b.op, 1.5);
  const auto vel = recovery_velocity(b.ctx, b.op, 1.0);
  const double g_eps = metric_step(b.op, f.u, vel);
  const double g_lim = limit_metric(rate.k, 1.5, 1.0);
  CHECK(g_eps == doctest::Approx(g_lim).epsilon(0.15));
}

TEST_CASE("state metric vanishes only on constants") {
  const Bench b = make_bench(0.25);
  CHECK(metric_from_state(b.op, std::vector<double>(b.op.n(), 1.3)) == 0.0);
  const Field f = well_prepared_initial(b.ctx, b.op, 1.5);
  CHECK(metric_from_state(b.op, f.u) > 0.0);
  CHECK_THROWS_AS(metric_from_state(b.op, std::vector<double>(3, 1.0)), config_error);
}

TEST_CASE("time-integrated functional matches the per-step ledger") {
  const Bench b = make_bench(0.25, 300);
  EvolveControls ec;
  ec.dt = 1e-3;
  ec.record_every_step = true;
  const Field init = well_prepared_initial(b.ctx, b.op, 1.5);
  const Trajectory traj = evolve(b.ctx, b.op, init, 0.05, ec);

  const double direct = rayleigh_functional(b.op, traj, traj.step_velocities);
  const double ledger = 0.5 * traj.metric_time_integral() + traj.de_time_integral();
  CHECK(direct == doctest::Approx(ledger).epsilon(1e-8));
  CHECK(traj.metric_time_integral() > 0.0);
  CHECK(traj.de_time_integral() < 0.0);

  CHECK_THROWS_AS(rayleigh_functional(b.op, traj, {}), config_error);

  const RateConstant rate = kramers_rate(*b.ctx.potential);
  const RayleighReport rep = rayleigh_epsilon(b.op, traj, rate, 1.5);
  CHECK(rep.eps_functional == doctest::Approx(direct).epsilon(1e-12));
  CHECK(rep.per_step_metric.size() == traj.steps.size());
  const double uT = limit_solution(1.5, rate.k, traj.T);
  CHECK(rep.limit_functional ==
        doctest::Approx(0.5 * (limit_energy(uT) - limit_energy(1.5))).epsilon(1e-14));
  CHECK(rep.limit_functional < 0.0);
  CHECK(rep.limit_metric_integral ==
        doctest::Approx(limit_energy(1.5) - limit_energy(uT)).epsilon(1e-14));
}

TEST_CASE("layer error vanishes on the stationary state") {
  const Bench b = make_bench(0.25, 300);
  EvolveControls ec;
  ec.dt = 1e-3;
  const Field init = well_prepared_initial(b.ctx, b.op, 1.0);
  const Trajectory traj = evolve(b.ctx, b.op, init, 0.05, ec);
  const std::vector<double> u_path(traj.snapshots.size(), 1.0);
  const LayerError le = layer_error(b.op, b.ctx, traj, u_path);
  CHECK(le.sup_I < 1e-10);
  CHECK(le.l2t_J0 < 1e-20);
  CHECK_THROWS_AS(layer_error(b.op, b.ctx, traj, std::vector<double>(1, 1.0)),
                  config_error);
}

TEST_CASE("layer error tracks a relaxing state") {
  const Bench b = make_bench(0.25, 300);
  EvolveControls ec;
  ec.dt = 1e-3;
  const Field init = well_prepared_initial(b.ctx, b.op, 1.5);
  const Trajectory traj = evolve(b.ctx, b.op, init, 0.05, ec);
  std::vector<double> u_path;
  u_path.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) u_path.push_back(masses(b.op, s).u_plus);
  const LayerError le = layer_error(b.op, b.ctx, traj, u_path);
  CHECK(le.sup_I >= 0.0);
  CHECK(le.sup_I < 0.5);
  CHECK(le.l2t_J0 >= 0.0);
  CHECK(std::isfinite(le.l2t_J0));
}
