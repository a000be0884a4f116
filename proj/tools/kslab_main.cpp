#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kslab/asymptotics.hpp"
#include "kslab/config.hpp"
#include "kslab/diagnostics.hpp"
#include "kslab/errors.hpp"
#include "kslab/experiments.hpp"
#include "kslab/io.hpp"
#include "kslab/limit_flow.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kslab;

namespace {

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> potential;
  std::optional<double> shape_b;
  std::optional<std::string> eps_list;
  std::optional<double> alpha;
  std::optional<double> u0;
  std::optional<double> T;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> initial_profile;
  std::optional<double> L;
  std::optional<int> n_base;
  std::optional<std::string> grading;
  std::optional<double> dt;
  std::optional<double> theta;
  std::optional<double> snapshots_per_unit;
  bool record_every_step = false;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "config file (key = value with [sections])");
  cmd->add_option("--potential", ov.potential, "quartic or sixth");
  cmd->add_option("--shape-b", ov.shape_b, "sixth-order shape parameter in [0,2)");
  cmd->add_option("--eps", ov.eps_list, "epsilon or comma-separated list");
  cmd->add_option("--alpha", ov.alpha, "window exponent in (0,1)");
  cmd->add_option("--u0", ov.u0, "initial mass coordinate in (0,2)");
  cmd->add_option("--T", ov.T, "final time");
  cmd->add_option("--out", ov.out_dir, "output directory");
  cmd->add_option("--seed", ov.seed, "random seed");
  cmd->add_option("--initial-profile", ov.initial_profile, "CSV with x,u columns");
  cmd->add_option("--L", ov.L, "domain half-width");
  cmd->add_option("--n-base", ov.n_base, "base cell count");
  cmd->add_option("--grading", ov.grading, "graded or uniform");
  cmd->add_option("--dt", ov.dt, "time step");
  cmd->add_option("--theta", ov.theta, "scheme parameter in [1/2,1]");
  cmd->add_option("--snapshots", ov.snapshots_per_unit, "snapshots per time unit");
  cmd->add_flag("--record-every-step", ov.record_every_step,
                "record a snapshot and velocity at every step");
}

RunConfig resolve_config(const Overrides& ov) {
  RunConfig cfg;
  if (ov.config_path) cfg = parse_config_file(*ov.config_path);
  if (ov.potential) cfg.potential_name = *ov.potential;
  if (ov.shape_b) cfg.shape_b = *ov.shape_b;
  if (ov.eps_list) cfg.epsilons = parse_eps_list(*ov.eps_list);
  if (ov.alpha) cfg.alpha = *ov.alpha;
  if (ov.u0) cfg.u0 = *ov.u0;
  if (ov.T) cfg.T = *ov.T;
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.initial_profile) cfg.initial_profile = *ov.initial_profile;
  if (ov.L) cfg.L = *ov.L;
  if (ov.n_base) cfg.n_base = *ov.n_base;
  if (ov.grading) cfg.grading = *ov.grading;
  if (ov.dt) cfg.dt = *ov.dt;
  if (ov.theta) cfg.theta = *ov.theta;
  if (ov.snapshots_per_unit) cfg.snapshots_per_unit = *ov.snapshots_per_unit;
  if (ov.record_every_step) cfg.record_every_step = true;
  cfg.validate();
  return cfg;
}

double single_epsilon(const RunConfig& cfg) {
  if (cfg.epsilons.size() != 1)
    throw config_error("this command needs exactly one epsilon");
  return cfg.epsilons.front();
}

struct SingleRun {
  RunConfig cfg;
  EpsilonContext ctx;
  RateConstant rate;
  Grid grid;
  DiscreteOperator op;
  Field init;
  PreparedNorms norms;
  Trajectory traj;
};

SingleRun run_single(const RunConfig& cfg) {
  SingleRun sr;
  sr.cfg = cfg;
  const double eps = single_epsilon(cfg);
  auto p = make_potential(cfg.potential_name, cfg.shape_b);
  sr.ctx = make_context(p, eps, cfg.alpha, cfg.L, cfg.quad);
  sr.rate = kramers_rate(*p);

  GradingSpec gs;
  gs.mode = (cfg.grading == "uniform") ? GradingSpec::Mode::uniform
                                       : GradingSpec::Mode::graded;
  gs.eps_aware = cfg.eps_aware;
  gs.epsilon = eps;
  sr.grid = build_grid(cfg.L, cfg.n_base, gs);
  sr.op = assemble_operator(sr.ctx, sr.grid);

  if (cfg.initial_profile.empty()) {
    sr.init = well_prepared_initial(sr.ctx, sr.op, cfg.u0, &sr.norms);
  } else {
    const auto rows = read_profile_csv(cfg.initial_profile);
    if (rows.front().first > -cfg.L || rows.back().first < cfg.L)
      throw config_error("initial profile must cover [-L, L]");
    std::vector<double> vals(sr.op.n());
    std::size_t j = 0;
    for (int i = 0; i < sr.op.n(); ++i) {
      const double x = sr.grid.centers[i];
      while (j + 2 < rows.size() && rows[j + 1].first < x) ++j;
      const auto& [x0, y0] = rows[j];
      const auto& [x1, y1] = rows[j + 1];
      vals[i] = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
    sr.init = custom_initial(sr.op, std::move(vals));
  }

  EvolveControls controls;
  controls.dt = cfg.dt;
  controls.theta = cfg.theta;
  controls.snapshots_per_unit = cfg.snapshots_per_unit;
  controls.record_every_step = cfg.record_every_step;
  sr.traj = evolve(sr.ctx, sr.op, sr.init, cfg.T, controls);
  return sr;
}

json rayleigh_to_json(const RayleighReport& rr, bool with_series) {
  json j{{"eps_functional", rr.eps_functional},
         {"metric_time_integral", rr.metric_time_integral},
         {"de_time_integral", rr.de_time_integral},
         {"limit_functional", rr.limit_functional},
         {"limit_metric_integral", rr.limit_metric_integral}};
  if (with_series) j["per_step_metric"] = rr.per_step_metric;
  return j;
}

int cmd_check(const std::string& name, double shape_b, bool as_json) {
  auto p = make_potential(name, shape_b);
  const AssumptionReport rep = check_assumptions(*p);
  if (as_json) {
    json checks = json::array();
    for (const auto& c : rep.checks)
      checks.push_back({{"name", c.name},
                        {"pass", c.pass},
                        {"advisory", c.advisory},
                        {"worst", c.worst}});
    json j{{"potential", p->name()},
           {"core_pass", rep.core_pass()},
           {"advisory_pass", rep.advisory_pass()},
           {"checks", checks}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf("potential %s\n", p->name().c_str());
    for (const auto& c : rep.checks)
      std::printf("  %-28s %s%s  worst %.3e\n", c.name.c_str(),
                  c.pass ? "pass" : "FAIL", c.advisory ? " (advisory)" : "",
                  c.worst);
    std::printf("core assumptions: %s\n", rep.core_pass() ? "pass" : "FAIL");
  }
  return rep.core_pass() ? 0 : 1;
}

int cmd_rate(const std::string& name, double shape_b, double eps, bool as_json) {
  auto p = make_potential(name, shape_b);
  const RateConstant rate = kramers_rate(*p);
  if (!(eps > 0.0 && eps < 1.0)) throw config_error("rate: --eps must lie in (0,1)");
  const double tau = std::exp(-2.0 * std::log(eps) - 1.0 / (eps * eps));
  const double z_asym = asymptotic_partition(*p, eps);
  if (as_json) {
    json j{{"k", rate.k},
           {"tau", tau},
           {"Z_asym", z_asym},
           {"curvature_barrier", rate.curvature_barrier},
           {"curvature_well", rate.curvature_well}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf("k      = %.17g\n", rate.k);
    std::printf("tau    = %.17g\n", tau);
    std::printf("Z_asym = %.17g\n", z_asym);
  }
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  const SingleRun sr = run_single(cfg);
  const fs::path out(cfg.out_dir);
  write_snapshots_csv((out / "snapshots.csv").string(), sr.op, sr.traj);
  write_diagnostics_csv((out / "diagnostics.csv").string(), sr.op, sr.ctx, sr.traj);

  double sup_err = 0.0, final_u_plus = 0.0;
  for (const auto& snap : sr.traj.snapshots) {
    const double up = masses(sr.op, snap).u_plus;
    final_u_plus = up;
    if (cfg.initial_profile.empty())
      sup_err = std::max(
          sup_err, std::abs(up - limit_solution(cfg.u0, sr.rate.k, snap.t)));
  }
  const RayleighReport rr = rayleigh_epsilon(sr.op, sr.traj, sr.rate, cfg.u0);

  json j{{"epsilon", sr.ctx.epsilon},
         {"alpha", cfg.alpha},
         {"potential", {{"name", cfg.potential_name}, {"shape_b", cfg.shape_b}}},
         {"grid", {{"L", cfg.L}, {"n", sr.grid.n()}, {"grading", cfg.grading}}},
         {"time", {{"dt", sr.traj.controls.dt}, {"theta", cfg.theta}, {"T", cfg.T}}},
         {"seed", cfg.seed},
         {"rate_k", sr.rate.k},
         {"tau", sr.ctx.tau},
         {"log_partition", sr.ctx.log_partition},
         {"x_return", sr.ctx.x_return},
         {"prepared_norms",
          {{"l2_gamma", sr.norms.l2_gamma},
           {"grad_gamma_over_tau", sr.norms.grad_gamma_over_tau},
           {"min_u", sr.norms.min_u},
           {"max_u", sr.norms.max_u}}},
         {"mass_drift", sr.traj.mass_drift()},
         {"max_apriori1_residual", sr.traj.max_apriori1_residual()},
         {"max_apriori2_residual", sr.traj.max_apriori2_residual()},
         {"final_u_plus", final_u_plus},
         {"sup_u_error", cfg.initial_profile.empty() ? json(sup_err) : json()},
         {"rayleigh", rayleigh_to_json(rr, cfg.record_every_step)}};
  write_text_file((out / "summary.json").string(), j.dump(2) + "\n");

  std::printf("eps %.4g: %zu snapshots, mass drift %.3e, sup residuals %.3e / %.3e\n",
              sr.ctx.epsilon, sr.traj.snapshots.size(), sr.traj.mass_drift(),
              sr.traj.max_apriori1_residual(), sr.traj.max_apriori2_residual());
  std::printf("wrote %s\n", (out / "summary.json").string().c_str());
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  const ConvergenceReport rep = sweep(cfg, cfg.epsilons);
  write_report_files(cfg.out_dir, rep);
  for (const auto& v : rep.verdicts)
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", v.name.c_str(),
                v.detail.c_str());
  if (rep.u_error_fit)
    std::printf("u_error_fit: slope %.4g, r2 %.6g\n", rep.u_error_fit->slope,
                rep.u_error_fit->r2);
  std::printf("report written to %s\n", cfg.out_dir.c_str());
  return rep.all_pass() ? 0 : 1;
}

int cmd_rayleigh(RunConfig cfg, int competitors) {
  cfg.record_every_step = true;
  if (!cfg.initial_profile.empty())
    throw config_error("rayleigh: uses the well-prepared initial profile only");
  const SingleRun sr = run_single(cfg);
  const RayleighReport rr = rayleigh_epsilon(sr.op, sr.traj, sr.rate, cfg.u0);
  const auto gaps = minimality_probe(sr.op, sr.ctx, sr.traj, competitors, cfg.seed);

  double min_gap = 0.0;
  if (!gaps.empty()) {
    min_gap = gaps.front();
    for (double g : gaps) min_gap = std::min(min_gap, g);
  }
  const bool minimal = min_gap >= -1e-6;

  json j{{"epsilon", sr.ctx.epsilon},
         {"rayleigh", rayleigh_to_json(rr, false)},
         {"competitors", competitors},
         {"seed", cfg.seed},
         {"min_gap", min_gap},
         {"gaps", gaps},
         {"minimal", minimal}};
  fs::create_directories(cfg.out_dir);
  write_text_file((fs::path(cfg.out_dir) / "rayleigh.json").string(),
                  j.dump(2) + "\n");

  std::printf("J_eps %.8g  J_limit %.8g  gap %.3e\n", rr.eps_functional,
              rr.limit_functional, std::abs(rr.eps_functional - rr.limit_functional));
  std::printf("minimality: %d competitors, smallest gap %.3e -> %s\n", competitors,
              min_gap, minimal ? "pass" : "FAIL");
  return minimal ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"double-well Kramers-Smoluchowski laboratory"};
  app.require_subcommand(1);

  std::string pot_name = "quartic";
  double shape_b = 0.5;
  double rate_eps = 0.25;
  bool as_json = false;
  int competitors = 50;

  auto* check = app.add_subcommand("check", "audit the potential assumptions");
  check->add_option("--potential", pot_name, "quartic or sixth");
  check->add_option("--shape-b", shape_b, "sixth-order shape parameter");
  check->add_flag("--json", as_json, "machine-readable output");

  auto* rate = app.add_subcommand("rate", "print k, tau, Z_asym");
  rate->add_option("--potential", pot_name, "quartic or sixth");
  rate->add_option("--shape-b", shape_b, "sixth-order shape parameter");
  rate->add_option("--eps", rate_eps, "epsilon in (0,1)")->required();
  rate->add_flag("--json", as_json, "machine-readable output");

  Overrides sim_ov, sweep_ov, ray_ov;
  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  add_common_flags(simulate, sim_ov);
  auto* sweep_cmd = app.add_subcommand("sweep", "epsilon sweep with verdicts");
  add_common_flags(sweep_cmd, sweep_ov);
  auto* rayleigh = app.add_subcommand("rayleigh",
                                      "time-integrated functional and minimality");
  add_common_flags(rayleigh, ray_ov);
  rayleigh->add_option("--competitors", competitors, "perturbed velocities to test");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(pot_name, shape_b, as_json);
    if (rate->parsed()) return cmd_rate(pot_name, shape_b, rate_eps, as_json);
    if (simulate->parsed()) return cmd_simulate(resolve_config(sim_ov));
    if (sweep_cmd->parsed()) return cmd_sweep(resolve_config(sweep_ov));
    if (rayleigh->parsed()) return cmd_rayleigh(resolve_config(ray_ov), competitors);
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
