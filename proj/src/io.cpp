#include "kslab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "kslab/diagnostics.hpp"
#include "kslab/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace kslab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw config_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
  if (!out) throw config_error("write failed: " + path);
}

void write_snapshots_csv(const std::string& path, const DiscreteOperator& op,
                         const Trajectory& traj) {
  auto out = open_out(path);
  out << "t,x,u,rho,log_gamma\n";
  for (const auto& snap : traj.snapshots) {
    const std::string ts = format_double(snap.t);
    for (int i = 0; i < op.n(); ++i) {
      const double rho = op.mass[i] * snap.u[i] / op.grid.widths[i];
      out << ts << ',' << format_double(op.grid.centers[i]) << ','
          << format_double(snap.u[i]) << ',' << format_double(rho) << ','
          << format_double(op.lg_cell[i]) << '\n';
    }
  }
  if (!out) throw config_error("write failed: " + path);
}

std::vector<SnapshotRow> read_snapshots_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x,u,rho,log_gamma", 0) != 0)
    throw config_error("unexpected snapshot header in " + path);
  std::vector<SnapshotRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SnapshotRow r;
    std::stringstream ss(line);
    std::string tok;
    double* fields[5] = {&r.t, &r.x, &r.u, &r.rho, &r.log_gamma};
    for (int f = 0; f < 5; ++f) {
      if (!std::getline(ss, tok, ','))
        throw config_error("short snapshot row in " + path);
      *fields[f] = std::stod(tok);
    }
    rows.push_back(r);
  }
  return rows;
}

void write_diagnostics_csv(const std::string& path, const DiscreteOperator& op,
                           const EpsilonContext& ctx, const Trajectory& traj) {
  auto out = open_out(path);
  out << "t,u_plus,u_minus,E_eps,g_eps,apriori1_residual,apriori2_residual,"
         "layer_sup_I,layer_J0\n";
  // Same discrete profile the layer diagnostics use, so the CSV columns match
  // what the convergence report measures.
  const std::vector<double> eta = transition_profile(ctx, op);
  std::size_t step_lo = 0;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& snap = traj.snapshots[k];
    const MassSplit ms = masses(op, snap);
    const double e = energy_epsilon(op, snap);

    double g = std::numeric_limits<double>::quiet_NaN();
    bool positive = true;
    for (double v : snap.u) positive = positive && v > 0.0;
    if (positive) g = metric_from_state(op, snap.u);

    double r1 = 0.0, r2 = 0.0;
    while (step_lo < traj.steps.size() &&
           traj.steps[step_lo].t <= snap.t + 1e-12 * std::max(1.0, snap.t)) {
      r1 = std::max(r1, traj.steps[step_lo].apriori1_residual);
      r2 = std::max(r2, traj.steps[step_lo].apriori2_residual);
      ++step_lo;
    }

    double sup_i = 0.0, sup_0 = 0.0;
    if (ms.u_plus > 0.0 && ms.u_plus < 2.0) {
      for (int i = 0; i < op.n(); ++i) {
        const double x = op.grid.centers[i];
        const bool in_i = ctx.intervals.I_plus.contains(x) ||
                          ctx.intervals.I_minus.contains(x);
        const bool in_0 = ctx.intervals.J_zero.contains(x);
        if (!in_i && !in_0) continue;
        const double err =
            std::abs(snap.u[i] - (1.0 + (ms.u_plus - 1.0) * eta[i]));
        if (in_i) sup_i = std::max(sup_i, err);
        if (in_0) sup_0 = std::max(sup_0, err);
      }
    } else {
      sup_i = std::numeric_limits<double>::quiet_NaN();
      sup_0 = sup_i;
    }

    out << format_double(snap.t) << ',' << format_double(ms.u_plus) << ','
        << format_double(ms.u_minus) << ',' << format_double(e) << ','
        << format_double(g) << ',' << format_double(r1) << ','
        << format_double(r2) << ',' << format_double(sup_i) << ','
        << format_double(sup_0) << '\n';
  }
  if (!out) throw config_error("write failed: " + path);
}

namespace {

json config_to_json(const RunConfig& cfg) {
  return json{
      {"potential", {{"name", cfg.potential_name}, {"shape_b", cfg.shape_b}}},
      {"run",
       {{"epsilons", cfg.epsilons},
        {"alpha", cfg.alpha},
        {"u0", cfg.u0},
        {"T", cfg.T},
        {"seed", cfg.seed},
        {"initial_profile", cfg.initial_profile}}},
      {"grid",
       {{"L", cfg.L},
        {"n_base", cfg.n_base},
        {"grading", cfg.grading},
        {"eps_aware", cfg.eps_aware}}},
      {"time",
       {{"dt", cfg.dt},
        {"theta", cfg.theta},
        {"snapshots_per_unit", cfg.snapshots_per_unit},
        {"record_every_step", cfg.record_every_step}}},
      {"quadrature",
       {{"nodes", cfg.quad.nodes},
        {"rel_tol", cfg.quad.rel_tol},
        {"abs_tol", cfg.quad.abs_tol},
        {"max_depth", cfg.quad.max_depth},
        {"ladder_levels", cfg.quad.ladder_levels}}},
      {"output", {{"out_dir", cfg.out_dir}}}};
}

json run_to_json(const EpsRunResult& r) {
  json j{{"epsilon", r.epsilon}, {"ok", r.ok}};
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  j["partition_ratio_err"] = r.partition_ratio_err;
  j["sup_u_error"] = r.sup_u_error;
  j["metric_gap"] = r.metric_gap;
  j["de_gap"] = r.de_gap;
  j["rayleigh_gap"] = r.rayleigh_gap;
  j["recovery_metric_gap"] = r.recovery_metric_gap;
  j["layer_sup_I"] = r.layer_sup_I;
  j["layer_l2t_J0"] = r.layer_l2t_J0;
  j["layer_integral_dev"] = r.layer_integral_dev;
  j["mass_drift"] = r.mass_drift;
  j["max_apriori1"] = r.max_apriori1;
  j["max_apriori2"] = r.max_apriori2;
  j["apriori2_tol"] = r.apriori2_tol;
  j["energy_monotone"] = r.energy_monotone;
  json limits = json::array();
  for (const auto& e : r.limits.entries)
    limits.push_back({{"name", e.name},
                      {"value", e.value},
                      {"target", e.target},
                      {"diverges", e.diverges}});
  j["measure_limits"] = limits;
  return j;
}

}  // namespace

std::string report_to_json(const ConvergenceReport& report) {
  json j;
  j["config"] = config_to_json(report.config);
  json runs = json::array();
  for (const auto& r : report.runs) runs.push_back(run_to_json(r));
  j["runs"] = runs;
  json verdicts = json::array();
  for (const auto& v : report.verdicts)
    verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  j["verdicts"] = verdicts;
  if (report.u_error_fit)
    j["u_error_fit"] = {{"slope", report.u_error_fit->slope},
                        {"intercept", report.u_error_fit->intercept},
                        {"r2", report.u_error_fit->r2}};
  else
    j["u_error_fit"] = nullptr;
  j["all_pass"] = report.all_pass();
  return j.dump(2) + "\n";
}

void write_report_files(const std::string& dir, const ConvergenceReport& report) {
  fs::create_directories(dir);
  write_text_file((fs::path(dir) / "report.json").string(), report_to_json(report));

  {
    auto out = open_out((fs::path(dir) / "rates.csv").string());
    out << "epsilon,sup_u_error,partition_ratio_err,metric_gap,de_gap,"
           "rayleigh_gap,recovery_metric_gap,layer_sup_I,layer_l2t_J0,"
           "layer_integral_dev,mass_drift,max_apriori1,max_apriori2\n";
    for (const auto& r : report.runs) {
      if (!r.ok) continue;
      out << format_double(r.epsilon) << ',' << format_double(r.sup_u_error)
          << ',' << format_double(r.partition_ratio_err) << ','
          << format_double(r.metric_gap) << ',' << format_double(r.de_gap)
          << ',' << format_double(r.rayleigh_gap) << ','
          << format_double(r.recovery_metric_gap) << ','
          << format_double(r.layer_sup_I) << ',' << format_double(r.layer_l2t_J0)
          << ',' << format_double(r.layer_integral_dev) << ','
          << format_double(r.mass_drift) << ',' << format_double(r.max_apriori1)
          << ',' << format_double(r.max_apriori2) << '\n';
    }
  }

  {
    auto out = open_out((fs::path(dir) / "measure_limits.csv").string());
    out << "epsilon,name,value,target,diverges\n";
    for (const auto& r : report.runs) {
      if (!r.ok) continue;
      for (const auto& e : r.limits.entries)
        out << format_double(r.epsilon) << ',' << e.name << ','
            << format_double(e.value) << ',' << format_double(e.target) << ','
            << (e.diverges ? 1 : 0) << '\n';
    }
  }

  for (const auto& r : report.runs) {
    if (!r.ok) continue;
    const std::string name = "overlay_eps_" + format_short(r.epsilon) + ".csv";
    auto out = open_out((fs::path(dir) / name).string());
    out << "t,u_plus,u_limit\n";
    for (std::size_t i = 0; i < r.times.size(); ++i)
      out << format_double(r.times[i]) << ',' << format_double(r.u_plus_path[i])
          << ',' << format_double(r.u_limit_path[i]) << '\n';
  }

  {
    std::ostringstream os;
    for (const auto& v : report.verdicts)
      os << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.detail << '\n';
    if (report.u_error_fit)
      os << "u_error_fit: slope " << format_double(report.u_error_fit->slope)
         << ", r2 " << format_double(report.u_error_fit->r2) << '\n';
    os << (report.all_pass() ? "ALL PASS\n" : "FAILURES PRESENT\n");
    write_text_file((fs::path(dir) / "verdicts.txt").string(), os.str());
  }
}

std::vector<std::pair<double, double>> read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open profile: " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw config_error("profile rows need x,u columns: " + path);
    try {
      rows.push_back({std::stod(a), std::stod(b)});
    } catch (const std::exception&) {
      if (first) {
        first = false;
        continue;  // header line
      }
      throw config_error("bad profile row '" + line + "' in " + path);
    }
    first = false;
  }
  if (rows.size() < 2) throw config_error("profile needs at least two rows: " + path);
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].first > rows[i - 1].first))
      throw config_error("profile x column must be strictly increasing: " + path);
  return rows;
}

}  // namespace kslab
