#pragma once

#include <string>
#include <vector>

#include "kslab/experiments.hpp"
#include "kslab/fokker_planck.hpp"

namespace kslab {

// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

// Stacked snapshot table: t,x,u,rho,log_gamma, one row per cell per snapshot.
void write_snapshots_csv(const std::string& path, const DiscreteOperator& op,
                         const Trajectory& traj);

struct SnapshotRow {
  double t, x, u, rho, log_gamma;
};
std::vector<SnapshotRow> read_snapshots_csv(const std::string& path);

// Per-snapshot diagnostics: t,u_plus,u_minus,E_eps,g_eps,apriori1_residual,
// apriori2_residual,layer_sup_I,layer_J0.
void write_diagnostics_csv(const std::string& path, const DiscreteOperator& op,
                           const EpsilonContext& ctx, const Trajectory& traj);

std::string report_to_json(const ConvergenceReport& report);
void write_report_files(const std::string& dir, const ConvergenceReport& report);

// Two-column x,u profile used for custom initial data.
std::vector<std::pair<double, double>> read_profile_csv(const std::string& path);

}  // namespace kslab
