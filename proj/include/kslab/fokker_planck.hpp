#pragma once

#include <vector>

#include "kslab/grid.hpp"
#include "kslab/measure.hpp"

namespace kslab {

// Finite-volume form of  tau gamma u_t = (gamma u_x)_x  with zero-flux ends.
// A is tridiagonal, symmetric in the weighted inner product sum(m_i u_i v_i),
// negative semidefinite with kernel = constants.  All gamma ratios are formed
// in the log domain; cell masses m_i are normalized to sum to one so that the
// discrete measure is a probability measure.
struct DiscreteOperator {
  Grid grid;
  double tau = 0.0;
  double log_tau = 0.0;
  double log_partition = 0.0;
  std::vector<double> lg_cell;   // log gamma at centers (discrete-normalized)
  std::vector<double> lg_face;   // interior faces, geometric mean of neighbors
  std::vector<double> mass;      // m_i = gamma_i w_i, sums to 1
  std::vector<double> sub, diag, sup;  // rows of A
  std::vector<double> face_coef; // gamma_face / (tau * gap): Dirichlet weights

  int n() const { return grid.n(); }
};

DiscreteOperator assemble_operator(const EpsilonContext& ctx, const Grid& grid);

// A applied in flux-differenced form: neighbor differences are taken before
// any multiplication, so constant states map to exactly zero.
std::vector<double> apply_operator(const DiscreteOperator& op,
                                   const std::vector<double>& u);

struct Field {
  double t = 0.0;
  std::vector<double> u;  // relative density rho/gamma at cell centers
};

struct PreparedNorms {
  double l2_gamma = 0.0;            // sum m_i u_i^2
  double grad_gamma_over_tau = 0.0; // sum face_coef (du)^2 = int gamma u_x^2 / tau
  double min_u = 0.0;
  double max_u = 0.0;
};

// Grid rendering of the transition profile eta: -1/+1 at cells beyond the
// well bottoms, constant discrete flux across the faces in between -- the
// finite-volume harmonic shape for the assembled coefficients.  This is the
// discretization every grid-level comparison against 1 + (u-1) eta should
// use; sampling the smooth profile at cell centers instead leaves an O(h^2)
// mismatch that shows up as a floor in layer diagnostics and as a startup
// transient in the step identities.  Falls back to sampling the smooth
// profile when frozen faces interrupt the span (deep asymptotic regime).
std::vector<double> transition_profile(const EpsilonContext& ctx,
                                       const DiscreteOperator& op);

// u0 in (0,2): initial profile 1 + (u0-1) eta(x), bounded between u0 and 2-u0.
Field well_prepared_initial(const EpsilonContext& ctx, const DiscreteOperator& op,
                            double u0, PreparedNorms* norms = nullptr);

// Caller-supplied positive cell values.
Field custom_initial(const DiscreteOperator& op, std::vector<double> values);

// One theta-scheme step (theta in [1/2, 1]): (I - theta dt A) u+ = (I + (1-theta) dt A) u.
// Backward Euler (theta = 1) preserves positivity and the discrete max principle.
Field step(const DiscreteOperator& op, const Field& f, double dt, double theta);

struct EvolveControls {
  double dt = 5e-4;
  double theta = 1.0;
  double snapshots_per_unit = 100.0;
  bool record_every_step = false;  // snapshot (and velocity) at every step
};

struct StepStats {
  double t = 0.0;     // time after the step
  double mass = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double entropy_energy = 0.0;     // sum m u ln u - log_partition
  double dissipation = 0.0;        // sum face_coef (du_theta)^2
  double metric = 0.0;             // g_eps of the step velocity at the new state
  double de_pairing = 0.0;         // DE_eps . velocity
  double apriori1_residual = 0.0;  // L2 identity residual of this step
  double apriori2_residual = 0.0;  // dissipation identity residual of this step
};

struct Trajectory {
  std::vector<Field> snapshots;
  // Cell values of d(rho)/dt averaged over each snapshot interval.
  std::vector<std::vector<double>> step_velocities;
  std::vector<StepStats> steps;
  EvolveControls controls;
  double T = 0.0;

  double mass_drift() const;           // max |mass(t) - mass(0)|
  double max_apriori1_residual() const;
  double max_apriori2_residual() const;
  double metric_time_integral() const; // sum dt * metric
  double de_time_integral() const;     // sum dt * de_pairing
};

// Integrates to time T, recording snapshots, interval velocities, and
// per-step identities.  Aborts with numerical_error on non-finite values.
Trajectory evolve(const EpsilonContext& ctx, const DiscreteOperator& op,
                  const Field& initial, double T, const EvolveControls& controls);

}  // namespace kslab
