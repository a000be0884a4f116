#pragma once

#include <vector>

#include "kslab/asymptotics.hpp"
#include "kslab/fokker_planck.hpp"

namespace kslab {

struct MassSplit {
  double u_plus = 0.0;   // 2 int_0^L rho
  double u_minus = 0.0;  // 2 int_{-L}^0 rho
  double total = 0.0;
};

MassSplit masses(const DiscreteOperator& op, const Field& f);

struct IntervalMasses {
  double J_plus = 0.0;
  double J_minus = 0.0;
  double J_bar = 0.0;
};

// Integrals of rho over the interval family (straddling cells split by width
// fraction).  For a velocity field, J_bar carries the absolute integral.
IntervalMasses interval_masses(const DiscreteOperator& op, const EpsilonContext& ctx,
                               const Field& f);
IntervalMasses interval_velocity_masses(const DiscreteOperator& op,
                                        const EpsilonContext& ctx,
                                        const std::vector<double>& velocity);

// Relative entropy of rho = gamma u against gamma, shifted by -log Z:
// E_eps = sum m_i u_i ln u_i - log_partition.
double energy_epsilon(const DiscreteOperator& op, const Field& f);

// Metric discharge of a tangent velocity at state u, via the face
// antiderivative: g_eps(v, v) = sum tau f^2 / rho_face * gap, where f is the
// prefix sum of -v and rho_face uses the logarithmic mean of u.
double metric_step(const DiscreteOperator& op, const std::vector<double>& u_state,
                   const std::vector<double>& velocity);

// Same integral evaluated directly from face gradients of the state:
// sum face_coef (du)^2 / logmean(u).  Agrees with metric_step applied to the
// state's own flux divergence up to roundoff.
double metric_from_state(const DiscreteOperator& op, const std::vector<double>& u_state);

// DE_eps(rho) v = sum f_face * d(ln u) over interior faces.
double de_pairing(const DiscreteOperator& op, const std::vector<double>& u_state,
                  const std::vector<double>& velocity);

// Time-integrated Rayleigh functional sum dt [ g/2 + DE.v ] of per-interval
// velocities against the trajectory's right-endpoint states.
double rayleigh_functional(const DiscreteOperator& op, const Trajectory& traj,
                           const std::vector<std::vector<double>>& velocities);

struct RayleighReport {
  double eps_functional = 0.0;        // J_eps of the recorded velocity
  double metric_time_integral = 0.0;  // int g_eps dt
  double de_time_integral = 0.0;      // int DE.v dt
  double limit_functional = 0.0;      // J of the two-state flow, = -(E(u0)-E(u_T))/2
  double limit_metric_integral = 0.0; // int g_u(du/dt, du/dt) dt
  std::vector<double> per_step_metric;
};

RayleighReport rayleigh_epsilon(const DiscreteOperator& op, const Trajectory& traj,
                                const RateConstant& rate, double u0);

// Smoothed two-state velocity: v/2 (psi(x-1) - psi(x+1)) with a normalized
// cosine^2 bump psi supported on (-eps^alpha, eps^alpha).  Integrates to zero.
std::vector<double> recovery_velocity(const EpsilonContext& ctx,
                                      const DiscreteOperator& op, double v);

struct LayerError {
  double sup_I = 0.0;    // sup over t and x in I_plus/I_minus of |u - u_tilde|
  double l2t_J0 = 0.0;   // int_0^T sup_{J_zero} |u - u_tilde|^2 dt
};

// u_path supplies the mass coordinate at each snapshot time.
LayerError layer_error(const DiscreteOperator& op, const EpsilonContext& ctx,
                       const Trajectory& traj, const std::vector<double>& u_path);

}  // namespace kslab
