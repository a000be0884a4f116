#include "kslab/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

constexpr double kMaxLogCoef = 650.0;  // overflow guard for far-tail rate ratios

double log_mean(double a, double b) {
  // exact form (a-b)/(ln a - ln b); arithmetic mean once cancellation bites
  if (a == b) return a;
  const double d = std::log(a) - std::log(b);
  if (std::abs(d) < 1e-8) return 0.5 * (a + b);
  return (a - b) / d;
}

}  // namespace

DiscreteOperator assemble_operator(const EpsilonContext& ctx, const Grid& grid) {
  const int n = grid.n();
  DiscreteOperator op;
  op.grid = grid;
  op.tau = ctx.tau;
  op.log_tau = ctx.log_tau;
  op.log_partition = ctx.log_partition;

  op.lg_cell.resize(n);
  for (int i = 0; i < n; ++i) op.lg_cell[i] = log_gamma(ctx, grid.centers[i]);

  // normalize the discrete measure so sum m_i = 1 exactly at the cell level
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp(op.lg_cell[i]) * grid.widths[i];
  const double log_s = std::log(s);
  op.mass.resize(n);
  for (int i = 0; i < n; ++i) {
    op.lg_cell[i] -= log_s;
    op.mass[i] = std::exp(op.lg_cell[i]) * grid.widths[i];
  }

  // Faces whose weight sits e^{-80} below the peak are frozen (zero flux).
  // Out there gamma drops by e^{40}+ per cell, so u-space fluxes are not
  // representable in doubles and feed an instability; the frozen band holds
  // ~e^{-80} of the mass, far below every tolerance we report.
  double lg_peak = op.lg_cell[0];
  for (int i = 1; i < n; ++i) lg_peak = std::max(lg_peak, op.lg_cell[i]);
  const double lg_cut = lg_peak - 80.0;

  op.lg_face.resize(n - 1);
  op.face_coef.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    op.lg_face[i] = 0.5 * (op.lg_cell[i] + op.lg_cell[i + 1]);
    op.face_coef[i] =
        (op.lg_face[i] >= lg_cut)
            ? std::exp(std::min(op.lg_face[i] - op.log_tau, kMaxLogCoef)) /
                  grid.face_gaps[i]
            : 0.0;
  }

  op.sub.assign(n, 0.0);
  op.diag.assign(n, 0.0);
  op.sup.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double up = 0.0, down = 0.0;
    if (i + 1 < n && op.lg_face[i] >= lg_cut)
      up = std::exp(std::min(op.lg_face[i] - op.log_tau - op.lg_cell[i], kMaxLogCoef)) /
           (grid.widths[i] * grid.face_gaps[i]);
    if (i > 0 && op.lg_face[i - 1] >= lg_cut)
      down = std::exp(std::min(op.lg_face[i - 1] - op.log_tau - op.lg_cell[i], kMaxLogCoef)) /
             (grid.widths[i] * grid.face_gaps[i - 1]);
    op.sup[i] = up;
    op.sub[i] = down;
    op.diag[i] = -(up + down);
  }
  return op;
}

std::vector<double> apply_operator(const DiscreteOperator& op,
                                   const std::vector<double>& u) {
  const int n = op.n();
  if (static_cast<int>(u.size()) != n)
    throw config_error("apply_operator: field size mismatch");
  std::vector<double> au(n);
  for (int i = 0; i < n; ++i) {
    const double fup = (i + 1 < n) ? op.sup[i] * (u[i + 1] - u[i]) : 0.0;
    const double fdn = (i > 0) ? op.sub[i] * (u[i] - u[i - 1]) : 0.0;
    au[i] = fup - fdn;
  }
  return au;
}

std::vector<double> transition_profile(const EpsilonContext& ctx,
                                       const DiscreteOperator& op) {
  const int n = op.n();
  int a = 0, b = n - 1;
  while (a < n && op.grid.centers[a] <= -1.0) ++a;
  while (b >= 0 && op.grid.centers[b] >= 1.0) --b;
  bool harmonic_ok = a > 0 && b + 1 < n && a <= b + 1;
  double resistance = 0.0;
  for (int j = a - 1; harmonic_ok && j <= b; ++j) {
    if (op.face_coef[j] > 0.0)
      resistance += 1.0 / op.face_coef[j];
    else
      harmonic_ok = false;  // frozen face inside the span: profile undefined
  }
  std::vector<double> eta(n);
  if (harmonic_ok) {
    for (int i = 0; i < a; ++i) eta[i] = -1.0;
    for (int i = b + 1; i < n; ++i) eta[i] = 1.0;
    double prefix = 0.0;
    for (int j = a - 1; j <= b; ++j) {
      prefix += 1.0 / op.face_coef[j];
      eta[j + 1] = -1.0 + 2.0 * (prefix / resistance);
    }
  } else {
    // Deep asymptotic regime: barrier faces below the freeze cutoff.  Fall
    // back to sampling the smooth profile; nobody time-steps down here.
    for (int i = 0; i < n; ++i) eta[i] = ctx.layer->eval_eta(op.grid.centers[i]);
  }
  return eta;
}

Field well_prepared_initial(const EpsilonContext& ctx, const DiscreteOperator& op,
                            double u0, PreparedNorms* norms) {
  if (!(u0 > 0.0 && u0 < 2.0))
    throw std::domain_error("well_prepared_initial: u0 must lie in (0,2)");
  const int n = op.n();
  Field f;
  f.t = 0.0;
  f.u.resize(n);
  const std::vector<double> eta = transition_profile(ctx, op);
  for (int i = 0; i < n; ++i) f.u[i] = 1.0 + (u0 - 1.0) * eta[i];

  if (norms) {
    PreparedNorms pn;
    pn.l2_gamma = 0.0;
    for (int i = 0; i < n; ++i) pn.l2_gamma += op.mass[i] * f.u[i] * f.u[i];
    pn.grad_gamma_over_tau = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double du = f.u[i + 1] - f.u[i];
      pn.grad_gamma_over_tau += op.face_coef[i] * du * du;
    }
    const auto [mn, mx] = std::minmax_element(f.u.begin(), f.u.end());
    pn.min_u = *mn;
    pn.max_u = *mx;
    *norms = pn;
  }
  return f;
}

Field custom_initial(const DiscreteOperator& op, std::vector<double> values) {
  if (static_cast<int>(values.size()) != op.n())
    throw config_error("custom_initial: size mismatch with grid");
  for (double v : values)
    if (!std::isfinite(v) || v <= 0.0)
      throw std::domain_error("custom_initial: values must be positive and finite");
  Field f;
  f.t = 0.0;
  f.u = std::move(values);
  return f;
}

namespace {

struct StepWorkspace {
  std::vector<double> cw, inv_d, rhs, delta, resid, work;
};

// One theta step in increment form.  The scheme
//   (I - theta dt A) u_new = (I + (1-theta) dt A) u_old
// is solved as (I - theta dt A) delta = dt A u with u_new = u + delta, and
// the update is then rebuilt from the theta-midpoint face fluxes
//   Phi_j = C_j [(u_{j+1}-u_j) + theta (delta_{j+1}-delta_j)],
//   u_new_i = u_i + dt (Phi_i - Phi_{i-1}) / m_i.
// Differences are taken before any multiplication, so constant states are
// bitwise fixed points, and the flux telescoping conserves mass to roundoff
// of the increments even though the entries of A span ~e^{1/eps^2}.  Solving
// for u_new directly would lose ~|dt A| * machine epsilon per step against
// the O(1) solution, which is fatal at desk-scale eps.
void theta_step(const DiscreteOperator& op, const std::vector<double>& u,
                std::vector<double>& out, double dt, double theta,
                StepWorkspace& ws) {
  const int n = op.n();
  const double td = theta * dt;

  ws.cw.resize(n);
  ws.inv_d.resize(n);
  ws.rhs.resize(n);
  ws.delta.resize(n);
  ws.resid.resize(n);
  ws.work.resize(n);

  // Thomas factorization of I - theta dt A (diagonally dominant M-matrix).
  {
    const double d0 = 1.0 + td * (op.sup[0] + op.sub[0]);
    ws.inv_d[0] = 1.0 / d0;
    ws.cw[0] = -td * op.sup[0] * ws.inv_d[0];
    for (int i = 1; i < n; ++i) {
      const double lower = -td * op.sub[i];
      const double denom = (1.0 + td * (op.sup[i] + op.sub[i])) - lower * ws.cw[i - 1];
      ws.inv_d[i] = 1.0 / denom;
      ws.cw[i] = (i + 1 < n) ? -td * op.sup[i] * ws.inv_d[i] : 0.0;
    }
  }

  auto solve = [&](const std::vector<double>& b, std::vector<double>& x) {
    ws.work[0] = b[0] * ws.inv_d[0];
    for (int i = 1; i < n; ++i)
      ws.work[i] = (b[i] + td * op.sub[i] * ws.work[i - 1]) * ws.inv_d[i];
    x.resize(n);
    x[n - 1] = ws.work[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = ws.work[i] - ws.cw[i] * x[i + 1];
  };

  // rhs = dt * A u, flux-differenced
  for (int i = 0; i < n; ++i) {
    const double fup = (i + 1 < n) ? op.sup[i] * (u[i + 1] - u[i]) : 0.0;
    const double fdn = (i > 0) ? op.sub[i] * (u[i] - u[i - 1]) : 0.0;
    ws.rhs[i] = dt * (fup - fdn);
  }
  solve(ws.rhs, ws.delta);

  // One refinement pass: the residual is cheap and recovers the digits the
  // stiff elimination loses.
  for (int i = 0; i < n; ++i) {
    const double fup = (i + 1 < n) ? op.sup[i] * (ws.delta[i + 1] - ws.delta[i]) : 0.0;
    const double fdn = (i > 0) ? op.sub[i] * (ws.delta[i] - ws.delta[i - 1]) : 0.0;
    ws.resid[i] = ws.rhs[i] - ws.delta[i] + td * (fup - fdn);
  }
  std::vector<double>& corr = ws.rhs;  // rhs no longer needed
  solve(ws.resid, corr);
  for (int i = 0; i < n; ++i) ws.delta[i] += corr[i];

  // Conservative reconstruction from the midpoint fluxes.
  out.resize(n);
  double phi_prev = 0.0;
  for (int i = 0; i < n; ++i) {
    double phi = 0.0;
    if (i + 1 < n)
      phi = op.face_coef[i] *
            ((u[i + 1] - u[i]) + theta * (ws.delta[i + 1] - ws.delta[i]));
    const double net = phi - phi_prev;
    out[i] = (net == 0.0) ? u[i] : u[i] + dt * net / op.mass[i];
    phi_prev = phi;
  }
}

}  // namespace

Field step(const DiscreteOperator& op, const Field& f, double dt, double theta) {
  if (!(dt > 0.0)) throw config_error("step: dt must be positive");
  if (!(theta >= 0.5 && theta <= 1.0))
    throw config_error("step: theta must lie in [1/2, 1]");
  if (static_cast<int>(f.u.size()) != op.n())
    throw config_error("step: field size mismatch");
  Field out;
  out.t = f.t + dt;
  StepWorkspace ws;
  theta_step(op, f.u, out.u, dt, theta, ws);
  return out;
}

double Trajectory::mass_drift() const {
  if (steps.empty()) return 0.0;
  double m0 = steps.front().mass, drift = 0.0;
  for (const auto& s : steps) drift = std::max(drift, std::abs(s.mass - m0));
  return drift;
}

double Trajectory::max_apriori1_residual() const {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, s.apriori1_residual);
  return m;
}

double Trajectory::max_apriori2_residual() const {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, s.apriori2_residual);
  return m;
}

double Trajectory::metric_time_integral() const {
  double v = 0.0;
  const double dt = controls.dt;
  for (const auto& s : steps) v += dt * s.metric;
  return v;
}

double Trajectory::de_time_integral() const {
  double v = 0.0;
  const double dt = controls.dt;
  for (const auto& s : steps) v += dt * s.de_pairing;
  return v;
}

Trajectory evolve(const EpsilonContext& ctx, const DiscreteOperator& op,
                  const Field& initial, double T, const EvolveControls& controls) {
  (void)ctx;
  if (!(T > 0.0)) throw config_error("evolve: T must be positive");
  if (static_cast<int>(initial.u.size()) != op.n())
    throw config_error("evolve: field size mismatch");

  const long n_steps = std::max<long>(1, std::lround(T / controls.dt));
  const double dt = T / static_cast<double>(n_steps);
  long stride;
  if (controls.record_every_step) {
    stride = 1;
  } else {
    stride = std::max<long>(1, std::lround(1.0 / (dt * controls.snapshots_per_unit)));
  }

  const int n = op.n();
  Trajectory traj;
  traj.controls = controls;
  traj.controls.dt = dt;
  traj.T = T;
  traj.steps.reserve(n_steps);

  std::vector<double> u = initial.u;
  std::vector<double> u_new(n), lnu(n);
  StepWorkspace ws;

  auto snapshot = [&](double t, const std::vector<double>& uu) {
    Field f;
    f.t = t;
    f.u = uu;
    traj.snapshots.push_back(std::move(f));
  };
  snapshot(initial.t, u);

  auto dirichlet = [&](const std::vector<double>& uu) {
    double d = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double du = uu[i + 1] - uu[i];
      d += op.face_coef[i] * du * du;
    }
    return d;
  };

  double d_old = dirichlet(u);
  double l2_old = 0.0;
  for (int i = 0; i < n; ++i) l2_old += op.mass[i] * u[i] * u[i];

  std::vector<double> u_theta(n);
  double t = initial.t;
  long last_snap = 0;

  for (long s = 0; s < n_steps; ++s) {
    theta_step(op, u, u_new, dt, controls.theta, ws);
    t = initial.t + dt * static_cast<double>(s + 1);

    StepStats st;
    st.t = t;

    double mass = 0.0, l2_new = 0.0;
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (int i = 0; i < n; ++i) {
      mass += op.mass[i] * u_new[i];
      l2_new += op.mass[i] * u_new[i] * u_new[i];
      mn = std::min(mn, u_new[i]);
      mx = std::max(mx, u_new[i]);
    }
    st.mass = mass;
    st.min_u = mn;
    st.max_u = mx;
    if (!std::isfinite(mass))
      throw numerical_error("evolve: non-finite mass at t=" + std::to_string(t));

    const bool positive = mn > 0.0;
    double entropy = std::numeric_limits<double>::quiet_NaN();
    double metric = std::numeric_limits<double>::quiet_NaN();
    double de = std::numeric_limits<double>::quiet_NaN();
    if (positive) {
      for (int i = 0; i < n; ++i) lnu[i] = std::log(u_new[i]);
      entropy = 0.0;
      for (int i = 0; i < n; ++i) entropy += op.mass[i] * u_new[i] * lnu[i];
      entropy -= op.log_partition;
      metric = 0.0;
      de = 0.0;
      for (int i = 0; i + 1 < n; ++i) {
        const double du = u_new[i + 1] - u_new[i];
        const double dlnu = lnu[i + 1] - lnu[i];
        metric += op.face_coef[i] * du * du / log_mean(u_new[i], u_new[i + 1]);
        de -= op.face_coef[i] * du * dlnu;
      }
    } else if (controls.theta == 1.0) {
      throw numerical_error("evolve: positivity lost under backward Euler at t=" +
                            std::to_string(t));
    }
    st.entropy_energy = entropy;
    st.metric = metric;
    st.de_pairing = de;

    double d_theta;
    if (controls.theta == 1.0) {
      d_theta = dirichlet(u_new);
    } else {
      for (int i = 0; i < n; ++i)
        u_theta[i] = controls.theta * u_new[i] + (1.0 - controls.theta) * u[i];
      d_theta = dirichlet(u_theta);
    }
    st.dissipation = d_theta;
    st.apriori1_residual = std::abs(l2_new - l2_old + 2.0 * dt * d_theta);

    const double d_new = (controls.theta == 1.0) ? d_theta : dirichlet(u_new);
    double vel_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = (u_new[i] - u[i]) / dt;
      vel_norm += op.mass[i] * r * r;
    }
    st.apriori2_residual = std::abs(0.5 * (d_new - d_old) + dt * vel_norm);

    traj.steps.push_back(st);

    if ((s + 1) % stride == 0 || s + 1 == n_steps) {
      const double span = dt * static_cast<double>(s + 1 - last_snap);
      std::vector<double> vel(n);
      const auto& prev = traj.snapshots.back().u;
      for (int i = 0; i < n; ++i)
        vel[i] = op.mass[i] * (u_new[i] - prev[i]) / (op.grid.widths[i] * span);
      traj.step_velocities.push_back(std::move(vel));
      snapshot(t, u_new);
      last_snap = s + 1;
    }

    u.swap(u_new);
    l2_old = l2_new;
    d_old = d_new;
  }
  return traj;
}

}  // namespace kslab
