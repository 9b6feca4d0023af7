#pragma once

// Classical side of the strictly-dissipative (SD) toolbox: the 1D particle in
// a viscous medium, m*q'' + eta*q' = 0, its closed-form and RK4 trajectories,
// energy bookkeeping, and the SD classifier.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sdq/errors.hpp"

namespace sdq {

/// Parameters of the viscous-media system m*q'' + eta*q' = 0.
struct SDParams {
  double m = 1.0;    ///< mass, > 0
  double eta = 1.0;  ///< damping coefficient, > 0
  double q0 = 0.0;   ///< initial position
  double v0 = 1.0;   ///< initial velocity

  void validate() const {
    if (!(m > 0.0)) throw validation_error("SDParams: mass must be positive, got " + std::to_string(m));
    if (!(eta > 0.0)) throw validation_error("SDParams: eta must be positive, got " + std::to_string(eta));
  }

  /// Decay rate eta/m (1/s).
  double decay_rate() const { return eta / m; }

  /// Rest point the motion relaxes to: q0 + (m/eta)*v0.
  double q_limit() const { return q0 + (m / eta) * v0; }
};

/// Uniformly sampled (t, q, v) path.
struct Trajectory {
  std::vector<double> t;
  std::vector<double> q;
  std::vector<double> v;
  double dt = 0.0;

  std::size_t size() const { return t.size(); }

  /// Enforces the type invariants: equal lengths >= 2, uniform step.
  void check() const {
    if (t.size() < 2 || t.size() != q.size() || t.size() != v.size())
      throw validation_error("Trajectory: t/q/v must have equal length >= 2");
    if (!(dt > 0.0)) throw validation_error("Trajectory: dt must be positive");
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      const double step = t[i + 1] - t[i];
      // uniform within 1e-12 relative to the larger of the step and the timestamp
      const double tol = 1e-12 * std::max(dt, std::abs(t[i + 1]));
      if (std::abs(step - dt) > tol)
        throw validation_error("Trajectory: non-uniform time grid at sample " + std::to_string(i));
    }
  }
};

/// Uniform grid {0, dt, 2*dt, ...} covering [0, t_max].
inline std::vector<double> make_time_grid(double t_max, double dt) {
  if (!(dt > 0.0) || !(t_max > 0.0)) throw validation_error("time grid: t_max and dt must be positive");
  const auto n = static_cast<std::size_t>(std::llround(t_max / dt));
  if (n < 1) throw validation_error("time grid: needs at least 2 samples");
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = static_cast<double>(i) * dt;
  return t;
}

namespace detail {

inline double validate_uniform_grid(const std::vector<double>& t) {
  if (t.size() < 2) throw validation_error("time grid: needs at least 2 samples");
  if (t.front() != 0.0) throw validation_error("time grid: must start at t = 0");
  const double dt = t[1] - t[0];
  if (!(dt > 0.0)) throw validation_error("time grid: step must be positive");
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double tol = 1e-12 * std::max(dt, std::abs(t[i + 1]));
    if (std::abs((t[i + 1] - t[i]) - dt) > tol)
      throw validation_error("time grid: non-uniform step at sample " + std::to_string(i));
  }
  return dt;
}

}  // namespace detail

/// Closed-form trajectory of the viscous system.
///
/// q(t) = q_inf + (q0 - q_inf) * exp(-(eta/m) t) with q_inf = q0 + (m/eta) v0,
/// the unique solution matching q(0) = q0 and v(0) = v0; v(t) is its exact
/// derivative v0 * exp(-(eta/m) t).
inline Trajectory analytic_trajectory(const SDParams& p, const std::vector<double>& t_grid) {
  p.validate();
  const double dt = detail::validate_uniform_grid(t_grid);
  const double lam = p.decay_rate();
  const double q_inf = p.q_limit();
  Trajectory traj;
  traj.dt = dt;
  traj.t = t_grid;
  traj.q.resize(t_grid.size());
  traj.v.resize(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double decay = std::exp(-lam * t_grid[i]);
    traj.q[i] = q_inf + (p.q0 - q_inf) * decay;
    traj.v[i] = p.v0 * decay;
  }
  return traj;
}

/// Which second-order equation of motion to integrate.
enum class EomForm {
  original,     ///< m*q'' + eta*q' = 0
  transformed,  ///< m*q'' - (eta^2/m)*q = 0 (valid on the decaying branch only)
};

/// Fixed-step RK4 integration of the chosen equation of motion.
///
/// Classical RK4: local truncation error O(dt^5), global error O(dt^4).
/// The transformed form has a growing mode exp(+(eta/m) t); it is only
/// admissible on the decaying branch, so the initial state must satisfy
/// v0 = -(eta/m) q0 within 1e-9 relative or the call is rejected.
inline Trajectory integrate_eom(const SDParams& p, EomForm form, const std::vector<double>& t_grid) {
  p.validate();
  const double dt = detail::validate_uniform_grid(t_grid);
  const double lam = p.decay_rate();
  if (form == EomForm::transformed) {
    const double target = -lam * p.q0;
    const double scale = std::max(std::abs(p.v0), std::abs(target));
    if (std::abs(p.v0 - target) > 1e-9 * scale)
      throw validation_error(
          "integrate_eom: transformed form requires the decaying-branch state v0 = -(eta/m) q0; "
          "got v0 = " + std::to_string(p.v0) + ", -(eta/m) q0 = " + std::to_string(target) +
          " (anything else excites the growing mode exp(+(eta/m) t))");
  }

  const auto accel = [&](double q, double v) {
    return form == EomForm::original ? -lam * v : lam * lam * q;
  };

  Trajectory traj;
  traj.dt = dt;
  traj.t = t_grid;
  traj.q.resize(t_grid.size());
  traj.v.resize(t_grid.size());
  double q = p.q0;
  double v = p.v0;
  traj.q[0] = q;
  traj.v[0] = v;
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    const double k1q = v, k1v = accel(q, v);
    const double k2q = v + 0.5 * dt * k1v, k2v = accel(q + 0.5 * dt * k1q, v + 0.5 * dt * k1v);
    const double k3q = v + 0.5 * dt * k2v, k3v = accel(q + 0.5 * dt * k2q, v + 0.5 * dt * k2v);
    const double k4q = v + dt * k3v, k4v = accel(q + dt * k3q, v + dt * k3v);
    q += (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    traj.q[i + 1] = q;
    traj.v[i + 1] = v;
  }
  return traj;
}

/// Kinetic energy T = (1/2) m v^2.
inline double kinetic_energy(double m, double v) {
  if (!(m > 0.0)) throw validation_error("kinetic_energy: mass must be positive");
  return 0.5 * m * v * v;
}

/// Instantaneous dissipation power eta*v^2 (twice the Rayleigh function).
inline double rayleigh_power(double eta, double v) {
  if (!(eta > 0.0)) throw validation_error("rayleigh_power: eta must be positive");
  return eta * v * v;
}

/// Energy dissipated over the trajectory span: trapezoidal quadrature of
/// the power eta*v^2. For SD motion this converges to the kinetic-energy
/// drop T(t_a) - T(t_b).
inline double dissipated_work(const Trajectory& traj, double eta) {
  traj.check();
  if (!(eta > 0.0)) throw validation_error("dissipated_work: eta must be positive");
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i)
    w += 0.5 * traj.dt * (eta * traj.v[i] * traj.v[i] + eta * traj.v[i + 1] * traj.v[i + 1]);
  return w;
}

/// Per-sample energy bookkeeping along a trajectory.
struct EnergyLedger {
  std::vector<double> kinetic;     ///< T at each sample, >= 0
  std::vector<double> dissipated;  ///< cumulative W up to each sample
  std::vector<double> total;       ///< T + W; constant for SD motion
};

inline EnergyLedger energy_ledger(const Trajectory& traj, double m, double eta) {
  traj.check();
  if (!(m > 0.0) || !(eta > 0.0)) throw validation_error("energy_ledger: m and eta must be positive");
  EnergyLedger ledger;
  const std::size_t n = traj.size();
  ledger.kinetic.resize(n);
  ledger.dissipated.resize(n);
  ledger.total.resize(n);
  double w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0)
      w += 0.5 * traj.dt * eta * (traj.v[i - 1] * traj.v[i - 1] + traj.v[i] * traj.v[i]);
    ledger.kinetic[i] = 0.5 * m * traj.v[i] * traj.v[i];
    ledger.dissipated[i] = w;
    ledger.total[i] = ledger.kinetic[i] + w;
  }
  return ledger;
}

/// Knobs for the finite-sample SD classifier.
struct ClassifyOptions {
  /// Finite-horizon proxy for T -> 0: terminal T must be below
  /// vanish_epsilon * initial T.
  double vanish_epsilon = 1e-6;
  /// Absolute slack for the strict-inequality checks (0 = exact strictness).
  double slack = 0.0;
};

/// Outcome of the four SD checks, with the first offending sample per check.
struct SDReport {
  bool kinetic_strictly_decreasing = false;
  bool trajectory_monotonic = false;
  bool kinetic_vanishes = false;
  bool work_nondecreasing = false;

  // -1 when the corresponding check passed
  int kinetic_violation = -1;
  int monotonic_violation = -1;
  int vanish_violation = -1;
  int work_violation = -1;

  bool all_passed() const {
    return kinetic_strictly_decreasing && trajectory_monotonic && kinetic_vanishes && work_nondecreasing;
  }

  /// Earliest violating sample over all failed checks; -1 if everything passed.
  int first_violation_index() const {
    int first = -1;
    for (int idx : {kinetic_violation, monotonic_violation, vanish_violation, work_violation})
      if (idx >= 0 && (first < 0 || idx < first)) first = idx;
    return first;
  }
};

/// Decides whether a sampled trajectory is strictly dissipative.
///
/// Four checks, each reported independently:
///   (a) kinetic energy strictly decreasing between consecutive samples;
///   (b) position strictly monotonic (either direction);
///   (c) terminal kinetic energy below vanish_epsilon of the initial value
///       (finite-horizon stand-in for T -> 0);
///   (d) cumulative dissipated work, taken as the kinetic-energy drop
///       T(0) - T(t), non-decreasing.
/// Never throws on well-formed trajectories.
inline SDReport classify_sd(const Trajectory& traj, double m, const ClassifyOptions& opts = {}) {
  traj.check();
  if (!(m > 0.0)) throw validation_error("classify_sd: mass must be positive");
  const std::size_t n = traj.size();
  const double s = opts.slack;

  SDReport report;
  report.kinetic_strictly_decreasing = true;
  report.trajectory_monotonic = true;
  report.work_nondecreasing = true;

  std::vector<double> kin(n);
  for (std::size_t i = 0; i < n; ++i) kin[i] = 0.5 * m * traj.v[i] * traj.v[i];

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dT = kin[i + 1] - kin[i];
    if (report.kinetic_strictly_decreasing && !(dT < s)) {
      report.kinetic_strictly_decreasing = false;
      report.kinetic_violation = static_cast<int>(i + 1);
    }
    // W_i = T_0 - T_i, so W non-decreasing means T non-increasing
    if (report.work_nondecreasing && dT > s) {
      report.work_nondecreasing = false;
      report.work_violation = static_cast<int>(i + 1);
    }
  }

  // direction fixed by the net displacement; with s = 0 each step must be
  // strictly in that direction
  const double dir = traj.q.back() - traj.q.front();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double step = traj.q[i + 1] - traj.q[i];
    const bool ok = dir >= 0.0 ? step > -s : step < s;
    if (!ok) {
      report.trajectory_monotonic = false;
      report.monotonic_violation = static_cast<int>(i + 1);
      break;
    }
  }

  report.kinetic_vanishes = kin.back() <= opts.vanish_epsilon * kin.front();
  if (!report.kinetic_vanishes) report.vanish_violation = static_cast<int>(n - 1);

  return report;
}

}  // namespace sdq
