#pragma once

// Velocity re-parameterization of SD motion: the affine field h mapping
// position to velocity along the trajectory, the transformed force and source
// function it induces, characteristic roots of both EOM forms, and the
// time-side vs position-side dissipated-work equivalence checker.

#include <cmath>
#include <cstddef>
#include <string>

#include "sdq/classical.hpp"
#include "sdq/errors.hpp"

namespace sdq {

/// Velocity as a function of position along a monotone trajectory,
/// h(q) = a*q + b. For the viscous system a = -eta/m and b = (eta/m)*q_inf,
/// so the homogeneous case (q_inf = 0) is h(q) = -(eta/m) q.
struct VelocityField {
  double a = 0.0;
  double b = 0.0;

  double operator()(double q) const { return a * q + b; }
};

/// Builds h for the viscous system by eliminating t between q(t) and v(t).
/// Requires v0 != 0: the rest trajectory is constant in q, so position does
/// not parameterize the motion.
inline VelocityField velocity_field(const SDParams& p) {
  p.validate();
  if (p.v0 == 0.0)
    throw validation_error("velocity_field: v0 = 0 gives the rest trajectory; h is undefined");
  const double lam = p.decay_rate();
  return VelocityField{-lam, lam * p.q_limit()};
}

/// Force term of the transformed EOM: (eta^2/m)*q.
inline double transformed_force(double eta, double m, double q) {
  if (!(m > 0.0)) throw validation_error("transformed_force: mass must be positive");
  return (eta * eta / m) * q;
}

/// Which normalization of the source function to evaluate.
/// `canonical` is eta^2 q^2/(2m), the potential appearing in the Lagrangian,
/// Hamiltonian and spectrum; `doubled` is twice that, kept only so the
/// alternative normalization can be inspected.
enum class SourceConvention { canonical, doubled };

/// Dissipative source function W(q) = eta^2 q^2 / (2m). Its position
/// derivative is transformed_force, and its endpoint difference along SD
/// motion equals the dissipated work.
inline double source_function(double eta, double m, double q,
                              SourceConvention convention = SourceConvention::canonical) {
  if (!(m > 0.0)) throw validation_error("source_function: mass must be positive");
  const double w = (eta * eta) * q * q / (2.0 * m);
  return convention == SourceConvention::doubled ? 2.0 * w : w;
}

/// Characteristic exponents of one EOM form, with the SD-admissible
/// (decaying) exponent singled out.
struct RootPair {
  double r1 = 0.0;
  double r2 = 0.0;
  double admissible = 0.0;  ///< the decaying exponent, always -eta/m
};

/// Roots of the characteristic polynomial of the chosen form.
/// original: m r^2 + eta r = 0 -> (-eta/m, 0).
/// transformed: m r^2 - eta^2/m = 0 -> +-sqrt(eta^2/m^2) = +-eta/m; only the
/// negative root is admissible for SD motion.
inline RootPair characteristic_roots(double m, double eta, EomForm form) {
  if (!(m > 0.0) || !(eta > 0.0))
    throw validation_error("characteristic_roots: m and eta must be positive");
  const double lam = eta / m;
  if (form == EomForm::original) return RootPair{-lam, 0.0, -lam};
  const double r = std::sqrt((eta * eta) / (m * m));
  return RootPair{+r, -r, -r};
}

/// Coefficients of H = p^2/(2m) + stiffness*q^2.
struct HamiltonianSpec {
  double m = 1.0;
  double stiffness = 0.5;  ///< eta^2/(2m) for the viscous system

  double potential(double q) const { return stiffness * q * q; }
};

inline HamiltonianSpec build_hamiltonian(const SDParams& p) {
  p.validate();
  return HamiltonianSpec{p.m, (p.eta * p.eta) / (2.0 * p.m)};
}

/// Worst-case residual of m*q'' = dW/dq over the interior samples of a
/// trajectory, with q'' from second central differences and dW/dq from a
/// central difference on the source potential. Vanishes (to discretization
/// error) exactly when the trajectory solves the EOM generated by `source`.
template <class SourceFn>
double eom_residual(double m, SourceFn&& source, const Trajectory& traj) {
  traj.check();
  if (!(m > 0.0)) throw validation_error("eom_residual: mass must be positive");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const double qdd = (traj.q[i + 1] - 2.0 * traj.q[i] + traj.q[i - 1]) / (traj.dt * traj.dt);
    const double d = 1e-6 * std::max(1.0, std::abs(traj.q[i]));
    const double dw = (source(traj.q[i] + d) - source(traj.q[i] - d)) / (2.0 * d);
    worst = std::max(worst, std::abs(m * qdd - dw));
  }
  return worst;
}

/// Riemann evaluation point within each partition cell.
enum class RiemannTag { left, midpoint, right };

/// Result of the dissipated-work equivalence check.
struct WorkEquivalence {
  std::size_t n = 0;    ///< partition resolution
  double w_time = 0.0;      ///< integral of eta*v^2 dt over [t_a, t_b]
  double w_position = 0.0;  ///< oriented integral of eta*h(q) dq over [q(t_a), q(t_b)]
  double gap = 0.0;         ///< |w_time - w_position|
};

namespace detail {

// compensated accumulation keeps the n ~ 1e6 partition sums below the
// quadrature error they are meant to expose
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;

  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

inline double riemann_offset(RiemannTag tag) {
  switch (tag) {
    case RiemannTag::left: return 0.0;
    case RiemannTag::right: return 1.0;
    default: return 0.5;
  }
}

}  // namespace detail

/// Evaluates both sides of the dissipated-work identity on the viscous
/// system's analytic trajectory.
///
/// Time side: sum of eta*v(t*)^2 * dt over an n-cell partition of [t_a, t_b].
/// Position side: the change of variables dq = v dt turns the same work into
/// the oriented integral of eta*h(q) dq over the swept position interval,
/// summed over an n-cell partition of [q(t_a), q(t_b)]. Orientation is
/// carried by the sign of dq, so both sides are positive for SD motion.
/// The identity needs q(t) strictly monotone on the interval; v0 = 0 is
/// rejected (velocity_field) and v never changes sign for viscous decay.
///
/// Midpoint tags give second-order convergence of the gap; left/right tags
/// converge first-order to the same limits.
inline WorkEquivalence work_equivalence(const SDParams& p, double t_a, double t_b, std::size_t n,
                                        RiemannTag tag = RiemannTag::midpoint) {
  p.validate();
  if (t_a < 0.0) throw validation_error("work_equivalence: interval must start at t >= 0");
  if (t_b < t_a) throw validation_error("work_equivalence: requires t_a <= t_b");
  if (n < 2) throw validation_error("work_equivalence: needs at least 2 partition cells");
  if (t_a == t_b) return WorkEquivalence{n, 0.0, 0.0, 0.0};

  const VelocityField h = velocity_field(p);
  const double lam = p.decay_rate();
  const double q_inf = p.q_limit();
  const auto q_of = [&](double t) { return q_inf + (p.q0 - q_inf) * std::exp(-lam * t); };
  const auto v_of = [&](double t) { return p.v0 * std::exp(-lam * t); };
  const double s = detail::riemann_offset(tag);

  const double dt = (t_b - t_a) / static_cast<double>(n);
  detail::KahanSum time_side;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = v_of(t_a + (static_cast<double>(i) + s) * dt);
    time_side.add(p.eta * v * v * dt);
  }

  const double q_a = q_of(t_a);
  const double q_b = q_of(t_b);
  const double dq = (q_b - q_a) / static_cast<double>(n);
  detail::KahanSum pos_side;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = q_a + (static_cast<double>(i) + s) * dq;
    pos_side.add(p.eta * h(q) * dq);
  }

  WorkEquivalence out;
  out.n = n;
  out.w_time = time_side.sum;
  out.w_position = pos_side.sum;
  out.gap = std::abs(out.w_time - out.w_position);
  return out;
}

/// Same identity on a caller-supplied sampled trajectory, trapezoid rule on
/// both sides, with h read off the samples as v_i at q_i. Refuses paths whose
/// position is not strictly monotonic (the change of variables needs a
/// bijective q(t)).
inline WorkEquivalence work_equivalence(const Trajectory& traj, double eta) {
  traj.check();
  if (!(eta > 0.0)) throw validation_error("work_equivalence: eta must be positive");
  const double dir = traj.q.back() - traj.q.front();
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double step = traj.q[i + 1] - traj.q[i];
    if (!(dir >= 0.0 ? step > 0.0 : step < 0.0))
      throw validation_error("work_equivalence: position path must be strictly monotonic, violated at sample " +
                             std::to_string(i + 1));
  }

  detail::KahanSum time_side;
  detail::KahanSum pos_side;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double p0 = eta * traj.v[i] * traj.v[i];
    const double p1 = eta * traj.v[i + 1] * traj.v[i + 1];
    time_side.add(0.5 * (p0 + p1) * traj.dt);
    pos_side.add(0.5 * (eta * traj.v[i] + eta * traj.v[i + 1]) * (traj.q[i + 1] - traj.q[i]));
  }

  WorkEquivalence out;
  out.n = traj.size() - 1;
  out.w_time = time_side.sum;
  out.w_position = pos_side.sum;
  out.gap = std::abs(out.w_time - out.w_position);
  return out;
}

}  // namespace sdq
