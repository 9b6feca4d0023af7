#pragma once

// Stationary states of the quantized viscous-media Hamiltonian
// H = p^2/(2m) + eta^2 x^2/(2m). Analytic route: Hermite-function eigenstates
// with E_n = (eta*hbar/2m)(2n+1). Numeric route: central-difference Dirichlet
// discretization solved by the tridiagonal eigensolver, kept independent of
// the analytic formulas so the two can cross-check each other.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "sdq/errors.hpp"
#include "sdq/tridiag.hpp"

namespace sdq {

struct QuantumParams {
  double m = 1.0;
  double eta = 1.0;
  double hbar = 1.0;

  void validate() const {
    if (!(m > 0.0) || !(eta > 0.0) || !(hbar > 0.0))
      throw validation_error("QuantumParams: m, eta, hbar must all be positive");
  }

  /// Gaussian width parameter alpha = eta/hbar of the eigenstates.
  double alpha() const { return eta / hbar; }
};

/// Uniform position grid with n points spanning [x_min, x_max] inclusive.
struct SpatialGrid {
  double x_min = -12.0;
  double x_max = 12.0;
  std::size_t n = 4001;

  void validate() const {
    if (!(x_min < x_max)) throw validation_error("SpatialGrid: requires x_min < x_max");
    if (n < 100) throw validation_error("SpatialGrid: needs at least 100 points");
  }

  double dx() const { return (x_max - x_min) / static_cast<double>(n - 1); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
};

/// Lowest eigenpairs on a grid. states[k] samples the k-th eigenfunction on
/// every grid point (zero at both Dirichlet endpoints), normalized so that
/// sum |phi|^2 dx = 1.
struct Spectrum {
  std::vector<double> energies;
  SpatialGrid grid;
  std::vector<std::vector<double>> states;
};

/// n-th energy level (eta*hbar/2m)(2n+1). Evenly spaced with gap eta*hbar/m,
/// the oscillator ladder at frequency omega = eta/m.
inline double analytic_energy(int n, const QuantumParams& qp) {
  qp.validate();
  if (n < 0) throw validation_error("analytic_energy: level index must be nonnegative");
  return (qp.eta * qp.hbar / (2.0 * qp.m)) * (2.0 * n + 1.0);
}

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence
/// H_{n+1} = 2x H_n - 2n H_{n-1}, H_0 = 1, H_1 = 2x.
inline double hermite(int n, double x) {
  if (n < 0) throw validation_error("hermite: order must be nonnegative");
  if (n == 0) return 1.0;
  double hm = 1.0;
  double h = 2.0 * x;
  for (int j = 1; j < n; ++j) {
    const double hn = 2.0 * x * h - 2.0 * j * hm;
    hm = h;
    h = hn;
  }
  return h;
}

/// Normalized stationary state phi_n(x) = N_n exp(-alpha x^2/2) H_n(x sqrt(alpha))
/// with alpha = eta/hbar and N_n = (alpha/pi)^(1/4)/sqrt(2^n n!).
///
/// Evaluated through the weighted recurrence
///   u_0 = pi^(-1/4) exp(-xi^2/2),  u_{n+1} = xi sqrt(2/(n+1)) u_n - sqrt(n/(n+1)) u_{n-1}
/// which keeps every intermediate bounded, so large n*x^2 underflows cleanly
/// to 0 instead of overflowing the polynomial factor.
inline double analytic_state(int n, const QuantumParams& qp, double x) {
  qp.validate();
  if (n < 0) throw validation_error("analytic_state: level index must be nonnegative");
  const double alpha = qp.alpha();
  const double xi = x * std::sqrt(alpha);
  const double u0 = std::pow(3.14159265358979323846, -0.25) * std::exp(-0.5 * xi * xi);
  if (u0 == 0.0) return 0.0;
  if (n == 0) return std::pow(alpha, 0.25) * u0;
  double um = u0;
  double u = std::sqrt(2.0) * xi * u0;
  for (int j = 1; j < n; ++j) {
    const double un = xi * std::sqrt(2.0 / (j + 1.0)) * u - std::sqrt(j / (j + 1.0)) * um;
    um = u;
    u = un;
  }
  return std::pow(alpha, 0.25) * u;
}

/// Stationary phase factor exp(-i E t / hbar), unit modulus.
inline std::complex<double> time_factor(double E, double t, double hbar) {
  if (!(hbar > 0.0)) throw validation_error("time_factor: hbar must be positive");
  return std::polar(1.0, -E * t / hbar);
}

/// One space-time sample of a wave-function.
struct WaveSample {
  double x = 0.0;
  std::complex<double> value;
};

/// Full stationary wave psi_n(x, t) = phi_n(x) exp(-i E_n t / hbar).
inline WaveSample wave_at(int n, const QuantumParams& qp, double x, double t) {
  return WaveSample{x, analytic_state(n, qp, x) * time_factor(analytic_energy(n, qp), t, qp.hbar)};
}

/// Finite-difference oracle for the lowest n_states eigenpairs.
///
/// Discretizes -(hbar^2/2m) phi'' + (eta^2 x^2/2m) phi = E phi on the interior
/// points with the second-order central Laplacian and Dirichlet walls, giving
/// a symmetric tridiagonal matrix with
///   diagonal  hbar^2/(m dx^2) + V(x_i),   off-diagonal  -hbar^2/(2m dx^2).
/// Eigenvalues carry an O(dx^2) discretization bias; callers pick the grid.
///
/// The box must be wide enough that the requested states have died off at the
/// walls; a tail above 1e-8 next to either wall fails the run, since Dirichlet
/// truncation would be distorting the spectrum.
inline Spectrum solve_spectrum_fd(const QuantumParams& qp, const SpatialGrid& grid, std::size_t n_states) {
  qp.validate();
  grid.validate();
  if (n_states < 1) throw validation_error("solve_spectrum_fd: need at least one state");
  if (n_states > grid.n - 2)
    throw validation_error("solve_spectrum_fd: " + std::to_string(n_states) +
                           " states exceed the " + std::to_string(grid.n - 2) + " interior points");

  const double dx = grid.dx();
  const double kin = qp.hbar * qp.hbar / (qp.m * dx * dx);
  const std::size_t ni = grid.n - 2;
  std::vector<double> diag(ni), off(ni - 1, -0.5 * kin);
  for (std::size_t i = 0; i < ni; ++i) {
    const double x = grid.x(i + 1);
    diag[i] = kin + (qp.eta * qp.eta) * x * x / (2.0 * qp.m);
  }

  TridiagEigs eigs = lowest_eigenpairs(diag, off, n_states);

  Spectrum spec;
  spec.grid = grid;
  spec.energies = std::move(eigs.values);
  spec.states.resize(n_states);
  const double inv_sqrt_dx = 1.0 / std::sqrt(dx);
  for (std::size_t k = 0; k < n_states; ++k) {
    std::vector<double>& phi = spec.states[k];
    phi.assign(grid.n, 0.0);
    for (std::size_t i = 0; i < ni; ++i) phi[i + 1] = eigs.vectors[k][i] * inv_sqrt_dx;
    const double tail = std::max(std::abs(phi[1]), std::abs(phi[grid.n - 2]));
    if (tail > 1e-8)
      throw numerical_error("solve_spectrum_fd: state " + std::to_string(k) + " has amplitude " +
                            std::to_string(tail) + " at the box wall; widen the grid");
  }
  return spec;
}

}  // namespace sdq
