#pragma once

// Lowest eigenpairs of a real symmetric tridiagonal matrix: Sturm-count
// bisection for the eigenvalues, inverse iteration with a partially pivoted
// tridiagonal LU for the eigenvectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "sdq/errors.hpp"

namespace sdq {

struct TridiagEigs {
  std::vector<double> values;                ///< ascending
  std::vector<std::vector<double>> vectors;  ///< unit 2-norm, one per value
};

namespace detail {

/// Number of eigenvalues of tridiag(off, diag, off) at or below x,
/// by the Sturm sequence of the LDL^T pivots.
inline std::size_t sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x,
                               double pivmin) {
  // a vanishing pivot is clamped to -pivmin before the sign test, so an exact
  // eigenvalue hit is counted rather than silently dropped
  double p = diag[0] - x;
  if (std::abs(p) < pivmin) p = -pivmin;
  std::size_t cnt = p <= 0.0 ? 1 : 0;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    p = diag[i] - x - off[i - 1] * off[i - 1] / p;
    if (std::abs(p) < pivmin) p = -pivmin;
    if (p <= 0.0) ++cnt;
  }
  return cnt;
}

/// LU factorization of a general tridiagonal matrix with partial pivoting
/// (row swaps introduce a second superdiagonal). Near-singular pivots are
/// clamped, not rejected: inverse iteration solves at a shift that is an
/// eigenvalue to working precision.
struct TridiagPLU {
  std::vector<double> dl, d, du, du2;
  std::vector<unsigned char> swapped;

  TridiagPLU(std::vector<double> sub, std::vector<double> diag, std::vector<double> super)
      : dl(std::move(sub)), d(std::move(diag)), du(std::move(super)) {
    const std::size_t n = d.size();
    du2.assign(n >= 2 ? n - 2 : 0, 0.0);
    swapped.assign(n >= 1 ? n - 1 : 0, 0);
    const double tiny = std::numeric_limits<double>::min();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = tiny;
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double tmp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = tmp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
  }

  void solve(std::vector<double>& rhs) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        rhs[i + 1] -= dl[i] * rhs[i];
      } else {
        const double tmp = rhs[i];
        rhs[i] = rhs[i + 1];
        rhs[i + 1] = tmp - dl[i] * rhs[i];
      }
    }
    rhs[n - 1] /= d[n - 1];
    if (n >= 2) rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    for (std::size_t i = n; i-- > 2;) {
      const std::size_t j = i - 2;
      rhs[j] = (rhs[j] - du[j] * rhs[j + 1] - du2[j] * rhs[j + 2]) / d[j];
    }
  }
};

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace detail

/// Computes the k smallest eigenpairs of the symmetric tridiagonal matrix
/// with diagonal `diag` and off-diagonal `off` (size n-1).
///
/// Eigenvalues are located independently of each other by bisection on the
/// Sturm count inside the Gershgorin interval, so no decomposition of the
/// full matrix is involved. Each eigenvector then comes from a few rounds of
/// inverse iteration, re-orthogonalized against the vectors already found.
/// Deterministic: the starting vectors use a fixed-seed generator.
inline TridiagEigs lowest_eigenpairs(const std::vector<double>& diag, const std::vector<double>& off,
                                     std::size_t k) {
  const std::size_t n = diag.size();
  if (n < 2) throw validation_error("lowest_eigenpairs: matrix order must be >= 2");
  if (off.size() != n - 1) throw validation_error("lowest_eigenpairs: off-diagonal must have size n-1");
  if (k < 1 || k > n)
    throw validation_error("lowest_eigenpairs: requested " + std::to_string(k) + " pairs from order " +
                           std::to_string(n));

  double lo = diag[0], hi = diag[0], emax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
    if (i + 1 < n) emax = std::max(emax, std::abs(off[i]));
  }
  const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, emax * emax);
  const double eps = std::numeric_limits<double>::epsilon();

  TridiagEigs out;
  out.values.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    double a = lo, b = hi;
    for (int iter = 0; iter < 128 && (b - a) > 2.0 * eps * scale; ++iter) {
      const double mid = 0.5 * (a + b);
      if (detail::sturm_count(diag, off, mid, pivmin) >= j + 1)
        b = mid;
      else
        a = mid;
    }
    out.values[j] = 0.5 * (a + b);
  }
  std::sort(out.values.begin(), out.values.end());

  std::mt19937 rng(0x5d5f37u);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  out.vectors.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    // separate clustered shifts so inverse iteration does not return the
    // same vector twice
    double shift = out.values[j];
    if (j > 0 && shift - out.values[j - 1] < 16.0 * eps * scale) shift = out.values[j - 1] + 16.0 * eps * scale;

    std::vector<double> sub(off), sup(off), dd(diag);
    for (double& x : dd) x -= shift;
    const detail::TridiagPLU plu(std::move(sub), std::move(dd), std::move(sup));

    std::vector<double>& v = out.vectors[j];
    v.resize(n);
    for (double& x : v) x = unit(rng);
    for (int iter = 0; iter < 6; ++iter) {
      plu.solve(v);
      for (std::size_t p = 0; p < j; ++p) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += v[i] * out.vectors[p][i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * out.vectors[p][i];
      }
      const double nrm = detail::norm2(v);
      if (!(nrm > 0.0) || !std::isfinite(nrm))
        throw numerical_error("lowest_eigenpairs: inverse iteration collapsed at pair " + std::to_string(j));
      for (double& x : v) x /= nrm;
    }

    // fix the overall sign: largest-magnitude component positive
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    if (v[imax] < 0.0)
      for (double& x : v) x = -x;

    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = (diag[i] - out.values[j]) * v[i];
      if (i > 0) r += off[i - 1] * v[i - 1];
      if (i + 1 < n) r += off[i] * v[i + 1];
      resid = std::max(resid, std::abs(r));
    }
    if (resid > 1e-10 * scale)
      throw numerical_error("lowest_eigenpairs: residual " + std::to_string(resid) +
                            " exceeds tolerance for pair " + std::to_string(j));
  }
  return out;
}

}  // namespace sdq
