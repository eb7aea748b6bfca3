#pragma once

#include <cmath>
#include <cstddef>
#include <optional>

#include "spectral_forge/error.hpp"
#include "spectral_forge/matrix.hpp"

namespace spectral_forge {

/// Numerical policy shared by every check in the library.
///
/// `rtol` and `atol` bound residual norms; `cluster` is an absolute
/// eigenvalue merge radius which, when unset, is derived per matrix as
/// `cluster_relative * (1 + spectral estimate)`.
struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::optional<double> cluster;
  double cluster_relative = 1e-8;
  /// Product atoms with Frobenius norm at or below this are dropped.
  double prune = 1e-10;
  /// |t| at or below this makes the reciprocal weight singular.
  double singular = 1e-14;

  /// Defaults scaled to an n-dimensional problem.
  static Tolerances for_dim(std::size_t n) {
    Tolerances t;
    t.rtol = 1e-10 * static_cast<double>(n);
    t.prune = 1e-10 * static_cast<double>(n);
    return t;
  }

  double cluster_radius(double spectral_estimate) const {
    return cluster ? *cluster : cluster_relative * (1.0 + spectral_estimate);
  }

  /// Bound for projection-level residuals (idempotency, orthogonality, ...).
  double projection_bound() const { return 10.0 * rtol; }

  void validate() const {
    const bool ok = rtol > 0 && atol > 0 && cluster_relative > 0 && prune > 0 && singular > 0 &&
                    (!cluster || *cluster > 0) && std::isfinite(rtol) && std::isfinite(atol);
    if (!ok) throw Error(ErrorKind::BadSpec, "tolerances must be finite and strictly positive");
  }
};

/// ‖M − M*‖_F
inline double hermitian_defect(const Matrix& m) {
  m.require_square();
  return frobenius(m - adjoint(m));
}

/// ‖M*M − MM*‖_F
inline double normality_defect(const Matrix& m) {
  m.require_square();
  return frobenius(adjoint_times(m, m) - times_adjoint(m, m));
}

inline bool is_hermitian(const Matrix& m, const Tolerances& tol) {
  return hermitian_defect(m) <= tol.rtol * frobenius(m) + tol.atol;
}

inline bool is_normal(const Matrix& m, const Tolerances& tol) {
  const double f = frobenius(m);
  return normality_defect(m) <= tol.rtol * f * f + tol.atol;
}

}  // namespace spectral_forge
