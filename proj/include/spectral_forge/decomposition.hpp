#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "spectral_forge/cholesky.hpp"
#include "spectral_forge/eigen.hpp"
#include "spectral_forge/error.hpp"
#include "spectral_forge/matrix.hpp"
#include "spectral_forge/report.hpp"
#include "spectral_forge/tolerances.hpp"

namespace spectral_forge {

/// Bounded pair encoding a normal operator T as T = A⁻¹B, with
/// A = (I + T*T)⁻¹ self-adjoint and injective and B = TA normal.
///
/// For an unbounded T only AT ⊂ B holds; every operator here is defined on
/// all of C^n, so the containment is an equality and is checked as one.
struct Decomposition {
  Matrix a;
  Matrix b;
  /// ‖T‖₂ of the source, used to scale tolerances.
  double source_norm = 0.0;
};

/// I + T*T, Hermitian by construction.
inline Matrix gram_shift(const Matrix& t) {
  Matrix m = hermitian_part(adjoint_times(t, t));
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += 1.0;
  return m;
}

/// A = (I + T*T)⁻¹ by a Cholesky solve against the identity, B = TA.
///
/// Throws NotNormal for non-normal T: commuting T past I + T*T is exactly
/// where normality enters, and without it A⁻¹B ≠ T.
inline Decomposition decompose(const Matrix& t, const Tolerances& tol) {
  t.require_square();
  if (!t.all_finite()) throw Error(ErrorKind::NonFiniteValue, "matrix entry is not finite");
  if (!is_normal(t, tol)) throw Error(ErrorKind::NotNormal, "input is not normal");
  const std::size_t n = t.rows();

  Decomposition d;
  d.a = hpd_solve(gram_shift(t), Matrix::identity(n), tol);
  d.b = t * d.a;
  d.source_norm = op_norm_2(t);
  return d;
}

/// (‖A‖₂, ‖B‖₂). For normal T these never exceed 1 and 1/2.
inline std::pair<double, double> norm_bounds(const Decomposition& d) {
  return {op_norm_2(d.a), op_norm_2(d.b)};
}

/// Checks every assertion about (A, B) against the source T and records the
/// raw residuals:
///
///   injectivity_margin   λ_min(A), expected 1/(1+‖T‖₂²) > 0
///   reconstruction       ‖A⁻¹B − T‖_F, with A⁻¹ = I + T*T applied exactly
///   commutator           ‖AB − BA‖_F
///   a_hermitian_defect   ‖A − A*‖_F
///   b_normality_defect   ‖B*B − BB*‖_F
///   b_hermitian_defect   ‖B − B*‖_F, judged only when T is self-adjoint
///   at_minus_b           ‖AT − B‖_F
///   adjoint_identity     ‖B* − T*A‖_F
inline VerificationReport verify(const Matrix& t, const Decomposition& d, const Tolerances& tol) {
  t.require_square();
  t.require_same_shape(d.a);
  t.require_same_shape(d.b);

  VerificationReport r;
  const double norm_t = op_norm_2(t);
  const double scale = 1.0 + norm_t;
  r.tolerances["rtol"] = tol.rtol;
  r.tolerances["atol"] = tol.atol;
  r.tolerances["scale"] = scale;

  const Matrix a_herm = hermitian_part(d.a);
  const EigenSystem ea = hermitian_eig(a_herm, Tolerances::for_dim(t.rows()));
  const double margin = ea.eigenvalues.front().real();
  const double expected = 1.0 / (1.0 + norm_t * norm_t);
  r.check_at_least("injectivity_margin", margin, expected * (1.0 - tol.rtol) - tol.atol);

  const Matrix a_inv_b = gram_shift(t) * d.b;
  r.check("reconstruction", frobenius(a_inv_b - t), 100.0 * tol.rtol * (1.0 + frobenius(t)));

  const double norm_a = op_norm_2(d.a);
  const double norm_b = op_norm_2(d.b);
  r.check("commutator", frobenius(commutator(d.a, d.b)), tol.rtol * norm_a * norm_b + tol.atol);

  const double structural = 10.0 * tol.rtol * scale;
  r.check("a_hermitian_defect", hermitian_defect(d.a), structural);
  r.check("b_normality_defect", normality_defect(d.b), structural);
  const double b_herm = hermitian_defect(d.b);
  if (is_hermitian(t, tol)) {
    r.check("b_hermitian_defect", b_herm, structural);
  } else {
    r.residuals["b_hermitian_defect"] = b_herm;
  }
  r.check("at_minus_b", frobenius(d.a * t - d.b), structural);
  r.check("adjoint_identity", frobenius(adjoint(d.b) - adjoint_times(t, d.a)), structural);
  return r;
}

}  // namespace spectral_forge
