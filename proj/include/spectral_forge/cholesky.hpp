#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "spectral_forge/error.hpp"
#include "spectral_forge/matrix.hpp"
#include "spectral_forge/tolerances.hpp"

namespace spectral_forge {

/// Lower-triangular L with M = L L*. Only the lower triangle of M is read.
inline Matrix cholesky_factor(const Matrix& m, const Tolerances& tol = {}) {
  m.require_square();
  const std::size_t n = m.rows();
  Matrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = m(j, j).real();
    for (std::size_t k = 0; k < j; ++k) pivot -= std::norm(l(j, k));
    if (!(pivot > tol.atol)) {
      throw Error(ErrorKind::NotPositiveDefinite,
                  "pivot " + format_number(pivot) + " at column " + std::to_string(j));
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= detail::mul(l(i, k), std::conj(l(j, k)));
      l(i, j) = s / d;
    }
  }
  return l;
}

/// Solves M X = rhs for Hermitian positive definite M by Cholesky
/// factorization followed by forward and back substitution.
inline Matrix hpd_solve(const Matrix& m, const Matrix& rhs, const Tolerances& tol = {}) {
  m.require_square();
  if (rhs.rows() != m.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "right-hand side has wrong row count");
  }
  const std::size_t n = m.rows();
  const Matrix l = cholesky_factor(m, tol);

  Matrix x = rhs;
  // L Y = rhs
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const Complex lik = l(i, k);
      if (lik == Complex(0.0)) continue;
      const auto xk = x.row(k);
      for (std::size_t c = 0; c < x.cols(); ++c) xi[c] -= detail::mul(lik, xk[c]);
    }
    const double d = l(i, i).real();
    for (auto& z : xi) z /= d;
  }
  // L* X = Y
  for (std::size_t ii = n; ii-- > 0;) {
    auto xi = x.row(ii);
    for (std::size_t k = ii + 1; k < n; ++k) {
      const Complex lki = std::conj(l(k, ii));
      if (lki == Complex(0.0)) continue;
      const auto xk = x.row(k);
      for (std::size_t c = 0; c < x.cols(); ++c) xi[c] -= detail::mul(lki, xk[c]);
    }
    const double d = l(ii, ii).real();
    for (auto& z : xi) z /= d;
  }
  return x;
}

}  // namespace spectral_forge
