#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "spectral_forge/cluster.hpp"
#include "spectral_forge/error.hpp"
#include "spectral_forge/matrix.hpp"
#include "spectral_forge/tolerances.hpp"

namespace spectral_forge {

/// M = U diag(eigenvalues) U* with U unitary.
struct EigenSystem {
  Matrix unitary;
  std::vector<Complex> eigenvalues;
};

/// ‖U*U − I‖_F
inline double unitary_defect(const Matrix& u) {
  return frobenius(adjoint_times(u, u) - Matrix::identity(u.cols()));
}

/// ‖M − U diag(Λ) U*‖_F
inline double reconstruction_residual(const Matrix& m, const EigenSystem& es) {
  Matrix scaled = es.unitary;
  for (std::size_t i = 0; i < scaled.rows(); ++i)
    for (std::size_t j = 0; j < scaled.cols(); ++j) scaled(i, j) *= es.eigenvalues[j];
  return frobenius(m - times_adjoint(scaled, es.unitary));
}

namespace detail {

/// Rotates each vector (row of `vt`) so its largest-magnitude component is
/// real and positive. The first maximal component wins ties.
inline void fix_phases(Matrix& vt) {
  for (std::size_t r = 0; r < vt.rows(); ++r) {
    auto row = vt.row(r);
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double a = std::abs(row[k]);
      if (a > best_abs) {
        best_abs = a;
        best = k;
      }
    }
    if (best_abs <= 0.0) continue;
    const Complex phase = std::conj(row[best]) / best_abs;
    for (auto& z : row) z = mul(z, phase);
    row[best] = Complex(row[best].real(), 0.0);
  }
}

/// Transposed eigenvector rows → unitary with eigenvectors as columns,
/// permuted by `order`.
inline Matrix columns_from_rows(const Matrix& vt, std::span<const std::size_t> order) {
  const std::size_t n = vt.cols();
  Matrix u(n, order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto row = vt.row(order[k]);
    for (std::size_t i = 0; i < n; ++i) u(i, k) = row[i];
  }
  return u;
}

/// Cyclic complex Jacobi on a Hermitian matrix. Returns eigenvector rows
/// (unsorted) and the diagonal.
inline void jacobi_sweeps(Matrix& a, Matrix& vt, const Tolerances& tol) {
  const std::size_t n = a.rows();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double norm = frobenius(a);
  const double floor = eps * eps * norm;
  const std::size_t budget = 30 * n * n;
  std::size_t rotations = 0;
  bool exhausted = false;

  while (!exhausted) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n && !exhausted; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double g = std::abs(apq);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (g <= floor || g <= eps * std::sqrt(std::abs(app) * std::abs(aqq))) continue;
        if (rotations == budget) {
          exhausted = true;
          break;
        }
        ++rotations;
        rotated = true;

        // Phase e = apq/|apq| reduces the block to a real symmetric one;
        // then the classical rotation with t = tan(angle).
        const Complex e = apq / g;
        const double theta = (aqq - app) / (2.0 * g);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex se = s * e;
        const Complex ce = c * e;
        const Complex se_bar = std::conj(se);
        const Complex ce_bar = std::conj(ce);

        auto row_p = a.row(p);
        auto row_q = a.row(q);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const Complex x = row_p[r];
          const Complex y = row_q[r];
          row_p[r] = c * x - mul(se, y);
          row_q[r] = s * x + mul(ce, y);
          a(r, p) = std::conj(row_p[r]);
          a(r, q) = std::conj(row_q[r]);
        }
        a(p, p) = app - t * g;
        a(q, q) = aqq + t * g;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        auto vp = vt.row(p);
        auto vq = vt.row(q);
        for (std::size_t r = 0; r < n; ++r) {
          const Complex x = vp[r];
          const Complex y = vq[r];
          vp[r] = c * x - mul(se_bar, y);
          vq[r] = s * x + mul(ce_bar, y);
        }
      }
    }
    if (!rotated) break;
  }

  double off = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) off += std::norm(a(i, j));
  if (std::sqrt(off) > tol.atol * (1.0 + norm)) {
    throw Error(ErrorKind::NoConvergence,
                "Jacobi iteration exhausted " + std::to_string(budget) +
                    " rotations with off-diagonal mass " + format_number(std::sqrt(off)));
  }
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvalues are real and ascending.
inline EigenSystem hermitian_eig(const Matrix& m, const Tolerances& tol) {
  m.require_square();
  if (!m.all_finite()) throw Error(ErrorKind::NonFiniteValue, "matrix entry is not finite");
  if (!is_hermitian(m, tol)) throw Error(ErrorKind::NotHermitian, "input is not Hermitian");
  const std::size_t n = m.rows();

  Matrix a = hermitian_part(m);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  Matrix vt = Matrix::identity(n);
  detail::jacobi_sweeps(a, vt, tol);
  detail::fix_phases(vt);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

  EigenSystem es;
  es.unitary = detail::columns_from_rows(vt, order);
  es.eigenvalues.reserve(n);
  for (auto k : order) es.eigenvalues.emplace_back(a(k, k).real(), 0.0);
  return es;
}

namespace detail {

// Generic real weight for the final joint step; any irrational works.
inline constexpr double kJointWeight = 0.6180339887498949;

/// Diagonalizes the restriction basis* X basis and returns the rotated basis
/// together with the restricted eigenvalues.
inline std::pair<Matrix, std::vector<double>> restrict_and_diagonalize(const Matrix& x,
                                                                       const Matrix& basis,
                                                                       const Tolerances& tol) {
  Matrix restricted = hermitian_part(adjoint_times(basis, x * basis));
  EigenSystem es = hermitian_eig(restricted, tol);
  std::vector<double> values;
  values.reserve(es.eigenvalues.size());
  for (const auto& z : es.eigenvalues) values.push_back(z.real());
  return {basis * es.unitary, std::move(values)};
}

inline std::vector<std::vector<std::size_t>> cluster_real(const std::vector<double>& values,
                                                          double radius) {
  std::vector<Complex> pts(values.begin(), values.end());
  return cluster_points(pts, radius);
}

inline void append_columns(Matrix& dst, std::size_t& next, const Matrix& src) {
  for (std::size_t k = 0; k < src.cols(); ++k, ++next)
    for (std::size_t i = 0; i < src.rows(); ++i) dst(i, next) = src(i, k);
}

/// Orthonormal basis diagonalizing every member of a commuting Hermitian
/// family. Member k is restricted to, and splits, each cluster left by the
/// members before it (single linkage at radii[k]); clusters degenerate in
/// every member are finished with a fixed generic combination of the family.
inline Matrix simultaneous_basis(std::span<const Matrix> family, std::span<const double> radii,
                                 const Tolerances& tol) {
  const std::size_t n = family.front().rows();
  Matrix vectors(n, n);
  std::size_t next = 0;

  Matrix mix = family.front();
  double weight = 1.0;
  for (std::size_t k = 1; k < family.size(); ++k) {
    weight *= kJointWeight;
    mix += weight * family[k];
  }

  auto refine = [&](auto& self, const Matrix& rotated, const std::vector<double>& values,
                    std::size_t level) -> void {
    for (const auto& group : cluster_real(values, radii[level])) {
      const Matrix basis = select_columns(rotated, group);
      if (group.size() == 1) {
        append_columns(vectors, next, basis);
      } else if (level + 1 == family.size()) {
        append_columns(vectors, next, restrict_and_diagonalize(mix, basis, tol).first);
      } else {
        auto [sub, sub_values] = restrict_and_diagonalize(family[level + 1], basis, tol);
        self(self, sub, sub_values, level + 1);
      }
    }
  };

  const EigenSystem top = hermitian_eig(family.front(), tol);
  std::vector<double> values;
  values.reserve(n);
  for (const auto& z : top.eigenvalues) values.push_back(z.real());
  refine(refine, top.unitary, values, 0);
  return vectors;
}

/// Diagonal of V* M V.
inline std::vector<Complex> rayleigh_quotients(const Matrix& m, const Matrix& vectors) {
  const Matrix mv = m * vectors;
  std::vector<Complex> values(vectors.cols());
  for (std::size_t j = 0; j < vectors.cols(); ++j) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < vectors.rows(); ++i) fma(s, std::conj(vectors(i, j)), mv(i, j));
    values[j] = s;
  }
  return values;
}

/// Splitting radius for a family member: never finer than the requested
/// cluster radius, never below the eigensolver's resolving power.
inline double split_radius(const Matrix& x, const Tolerances& tol) {
  const double fro = frobenius(x);
  return std::max(tol.cluster_radius(fro), tol.cluster_relative * (1.0 + fro));
}

}  // namespace detail

/// Unitary diagonalization of a normal matrix.
///
/// Diagonalizes the Hermitian part H = (M+M*)/2, then within each cluster of
/// H-eigenvalues the restriction of K = (M−M*)/(2i). Groups still degenerate
/// in both are finished with the restriction of H + γK for a fixed generic γ.
/// Each eigenvalue is the Rayleigh quotient x*Mx = h + ik of its joint
/// eigenvector; ordering is lexicographic by (Re, Im).
inline EigenSystem normal_eig(const Matrix& m, const Tolerances& tol) {
  m.require_square();
  if (!m.all_finite()) throw Error(ErrorKind::NonFiniteValue, "matrix entry is not finite");
  if (!is_normal(m, tol)) throw Error(ErrorKind::NotNormal, "input is not normal");
  const std::size_t n = m.rows();

  // Splitting coarser than requested is always safe: later stages resolve.
  const double radius = detail::split_radius(m, tol);
  const std::array<Matrix, 2> family{hermitian_part(m), skew_part(m)};
  const std::array<double, 2> radii{radius, radius};
  const Matrix vectors = detail::simultaneous_basis(family, radii, tol);
  const std::vector<Complex> values = detail::rayleigh_quotients(m, vectors);

  const auto order = lexicographic_order(values, radius);
  Matrix vt = transpose(vectors);
  detail::fix_phases(vt);

  EigenSystem es;
  es.unitary = detail::columns_from_rows(vt, order);
  es.eigenvalues.reserve(n);
  for (auto idx : order) es.eigenvalues.push_back(values[idx]);
  return es;
}

/// Common eigenbasis of a Hermitian A and a normal B with AB = BA.
struct JointEigenSystem {
  Matrix unitary;                  // columns are joint eigenvectors
  std::vector<double> first;       // x*Ax
  std::vector<Complex> second;     // x*Bx
};

/// Simultaneous diagonalization of a commuting pair. Eigenvectors of A alone
/// are ill-determined wherever A's eigenvalues nearly coincide, so A's
/// clusters are split by B instead of being resolved independently.
inline JointEigenSystem joint_eig(const Matrix& a, const Matrix& b, const Tolerances& tol) {
  a.require_square();
  b.require_square();
  if (a.rows() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "pair acts on different spaces");
  if (!a.all_finite() || !b.all_finite()) throw Error(ErrorKind::NonFiniteValue, "matrix entry is not finite");
  if (!is_hermitian(a, tol)) throw Error(ErrorKind::NotHermitian, "first member is not Hermitian");
  if (!is_normal(b, tol)) throw Error(ErrorKind::NotNormal, "second member is not normal");
  const double defect = frobenius(commutator(a, b));
  if (defect > tol.rtol * frobenius(a) * frobenius(b) + tol.atol) {
    throw Error(ErrorKind::NotCommuting, "pair does not commute");
  }

  const std::array<Matrix, 3> family{hermitian_part(a), hermitian_part(b), skew_part(b)};
  const std::array<double, 3> radii{detail::split_radius(a, tol), detail::split_radius(b, tol),
                                    detail::split_radius(b, tol)};
  Matrix vectors = detail::simultaneous_basis(family, radii, tol);
  Matrix vt = transpose(vectors);
  detail::fix_phases(vt);
  std::vector<std::size_t> identity(a.rows());
  std::iota(identity.begin(), identity.end(), 0);
  vectors = detail::columns_from_rows(vt, identity);

  JointEigenSystem js;
  for (const auto& z : detail::rayleigh_quotients(family[0], vectors)) js.first.push_back(z.real());
  js.second = detail::rayleigh_quotients(b, vectors);
  js.unitary = std::move(vectors);
  return js;
}

/// Largest singular value, from the Hermitian eigensolver.
inline double op_norm_2(const Matrix& m) {
  if (m.empty()) return 0.0;
  const Tolerances tol = Tolerances::for_dim(std::max(m.rows(), m.cols()));
  if (m.is_square() && hermitian_defect(m) == 0.0) {
    const EigenSystem es = hermitian_eig(m, tol);
    return std::max(std::abs(es.eigenvalues.front()), std::abs(es.eigenvalues.back()));
  }
  const Matrix gram = hermitian_part(adjoint_times(m, m));
  const EigenSystem es = hermitian_eig(gram, tol);
  return std::sqrt(std::max(0.0, es.eigenvalues.back().real()));
}

}  // namespace spectral_forge
