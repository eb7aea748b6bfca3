#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spectral_forge/cluster.hpp"
#include "spectral_forge/eigen.hpp"
#include "spectral_forge/error.hpp"
#include "spectral_forge/matrix.hpp"
#include "spectral_forge/report.hpp"
#include "spectral_forge/tolerances.hpp"

namespace spectral_forge {

/// An orthogonal projection on C^n.
///
/// Projections coming out of eigendecompositions are kept factored as
/// P = V V* with V an n×k orthonormal basis of the range; this is Hermitian
/// by construction and costs n·k instead of n². Projections read from files
/// (or built by hand, possibly invalid) are kept dense.
class Projection {
 public:
  Projection() = default;

  static Projection from_basis(Matrix basis) { return Projection(std::move(basis), true); }

  static Projection from_dense(Matrix p) {
    p.require_square();
    return Projection(std::move(p), false);
  }

  bool factored() const noexcept { return factored_; }
  std::size_t dim() const noexcept { return data_.rows(); }

  const Matrix& basis() const {
    if (!factored_) throw Error(ErrorKind::BadSpec, "projection is stored densely");
    return data_;
  }

  const Matrix& stored() const noexcept { return data_; }

  Matrix dense() const { return factored_ ? times_adjoint(data_, data_) : data_; }

  double trace() const {
    if (factored_) {
      const double f = frobenius(data_);
      return f * f;
    }
    return spectral_forge::trace(data_).real();
  }

  /// Nearest integer to the trace.
  std::size_t rank() const {
    return static_cast<std::size_t>(std::max(0.0, std::round(trace())));
  }

  /// acc += weight · P
  void accumulate(Matrix& acc, Complex weight) const {
    if (!factored_) {
      for (std::size_t i = 0; i < data_.rows(); ++i)
        for (std::size_t j = 0; j < data_.cols(); ++j) detail::fma(acc(i, j), weight, data_(i, j));
      return;
    }
    const std::size_t n = data_.rows();
    const std::size_t k = data_.cols();
    for (std::size_t i = 0; i < n; ++i) {
      auto vi = data_.row(i);
      auto out = acc.row(i);
      for (std::size_t l = 0; l < k; ++l) {
        const Complex wv = detail::mul(weight, vi[l]);
        if (wv == Complex(0.0)) continue;
        for (std::size_t j = 0; j < n; ++j) detail::fma(out[j], wv, std::conj(data_(j, l)));
      }
    }
  }

  /// Sum of projections: concatenated bases when all are factored, a
  /// re-symmetrized dense sum otherwise.
  static Projection sum(std::span<const Projection* const> parts) {
    if (parts.empty()) throw Error(ErrorKind::BadSpec, "empty projection sum");
    const bool all_factored =
        std::all_of(parts.begin(), parts.end(), [](const Projection* p) { return p->factored(); });
    if (all_factored) {
      Matrix basis;
      for (const Projection* p : parts) basis = hconcat(basis, p->data_);
      return from_basis(std::move(basis));
    }
    Matrix acc(parts.front()->dim());
    for (const Projection* p : parts) p->accumulate(acc, 1.0);
    return from_dense(hermitian_part(acc));
  }

 private:
  Projection(Matrix data, bool factored) : data_(std::move(data)), factored_(factored) {}

  Matrix data_;
  bool factored_ = false;
};

struct SpectralAtom {
  Complex point;
  Projection projection;
};

/// Finite projection-valued measure: E({point_k}) = P_k. Construction only
/// checks shapes; the measure invariants are checked by pvm_validate so
/// that broken measures can still be represented and diagnosed.
class SpectralMeasure {
 public:
  SpectralMeasure() = default;

  SpectralMeasure(std::size_t dim, std::vector<SpectralAtom> atoms)
      : dim_(dim), atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) {
      if (a.projection.dim() != dim_) {
        throw Error(ErrorKind::DimensionMismatch, "atom projection has wrong dimension");
      }
      if (!is_finite(a.point)) throw Error(ErrorKind::NonFiniteValue, "atom point is not finite");
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<SpectralAtom>& atoms() const noexcept { return atoms_; }
  const SpectralAtom& operator[](std::size_t k) const { return atoms_[k]; }

  /// max |point|: the measure lives on the closed disk of this radius.
  double support_radius() const {
    double r = 0.0;
    for (const auto& a : atoms_) r = std::max(r, std::abs(a.point));
    return r;
  }

  std::size_t total_rank() const {
    std::size_t r = 0;
    for (const auto& a : atoms_) r += a.projection.rank();
    return r;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<SpectralAtom> atoms_;
};

namespace detail {

/// Groups eigenvectors whose keys cluster at `key_radius`; each atom sits at
/// the mean of its members' values. Atoms come out in lexicographic order.
inline SpectralMeasure measure_from_eigenvectors(const Matrix& vectors, std::span<const Complex> values,
                                                 std::span<const Complex> keys, double key_radius,
                                                 double order_radius) {
  std::vector<SpectralAtom> atoms;
  for (const auto& group : cluster_points(keys, key_radius)) {
    Complex mean = 0.0;
    for (auto k : group) mean += values[k];
    mean /= static_cast<double>(group.size());
    atoms.push_back({mean, Projection::from_basis(select_columns(vectors, group))});
  }

  std::vector<Complex> points;
  for (const auto& a : atoms) points.push_back(a.point);
  std::vector<SpectralAtom> ordered;
  for (auto k : lexicographic_order(points, order_radius)) ordered.push_back(std::move(atoms[k]));
  return SpectralMeasure(vectors.rows(), std::move(ordered));
}

inline SpectralMeasure measure_from_eigenvectors(const Matrix& vectors, std::span<const Complex> values,
                                                 double radius) {
  return measure_from_eigenvectors(vectors, values, values, radius, radius);
}

inline double max_modulus(std::span<const Complex> values) {
  double m = 0.0;
  for (const auto& z : values) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace detail

/// Spectral measure of a normal matrix: eigenvalues within the cluster
/// radius share one atom at their mean, with the projection onto the span of
/// their eigenvectors. Atoms are ordered lexicographically by point.
inline SpectralMeasure pvm_from_normal(const Matrix& m, const Tolerances& tol) {
  EigenSystem es = normal_eig(m, tol);
  if (is_hermitian(m, tol)) {
    for (auto& z : es.eigenvalues) z = Complex(z.real(), 0.0);
  }
  const double radius = tol.cluster_radius(detail::max_modulus(es.eigenvalues));
  return detail::measure_from_eigenvectors(es.unitary, es.eigenvalues, radius);
}

/// Spectral measures of a commuting pair (A Hermitian, B normal) resolved
/// over one common eigenbasis, so that they commute to rounding level.
struct PvmPair {
  SpectralMeasure first;   // of A, on R
  SpectralMeasure second;  // of B
};

inline PvmPair pvm_pair(const Matrix& a, const Matrix& b, const Tolerances& tol) {
  const JointEigenSystem js = joint_eig(a, b, tol);
  const std::vector<Complex> first(js.first.begin(), js.first.end());
  std::vector<Complex> second = js.second;
  if (is_hermitian(b, tol)) {
    for (auto& z : second) z = Complex(z.real(), 0.0);
  }
  return {detail::measure_from_eigenvectors(js.unitary, first, tol.cluster_radius(detail::max_modulus(first))),
          detail::measure_from_eigenvectors(js.unitary, second, tol.cluster_radius(detail::max_modulus(second)))};
}

/// ∫ f dE = Σ f(z_k) P_k.
template <typename F>
Matrix pvm_integrate(F&& f, const SpectralMeasure& e) {
  Matrix acc(e.dim());
  for (const auto& atom : e.atoms()) {
    const Complex value = f(atom.point);
    if (!is_finite(value)) {
      throw Error(ErrorKind::NonFiniteValue, "integrand is not finite at an atom");
    }
    atom.projection.accumulate(acc, value);
  }
  return acc;
}

/// Residuals of the four defining properties of a projection-valued
/// measure, each a Frobenius norm (maximum over atoms or atom pairs).
struct MeasureResiduals {
  double idempotency = 0.0;       // max ‖P² − P‖
  double self_adjointness = 0.0;  // max ‖P − P*‖
  double orthogonality = 0.0;     // max_{i≠j} ‖P_i P_j‖
  double completeness = 0.0;      // ‖Σ P − I‖
};

enum class ResidualRoute { automatic, dense, gram };

namespace detail {

/// Re tr(X* L X R) = ‖U X W*‖_F² when L = U*U and R = W*W.
inline double sandwich_norm(const Matrix& left_gram, const Matrix& x, const Matrix& right_gram) {
  const Matrix y = left_gram * x * right_gram;
  double s = 0.0;
  for (std::size_t k = 0; k < x.data().size(); ++k) s += (std::conj(x.data()[k]) * y.data()[k]).real();
  return std::sqrt(std::max(0.0, s));
}

inline Matrix block(const Matrix& m, std::size_t r0, std::size_t rows, std::size_t c0, std::size_t cols) {
  Matrix b(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) b(i, j) = m(r0 + i, c0 + j);
  return b;
}

inline MeasureResiduals residuals_dense(std::span<const Projection* const> ps, std::size_t dim) {
  MeasureResiduals r;
  std::vector<Matrix> dense;
  dense.reserve(ps.size());
  for (const Projection* p : ps) dense.push_back(p->dense());
  Matrix total(dim);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    const Matrix& p = dense[i];
    r.idempotency = std::max(r.idempotency, frobenius(p * p - p));
    r.self_adjointness = std::max(r.self_adjointness, hermitian_defect(p));
    for (std::size_t j = i + 1; j < dense.size(); ++j) {
      r.orthogonality = std::max({r.orthogonality, frobenius(p * dense[j]), frobenius(dense[j] * p)});
    }
    total += p;
  }
  r.completeness = frobenius(total - Matrix::identity(dim));
  return r;
}

// Every factored projection is V V*; all four residuals follow from the Gram
// matrix G = W*W of the stacked bases W = [V_1 … V_m] without forming any
// n×n product. Completeness uses ‖WW* − I_n‖² = ‖W*W − I_m‖² + (n − m).
inline MeasureResiduals residuals_gram(std::span<const Projection* const> ps, std::size_t dim) {
  MeasureResiduals r;
  Matrix w;
  std::vector<std::size_t> offset{0};
  for (const Projection* p : ps) {
    w = hconcat(w, p->basis());
    offset.push_back(offset.back() + p->basis().cols());
  }
  const std::size_t m = offset.back();
  if (m == 0) {
    r.completeness = std::sqrt(static_cast<double>(dim));
    return r;
  }
  const Matrix g = adjoint_times(w, w);

  std::vector<Matrix> diag_blocks;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const std::size_t ki = offset[i + 1] - offset[i];
    diag_blocks.push_back(block(g, offset[i], ki, offset[i], ki));
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Matrix& gii = diag_blocks[i];
    const Matrix defect = gii - Matrix::identity(gii.rows());
    r.idempotency = std::max(r.idempotency, sandwich_norm(gii, defect, gii));
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      const Matrix gij = block(g, offset[i], gii.rows(), offset[j], offset[j + 1] - offset[j]);
      r.orthogonality = std::max(r.orthogonality, sandwich_norm(gii, gij, diag_blocks[j]));
    }
  }
  const double f = frobenius(g - Matrix::identity(m));
  const double missing = static_cast<double>(dim) - static_cast<double>(m);
  r.completeness = std::sqrt(std::max(0.0, f * f + missing));
  return r;
}

}  // namespace detail

inline MeasureResiduals measure_residuals(std::span<const Projection* const> ps, std::size_t dim,
                                          ResidualRoute route = ResidualRoute::automatic) {
  const bool all_factored =
      std::all_of(ps.begin(), ps.end(), [](const Projection* p) { return p->factored(); });
  if (route == ResidualRoute::gram && !all_factored) {
    throw Error(ErrorKind::BadSpec, "Gram route needs factored projections");
  }
  if (route == ResidualRoute::dense || !all_factored) return detail::residuals_dense(ps, dim);
  return detail::residuals_gram(ps, dim);
}

inline MeasureResiduals measure_residuals(const SpectralMeasure& e,
                                          ResidualRoute route = ResidualRoute::automatic) {
  std::vector<const Projection*> ps;
  for (const auto& a : e.atoms()) ps.push_back(&a.projection);
  return measure_residuals(ps, e.dim(), route);
}

namespace detail {

inline void record_measure_checks(VerificationReport& r, const MeasureResiduals& m,
                                  const Tolerances& tol) {
  const double bound = tol.projection_bound();
  r.check("idempotency", m.idempotency, bound);
  r.check("self_adjointness", m.self_adjointness, bound);
  r.check("orthogonality", m.orthogonality, bound);
  r.check("completeness", m.completeness, bound);
}

}  // namespace detail

/// Checks that `e` is a projection-valued measure: idempotent, self-adjoint,
/// mutually orthogonal and complete projections, integer ranks summing to
/// the dimension, and atom points separated by more than the cluster radius.
inline VerificationReport pvm_validate(const SpectralMeasure& e, const Tolerances& tol) {
  VerificationReport r;
  r.tolerances["rtol"] = tol.rtol;
  r.tolerances["atol"] = tol.atol;
  detail::record_measure_checks(r, measure_residuals(e), tol);

  double trace_sum = 0.0;
  for (const auto& a : e.atoms()) trace_sum += a.projection.trace();
  r.residuals["trace_sum"] = trace_sum;
  r.check("rank_defect",
          std::abs(static_cast<double>(e.total_rank()) - static_cast<double>(e.dim())), 0.0);

  const double radius = tol.cluster_radius(e.support_radius());
  double close_pairs = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j)
      if (std::abs(e[i].point - e[j].point) <= radius) close_pairs += 1.0;
  r.check("coincident_points", close_pairs, 0.0);
  return r;
}

}  // namespace spectral_forge
