#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "spectral_forge/cluster.hpp"
#include "spectral_forge/eigen.hpp"
#include "spectral_forge/error.hpp"
#include "spectral_forge/matrix.hpp"
#include "spectral_forge/report.hpp"
#include "spectral_forge/spectral_measure.hpp"
#include "spectral_forge/tolerances.hpp"

namespace spectral_forge {

/// Atom of E₁×E₂ at (t, w) ∈ R × C with projection P_i Q_j, where i and j
/// index the factor atoms it came from.
struct ProductAtom {
  double t = 0.0;
  Complex w;
  Projection projection;
  std::size_t first = 0;
  std::size_t second = 0;
};

/// Atomic projection-valued measure on R × C. The factor supports are finite,
/// so local compactness and second countability of the factor spaces hold
/// trivially and uniqueness is witnessed on rectangles and marginals only.
class ProductMeasure {
 public:
  ProductMeasure() = default;
  ProductMeasure(std::size_t dim, std::vector<ProductAtom> atoms)
      : dim_(dim), atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) {
      if (a.projection.dim() != dim_) {
        throw Error(ErrorKind::DimensionMismatch, "atom projection has wrong dimension");
      }
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<ProductAtom>& atoms() const noexcept { return atoms_; }
  const ProductAtom& operator[](std::size_t k) const { return atoms_[k]; }

 private:
  std::size_t dim_ = 0;
  std::vector<ProductAtom> atoms_;
};

namespace detail {

inline void require_same_dim(const SpectralMeasure& e1, const SpectralMeasure& e2) {
  if (e1.dim() != e2.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "spectral measures act on different spaces");
  }
}

// ‖[P, Q]‖_F for P = V V*, Q = W W* with orthonormal V, W and C = V*W:
// ‖[P,Q]‖² = 2 Σ μ(1 − μ) over eigenvalues μ of C*C. When C is small this is
// 2(‖C‖² − ‖C*C‖²); otherwise 1 − μ is taken from R = W − VC, whose Gram
// matrix is I − C*C, so no O(1) terms cancel.
inline double factored_commutator(const Matrix& v, const Matrix& w) {
  const Matrix c = adjoint_times(v, w);
  const Matrix ctc = adjoint_times(c, c);
  const double cf = frobenius(c);
  if (cf * cf < 0.25) {
    const double g = frobenius(ctc);
    return std::sqrt(std::max(0.0, 2.0 * (cf * cf - g * g)));
  }
  const Matrix resid = w - v * c;
  const Matrix rtr = adjoint_times(resid, resid);
  const Complex s = trace(ctc * rtr);
  return std::sqrt(std::max(0.0, 2.0 * s.real()));
}

/// P_i Q_j as a dense matrix.
inline Matrix dense_product(const Projection& p, const Projection& q) {
  if (p.factored() && q.factored()) {
    const Matrix c = adjoint_times(p.basis(), q.basis());
    return times_adjoint(p.basis() * c, q.basis());
  }
  return p.dense() * q.dense();
}

}  // namespace detail

/// max over atom pairs of ‖P_i Q_j − Q_j P_i‖_F.
inline double commute_defect(const SpectralMeasure& e1, const SpectralMeasure& e2) {
  detail::require_same_dim(e1, e2);
  double worst = 0.0;
  for (const auto& a : e1.atoms()) {
    for (const auto& b : e2.atoms()) {
      double d;
      if (a.projection.factored() && b.projection.factored()) {
        d = detail::factored_commutator(a.projection.basis(), b.projection.basis());
      } else {
        const Matrix p = a.projection.dense();
        const Matrix q = b.projection.dense();
        d = frobenius(commutator(p, q));
      }
      worst = std::max(worst, d);
    }
  }
  return worst;
}

/// Tolerance for commute_check.
inline double commute_bound(const Tolerances& tol) { return tol.projection_bound(); }

inline bool commute_check(const SpectralMeasure& e1, const SpectralMeasure& e2,
                          const Tolerances& tol) {
  return commute_defect(e1, e2) <= commute_bound(tol);
}

/// E₁×E₂ for commuting measures, E₁ on R and E₂ on C.
///
/// Atoms are the pairs (t_i, w_j) whose product P_i Q_j is not negligible.
/// For commuting projections P_i Q_j is itself a projection, so its squared
/// Frobenius norm is its (integer) rank: pairs at or below the prune
/// threshold, or of numerical rank zero (‖P_iQ_j‖² < 1/2), are dropped. For
/// factored inputs the surviving projection is V_i L with L spanning the
/// eigenvectors of C C* (C = V_i* W_j) at eigenvalue ≈ 1, i.e. the range of
/// P_i ∩ range of Q_j; dense inputs get (P_iQ_j + Q_jP_i)/2.
inline ProductMeasure product_measure(const SpectralMeasure& e1, const SpectralMeasure& e2,
                                      const Tolerances& tol) {
  detail::require_same_dim(e1, e2);
  for (const auto& a : e1.atoms()) {
    if (std::abs(a.point.imag()) > tol.atol * (1.0 + std::abs(a.point))) {
      throw Error(ErrorKind::BadSpec, "first factor must be supported on the real line");
    }
  }
  const double defect = commute_defect(e1, e2);
  if (defect > commute_bound(tol)) {
    throw Error(ErrorKind::NotCommuting,
                "spectral measures do not commute (defect " + format_number(defect) + ")");
  }

  const std::size_t n = e1.dim();
  const Tolerances local = Tolerances::for_dim(n);
  std::vector<ProductAtom> atoms;
  for (std::size_t i = 0; i < e1.size(); ++i) {
    const Projection& p = e1[i].projection;
    for (std::size_t j = 0; j < e2.size(); ++j) {
      const Projection& q = e2[j].projection;
      ProductAtom atom{e1[i].point.real(), e2[j].point, {}, i, j};
      if (p.factored() && q.factored()) {
        const Matrix c = adjoint_times(p.basis(), q.basis());
        const double s = frobenius(c);
        if (s <= tol.prune || s * s < 0.5) continue;
        const EigenSystem es = hermitian_eig(hermitian_part(times_adjoint(c, c)), local);
        std::vector<std::size_t> keep;
        for (std::size_t k = 0; k < es.eigenvalues.size(); ++k)
          if (es.eigenvalues[k].real() > 0.5) keep.push_back(k);
        if (keep.empty()) continue;
        atom.projection = Projection::from_basis(p.basis() * select_columns(es.unitary, keep));
      } else {
        const Matrix pq = detail::dense_product(p, q);
        const double s = frobenius(pq);
        if (s <= tol.prune || s * s < 0.5) continue;
        atom.projection = Projection::from_dense(hermitian_part(pq));
      }
      atoms.push_back(std::move(atom));
    }
  }
  return ProductMeasure(n, std::move(atoms));
}

inline MeasureResiduals measure_residuals(const ProductMeasure& prod,
                                          ResidualRoute route = ResidualRoute::automatic) {
  std::vector<const Projection*> ps;
  for (const auto& a : prod.atoms()) ps.push_back(&a.projection);
  return measure_residuals(ps, prod.dim(), route);
}

/// Measure invariants of E₁×E₂ plus the rectangle identity
/// ‖P_ij − P_i Q_j‖ and both marginals Σ_j P_ij = P_i, Σ_i P_ij = Q_j.
inline VerificationReport product_validate(const ProductMeasure& prod, const SpectralMeasure& e1,
                                           const SpectralMeasure& e2, const Tolerances& tol) {
  detail::require_same_dim(e1, e2);
  if (prod.dim() != e1.dim()) throw Error(ErrorKind::DimensionMismatch, "product has wrong dimension");
  const std::size_t n = prod.dim();
  VerificationReport r;
  r.tolerances["rtol"] = tol.rtol;
  detail::record_measure_checks(r, measure_residuals(prod), tol);

  std::vector<Matrix> first(e1.size(), Matrix(0, 0));
  std::vector<Matrix> second(e2.size(), Matrix(0, 0));
  double rectangle = 0.0;
  for (const auto& atom : prod.atoms()) {
    const Matrix pij = atom.projection.dense();
    const Matrix pq = detail::dense_product(e1[atom.first].projection, e2[atom.second].projection);
    rectangle = std::max(rectangle, frobenius(pij - pq));
    if (first[atom.first].empty()) first[atom.first] = Matrix(n);
    if (second[atom.second].empty()) second[atom.second] = Matrix(n);
    first[atom.first] += pij;
    second[atom.second] += pij;
  }
  double marginal_first = 0.0;
  for (std::size_t i = 0; i < e1.size(); ++i) {
    const Matrix p = e1[i].projection.dense();
    marginal_first =
        std::max(marginal_first, frobenius(first[i].empty() ? p : Matrix(first[i] - p)));
  }
  double marginal_second = 0.0;
  for (std::size_t j = 0; j < e2.size(); ++j) {
    const Matrix q = e2[j].projection.dense();
    marginal_second =
        std::max(marginal_second, frobenius(second[j].empty() ? q : Matrix(second[j] - q)));
  }
  const double bound = tol.projection_bound();
  r.check("rectangle", rectangle, bound);
  r.check("marginal_first", marginal_first, bound);
  r.check("marginal_second", marginal_second, bound);
  return r;
}

/// max over atoms of |f|, the operator norm of ∫ f dE.
template <typename F>
double sup_on_atoms(F&& f, const SpectralMeasure& e) {
  double s = 0.0;
  for (const auto& a : e.atoms()) s = std::max(s, std::abs(Complex(f(a.point))));
  return s;
}

/// ‖(∫f₁ dE₁)(∫f₂ dE₂) − Σ f₁(t)f₂(w) P_tw‖_F.
///
/// On finite supports every f₂ is bounded and products of integrals need no
/// closure, so the identity is an exact finite sum up to rounding.
template <typename F1, typename F2>
double fubini_check(F1&& f1, F2&& f2, const SpectralMeasure& e1, const SpectralMeasure& e2,
                    const ProductMeasure& prod) {
  detail::require_same_dim(e1, e2);
  auto g1 = [&](Complex z) { return Complex(f1(z.real())); };
  const Matrix left = pvm_integrate(g1, e1) * pvm_integrate(f2, e2);
  Matrix right(prod.dim());
  for (const auto& atom : prod.atoms()) {
    const Complex value = Complex(f1(atom.t)) * Complex(f2(atom.w));
    if (!is_finite(value)) throw Error(ErrorKind::NonFiniteValue, "integrand is not finite at an atom");
    atom.projection.accumulate(right, value);
  }
  return frobenius(left - right);
}

/// 1 + ‖∫f₁ dE₁‖·‖∫f₂ dE₂‖, the scale fubini_check residuals are judged at.
template <typename F1, typename F2>
double fubini_scale(F1&& f1, F2&& f2, const SpectralMeasure& e1, const SpectralMeasure& e2) {
  auto g1 = [&](Complex z) { return Complex(f1(z.real())); };
  return 1.0 + sup_on_atoms(g1, e1) * sup_on_atoms(f2, e2);
}

struct Weight {
  double value = 0.0;
  bool singular = false;
};

/// f(0) = 0, f(t) = 1/t, with |t| ≤ eps treated as 0 and flagged.
inline Weight inverse_weight_checked(double t, double eps = 1e-14) {
  if (std::abs(t) <= eps) return {0.0, true};
  return {1.0 / t, false};
}

inline double inverse_weight(double t, double eps = 1e-14) {
  return inverse_weight_checked(t, eps).value;
}

/// Image of `prod` under φ: each atom moves to φ(t, w); images within the
/// cluster radius merge into one atom at their rank-weighted mean carrying
/// the sum of their projections.
template <typename Phi>
SpectralMeasure pushforward(const ProductMeasure& prod, Phi&& phi, const Tolerances& tol) {
  std::vector<Complex> images;
  images.reserve(prod.size());
  double estimate = 0.0;
  for (const auto& atom : prod.atoms()) {
    const Complex z = phi(atom.t, atom.w);
    if (!is_finite(z)) throw Error(ErrorKind::NonFiniteValue, "pushforward map is not finite at an atom");
    images.push_back(z);
    estimate = std::max(estimate, std::abs(z));
  }
  const double radius = tol.cluster_radius(estimate);

  std::vector<SpectralAtom> atoms;
  std::vector<Complex> points;
  for (const auto& group : cluster_points(images, radius)) {
    Complex weighted = 0.0;
    double weight = 0.0;
    std::vector<const Projection*> parts;
    for (auto k : group) {
      const auto w = static_cast<double>(prod[k].projection.rank());
      weighted += w * images[k];
      weight += w;
      parts.push_back(&prod[k].projection);
    }
    Complex point = weight > 0.0 ? weighted / weight : images[group.front()];
    if (group.size() == 1) point = images[group.front()];
    atoms.push_back({point, Projection::sum(parts)});
    points.push_back(point);
  }

  std::vector<SpectralAtom> ordered;
  for (auto k : lexicographic_order(points, radius)) ordered.push_back(std::move(atoms[k]));
  return SpectralMeasure(prod.dim(), std::move(ordered));
}

}  // namespace spectral_forge
