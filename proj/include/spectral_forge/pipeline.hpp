#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "spectral_forge/decomposition.hpp"
#include "spectral_forge/error.hpp"
#include "spectral_forge/matrix.hpp"
#include "spectral_forge/product_measure.hpp"
#include "spectral_forge/report.hpp"
#include "spectral_forge/spectral_measure.hpp"
#include "spectral_forge/tolerances.hpp"

namespace spectral_forge {

struct PipelineOptions {
  Tolerances tol;
  /// Inputs with ‖T‖₂ above this are refused unless explicitly allowed:
  /// A's smallest atom 1/(1+‖T‖²) then falls below the singular threshold.
  double max_norm = 1e8;
  bool allow_ill_conditioned = false;
};

/// Every stage of the reconstruction T = ∫ z dE from the bounded pair.
struct PipelineResult {
  Decomposition decomposition;
  SpectralMeasure e1;  // of A, on R
  SpectralMeasure e2;  // of B, on the compact set K ⊂ C
  ProductMeasure product;
  SpectralMeasure spectral_measure;  // of T
  VerificationReport report;
  /// Resolution radii used for E₁ (in 1/t) and E₂ (in w).
  double first_radius = 0.0;
  double second_radius = 0.0;
};

/// Relaxation factor for bounds at ‖T‖₂ beyond 10².
///
/// The pair stores the spectrum of T squeezed by 1/(1+|z|²), and the inverse
/// of I + T*T carries a backward error of order eps·‖T‖₂². Recovered points
/// therefore carry an absolute error of order eps·‖T‖₂², a relative error
/// growing linearly in ‖T‖₂; bounds widen by ‖T‖₂/10² past 10².
inline double conditioning_factor(double norm_t) { return std::max(1.0, norm_t / 100.0); }

/// Acceptance bounds for a pipeline run on an n×n T.
struct PipelineBounds {
  double reconstruction;  // ‖∫ z dE − T‖_F
  double point_gap;       // distance to the directly computed atoms
  double projection_gap;  // ‖P − P_direct‖_F
  double support_b;       // radius of the support of E₂

  static PipelineBounds for_operator(const Matrix& t, double norm_t, const Tolerances& tol) {
    const double kappa = conditioning_factor(norm_t);
    PipelineBounds b;
    b.reconstruction = 1e3 * tol.rtol * (1.0 + frobenius(t)) * kappa;
    b.point_gap = 10.0 * tol.cluster_relative * (1.0 + norm_t) * kappa;
    b.projection_gap = 1e4 * tol.rtol * kappa;
    b.support_b = 0.5 + tol.projection_bound();
    return b;
  }
};

/// E₁ and E₂ for the pair of an n×n T, over one joint eigenbasis.
///
/// E₁ is clustered in x = 1/t = 1 + |z|², where the inverse's backward error
/// is absolute, at a radius a few hundred ulps of 1 + ‖T‖². E₂ is clustered
/// in w at a radius below the image δ/(1+‖T‖²) of the cluster radius δ of T;
/// z and z' with |z| ≈ |z'| differ in w by about that much, while those
/// with w ≈ w' differ in x and are split by E₁.
struct BoundedPairMeasures {
  SpectralMeasure e1;
  SpectralMeasure e2;
  double first_radius = 0.0;
  double second_radius = 0.0;
};

inline BoundedPairMeasures resolve_bounded_pair(const Decomposition& d, const Tolerances& tol) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double norm_t = d.source_norm;
  const double ulps = 64.0 * eps * static_cast<double>(d.a.rows());
  const double squeeze = 1.0 + norm_t * norm_t;
  BoundedPairMeasures out;
  out.first_radius = ulps * squeeze;
  out.second_radius = std::max(ulps, 0.5 * tol.cluster_radius(norm_t) / squeeze);

  const JointEigenSystem js = joint_eig(d.a, d.b, tol);
  std::vector<Complex> t_values;
  std::vector<Complex> x_keys;
  for (double t : js.first) {
    t_values.emplace_back(t, 0.0);
    x_keys.emplace_back(1.0 / std::max(t, std::numeric_limits<double>::min()), 0.0);
  }
  out.e1 = detail::measure_from_eigenvectors(js.unitary, t_values, x_keys, out.first_radius, 0.0);
  std::vector<Complex> w_values = js.second;
  if (is_hermitian(d.b, tol)) {
    for (auto& w : w_values) w = Complex(w.real(), 0.0);
  }
  out.e2 = detail::measure_from_eigenvectors(js.unitary, w_values, out.second_radius);
  return out;
}

/// decompose → E₁ of A → E₂ of B → E₁×E₂ → pushforward along
/// (t, w) ↦ f(t)·w with f(0) = 0, f(t) = 1/t.
inline PipelineResult spectral_theorem(const Matrix& t, const PipelineOptions& options) {
  const Tolerances& tol = options.tol;
  tol.validate();
  PipelineResult res;
  res.decomposition = decompose(t, tol);
  const double norm_t = res.decomposition.source_norm;
  if (norm_t > options.max_norm && !options.allow_ill_conditioned) {
    throw Error(ErrorKind::IllConditioned,
                "‖T‖₂ = " + format_number(norm_t) + " exceeds " + format_number(options.max_norm) +
                    "; A's atoms fall below the singular threshold");
  }

  BoundedPairMeasures pair = resolve_bounded_pair(res.decomposition, tol);
  res.e1 = std::move(pair.e1);
  res.e2 = std::move(pair.e2);
  res.first_radius = pair.first_radius;
  res.second_radius = pair.second_radius;

  const double defect = commute_defect(res.e1, res.e2);
  if (defect > commute_bound(tol)) {
    throw Error(ErrorKind::NotCommuting,
                "spectral measures of A and B do not commute (defect " + format_number(defect) + ")");
  }
  res.product = product_measure(res.e1, res.e2, tol);

  const double eps_sing = tol.singular * (1.0 + res.e1.support_radius());
  std::size_t singular = 0;
  for (const auto& atom : res.product.atoms())
    if (inverse_weight_checked(atom.t, eps_sing).singular) ++singular;
  if (singular > 0) {
    throw Error(ErrorKind::NonFiniteValue,
                std::to_string(singular) + " atom(s) of A lie within " + format_number(eps_sing) +
                    " of 0; the reciprocal weight breaks down");
  }
  res.spectral_measure = pushforward(
      res.product, [&](double tt, Complex w) { return inverse_weight(tt, eps_sing) * w; }, tol);

  const PipelineBounds bounds = PipelineBounds::for_operator(t, norm_t, tol);
  VerificationReport& r = res.report;
  r.tolerances["rtol"] = tol.rtol;
  r.tolerances["atol"] = tol.atol;
  r.tolerances["first_radius"] = res.first_radius;
  r.tolerances["second_radius"] = res.second_radius;
  r.tolerances["conditioning_factor"] = conditioning_factor(norm_t);
  const Matrix recovered = pvm_integrate([](Complex z) { return z; }, res.spectral_measure);
  r.check("reconstruction", frobenius(recovered - t), bounds.reconstruction);
  r.check("commute_defect", defect, commute_bound(tol));
  r.check("e2_support_radius", res.e2.support_radius(), bounds.support_b);

  const VerificationReport pv = product_validate(res.product, res.e1, res.e2, tol);
  for (const auto& [name, value] : pv.residuals) r.check("product_" + name, value, pv.tolerances.at(name));
  const VerificationReport ev = pvm_validate(res.spectral_measure, tol);
  for (const auto& name : {"idempotency", "orthogonality", "completeness", "rank_defect"})
    r.check(std::string("measure_") + name, ev.residual(name), ev.tolerances.at(name));

  r.residuals["source_norm"] = norm_t;
  r.residuals["e1_atoms"] = static_cast<double>(res.e1.size());
  r.residuals["e2_atoms"] = static_cast<double>(res.e2.size());
  r.residuals["product_atoms"] = static_cast<double>(res.product.size());
  r.residuals["spectral_atoms"] = static_cast<double>(res.spectral_measure.size());
  return res;
}

inline PipelineResult spectral_theorem(const Matrix& t, const Tolerances& tol) {
  return spectral_theorem(t, PipelineOptions{.tol = tol});
}

/// Compares the pipeline's spectral measure with one computed directly.
///
/// Pipeline atoms are paired greedily, in order, with the nearest unmatched
/// direct atom (ties to the lexicographically first) if it lies within the
/// cluster radius. Reports the worst point and projection gaps over matched
/// pairs and the number of atoms left unmatched on either side.
inline VerificationReport cross_check(const PipelineResult& result, const SpectralMeasure& direct,
                                      const Tolerances& tol) {
  const SpectralMeasure& mine = result.spectral_measure;
  if (mine.dim() != direct.dim()) throw Error(ErrorKind::DimensionMismatch, "measures act on different spaces");
  const double radius =
      tol.cluster_radius(std::max(mine.support_radius(), direct.support_radius()));

  std::vector<bool> taken(direct.size(), false);
  double max_point = 0.0;
  double max_projection = 0.0;
  std::size_t matched = 0;
  for (const auto& atom : mine.atoms()) {
    std::size_t best = direct.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < direct.size(); ++k) {
      if (taken[k]) continue;
      const double d = std::abs(atom.point - direct[k].point);
      if (d < best_dist) {
        best_dist = d;
        best = k;
      }
    }
    if (best == direct.size() || best_dist > radius) continue;
    taken[best] = true;
    ++matched;
    max_point = std::max(max_point, best_dist);
    max_projection = std::max(max_projection,
                              frobenius(atom.projection.dense() - direct[best].projection.dense()));
  }
  const double unmatched = static_cast<double>((mine.size() - matched) + (direct.size() - matched));

  const double norm_t = result.decomposition.source_norm;
  const double kappa = conditioning_factor(norm_t);
  VerificationReport r;
  r.tolerances["acceptance_radius"] = radius;
  r.tolerances["conditioning_factor"] = kappa;
  r.check("unmatched", unmatched, 0.0);
  r.check("max_point_gap", max_point, 10.0 * tol.cluster_relative * (1.0 + norm_t) * kappa);
  r.check("max_projection_gap", max_projection, 1e4 * tol.rtol * kappa);
  r.residuals["pipeline_atoms"] = static_cast<double>(mine.size());
  r.residuals["direct_atoms"] = static_cast<double>(direct.size());
  return r;
}

}  // namespace spectral_forge
