#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "spectral_forge/matrix.hpp"

// Independent reference computations. Nothing here calls the library's
// eigensolvers, so agreement with them is evidence rather than tautology.
namespace oracle {

using spectral_forge::Complex;
using spectral_forge::Matrix;

/// Dense matrix with independent entries uniform in the unit square.
inline Matrix random_dense(std::size_t rows, std::size_t cols, std::uint32_t seed) {
  std::minstd_rand gen(seed);
  auto u = [&] { return 2.0 * static_cast<double>(gen()) / static_cast<double>(gen.max()) - 1.0; };
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = Complex(u(), u());
  return m;
}

inline Matrix random_hermitian(std::size_t n, std::uint32_t seed) {
  const Matrix g = random_dense(n, n, seed);
  Matrix h(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
  return h;
}

/// Eigenvalues of the Hermitian 2×2 [[a, b], [conj(b), d]], ascending.
inline std::pair<double, double> hermitian_2x2(double a, Complex b, double d) {
  const double mid = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), std::abs(b));
  return {mid - rad, mid + rad};
}

/// Largest singular value by power iteration on M*M.
inline double power_norm(const Matrix& m, int iterations = 2000) {
  const std::size_t n = m.cols();
  std::vector<Complex> x(n, Complex(1.0, 0.3));
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<Complex> y(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < n; ++j) y[i] += m(i, j) * x[j];
    std::vector<Complex> z(n, 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < n; ++j) z[j] += std::conj(m(i, j)) * y[i];
    double nz = 0.0;
    for (auto v : z) nz += std::norm(v);
    nz = std::sqrt(nz);
    if (nz == 0.0) return 0.0;
    for (std::size_t j = 0; j < n; ++j) x[j] = z[j] / nz;
    sigma = std::sqrt(nz);
  }
  return sigma;
}

/// Entrywise maximum of |a − b|.
inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

/// Naive triple loop, for checking the blocked product.
inline Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

/// U diag(values) U* computed entrywise.
inline Matrix conjugate_diagonal(const Matrix& u, const std::vector<Complex>& values) {
  const std::size_t n = u.rows();
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < values.size(); ++k) s += u(i, k) * values[k] * std::conj(u(j, k));
      m(i, j) = s;
    }
  return m;
}

/// Hausdorff distance between two finite point sets in C.
inline double hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  auto one_way = [](const std::vector<Complex>& x, const std::vector<Complex>& y) {
    double worst = 0.0;
    for (auto p : x) {
      double best = INFINITY;
      for (auto q : y) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

}  // namespace oracle
