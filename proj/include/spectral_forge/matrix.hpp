#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "spectral_forge/error.hpp"

namespace spectral_forge {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Dense complex matrix, row-major. Operators on C^n are the square case;
/// rectangular instances carry orthonormal bases of subspaces.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  explicit Matrix(std::size_t n) : Matrix(n, n) {}

  /// Takes ownership of row-major entries; rejects wrong length and
  /// non-finite values.
  Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "expected " + std::to_string(rows_ * cols_) + " entries, got " +
                      std::to_string(data_.size()));
    }
    for (const auto& z : data_) {
      if (!is_finite(z)) throw Error(ErrorKind::NonFiniteValue, "matrix entry is not finite");
    }
  }

  Matrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const Complex> values) {
    Matrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  static Matrix diagonal(std::initializer_list<Complex> values) {
    return diagonal(std::span<const Complex>(values.begin(), values.size()));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  /// Dimension of the space an operator acts on.
  std::size_t dim() const noexcept { return rows_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  std::span<Complex> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const Complex> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<Complex> column(std::size_t j) const {
    std::vector<Complex> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](Complex z) { return is_finite(z); });
  }

  Matrix& operator+=(const Matrix& other) {
    require_same_shape(other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
  }

  Matrix& operator-=(const Matrix& other) {
    require_same_shape(other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
  }

  Matrix& operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

  void require_same_shape(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "shape " + std::to_string(rows_) + "x" + std::to_string(cols_) + " vs " +
                      std::to_string(other.rows_) + "x" + std::to_string(other.cols_));
    }
  }

  void require_square() const {
    if (!is_square()) throw Error(ErrorKind::DimensionMismatch, "operator matrix must be square");
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(Complex s, Matrix a) { return a *= s; }
inline Matrix operator*(Matrix a, Complex s) { return a *= s; }

namespace detail {

// acc += a * b for complex scalars without the NaN-recovery path of operator*.
inline void fma(Complex& acc, Complex a, Complex b) {
  acc = Complex(acc.real() + a.real() * b.real() - a.imag() * b.imag(),
                acc.imag() + a.real() * b.imag() + a.imag() * b.real());
}

inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace detail

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "inner dimensions differ in matrix product");
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t inner = a.cols();
  const std::size_t cols = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex* crow = c.row(i).data();
    for (std::size_t k = 0; k < inner; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex(0.0)) continue;
      const double ar = aik.real();
      const double ai = aik.imag();
      const Complex* brow = b.row(k).data();
      for (std::size_t j = 0; j < cols; ++j) {
        const double br = brow[j].real();
        const double bi = brow[j].imag();
        crow[j] = Complex(crow[j].real() + ar * br - ai * bi, crow[j].imag() + ar * bi + ai * br);
      }
    }
  }
  return c;
}

/// Conjugate transpose.
inline Matrix adjoint(const Matrix& m) {
  Matrix r(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = std::conj(m(i, j));
  return r;
}

inline Matrix transpose(const Matrix& m) {
  Matrix r(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = m(i, j);
  return r;
}

/// a* b without materializing a*.
inline Matrix adjoint_times(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "row counts differ in adjoint product");
  }
  Matrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const Complex* arow = a.row(k).data();
    const Complex* brow = b.row(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const Complex aki = std::conj(arow[i]);
      if (aki == Complex(0.0)) continue;
      Complex* crow = c.row(i).data();
      for (std::size_t j = 0; j < b.cols(); ++j) detail::fma(crow[j], aki, brow[j]);
    }
  }
  return c;
}

/// a b* without materializing b*.
inline Matrix times_adjoint(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "column counts differ in adjoint product");
  }
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const Complex* arow = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const Complex* brow = b.row(j).data();
      Complex s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) detail::fma(s, arow[k], std::conj(brow[k]));
      c(i, j) = s;
    }
  }
  return c;
}

inline double frobenius(const Matrix& m) {
  // Scaled accumulation keeps huge and tiny entries representable.
  double scale = 0.0;
  for (const auto& z : m.data()) scale = std::max({scale, std::abs(z.real()), std::abs(z.imag())});
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& z : m.data()) {
    const double re = z.real() / scale;
    const double im = z.imag() / scale;
    sum += re * re + im * im;
  }
  return scale * std::sqrt(sum);
}

inline Complex trace(const Matrix& m) {
  m.require_square();
  Complex t = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

/// (M + M*) / 2
inline Matrix hermitian_part(const Matrix& m) {
  m.require_square();
  Matrix h(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return h;
}

/// (M - M*) / (2i), Hermitian, so that M = H + iK.
inline Matrix skew_part(const Matrix& m) {
  m.require_square();
  Matrix k(m.rows());
  const Complex half_over_i(0.0, -0.5);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      k(i, j) = half_over_i * (m(i, j) - std::conj(m(j, i)));
  return k;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// Columns of m selected by index, in the given order.
inline Matrix select_columns(const Matrix& m, std::span<const std::size_t> idx) {
  Matrix r(m.rows(), idx.size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = 0; k < idx.size(); ++k) r(i, k) = m(i, idx[k]);
  return r;
}

/// [a b] side by side.
inline Matrix hconcat(const Matrix& a, const Matrix& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.rows() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "row counts differ in hconcat");
  Matrix r(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::copy(a.row(i).begin(), a.row(i).end(), r.row(i).begin());
    std::copy(b.row(i).begin(), b.row(i).end(), r.row(i).begin() + a.cols());
  }
  return r;
}

inline Matrix scalar_matrix(std::size_t n, Complex s) { return s * Matrix::identity(n); }

}  // namespace spectral_forge
