#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spectral_forge/error.hpp"
#include "spectral_forge/io.hpp"
#include "spectral_forge/matrix.hpp"

namespace spectral_forge {

/// Seeded generator with a fixed algorithm: 64-bit Mersenne Twister
/// (std::mt19937_64), uniforms from the top 53 bits of each draw, and
/// standard normals by Box–Muller using two uniforms and keeping the cosine
/// branch. Nothing here depends on the standard library's distributions,
/// whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Real and imaginary parts independent standard normals, real first.
  Complex complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

 private:
  std::mt19937_64 engine_;
};

/// Haar-distributed unitary: Q from QR of an n×n complex Gaussian matrix
/// (filled row-major), by modified Gram–Schmidt with one reorthogonalization
/// pass, which leaves R with a positive diagonal.
inline Matrix random_unitary(std::size_t n, Rng& rng) {
  Matrix g(n);
  for (auto& z : g.data()) z = rng.complex_normal();
  Matrix q(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Complex> v = g.column(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += std::conj(q(i, k)) * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q(i, k);
      }
    }
    double norm = 0.0;
    for (const auto& z : v) norm += std::norm(z);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = v[i] / norm;
  }
  return q;
}

/// U diag(values) U*.
inline Matrix unitary_conjugate(const Matrix& u, std::span<const Complex> values) {
  Matrix scaled = u;
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < u.cols(); ++j) scaled(i, j) *= values[j];
  return times_adjoint(scaled, u);
}

enum class OperatorKind {
  random_normal,
  random_hermitian,
  random_unitary,
  multiplication,
  laplacian_1d,
  momentum_1d,
  jordan_block,
  from_file,
};

inline OperatorKind parse_operator_kind(const std::string& s) {
  if (s == "random_normal") return OperatorKind::random_normal;
  if (s == "random_hermitian") return OperatorKind::random_hermitian;
  if (s == "random_unitary") return OperatorKind::random_unitary;
  if (s == "multiplication") return OperatorKind::multiplication;
  if (s == "laplacian_1d") return OperatorKind::laplacian_1d;
  if (s == "momentum_1d") return OperatorKind::momentum_1d;
  if (s == "jordan_block") return OperatorKind::jordan_block;
  if (s == "from_file") return OperatorKind::from_file;
  throw Error(ErrorKind::BadSpec, "unknown operator kind '" + s + "'");
}

inline bool is_random(OperatorKind k) {
  return k == OperatorKind::random_normal || k == OperatorKind::random_hermitian ||
         k == OperatorKind::random_unitary;
}

struct OperatorSpec {
  OperatorKind kind = OperatorKind::random_normal;
  std::size_t dim = 1;
  double scale = 1.0;
  std::optional<std::uint64_t> seed = std::nullopt;
  std::optional<std::string> path = std::nullopt;

  void validate() const {
    if (kind == OperatorKind::from_file) {
      if (!path) throw Error(ErrorKind::BadSpec, "from_file needs a path");
      return;
    }
    if (dim < 1) throw Error(ErrorKind::BadSpec, "dim must be at least 1");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorKind::BadSpec, "scale must be positive");
    if (is_random(kind) && !seed) throw Error(ErrorKind::BadSpec, "random kinds need a seed");
  }
};

/// A generated random normal matrix together with the spectrum it was built
/// from (in generation order).
struct GeneratedNormal {
  Matrix matrix;
  std::vector<Complex> spectrum;
};

/// U diag(d) U* with U Haar and d uniform on the disk of radius `scale`
/// (Hermitian variant: uniform on [−scale, scale]).
inline GeneratedNormal random_normal_with_spectrum(std::size_t n, double scale, std::uint64_t seed,
                                                   bool hermitian = false) {
  Rng rng(seed);
  const Matrix u = random_unitary(n, rng);
  std::vector<Complex> d(n);
  for (auto& z : d) {
    if (hermitian) {
      z = scale * (2.0 * rng.uniform() - 1.0);
    } else {
      const double r = scale * std::sqrt(rng.uniform());
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      z = std::polar(r, angle);
    }
  }
  Matrix m = unitary_conjugate(u, d);
  if (hermitian) m = hermitian_part(m);
  return {std::move(m), d};
}

/// Test operators. multiplication, laplacian_1d and momentum_1d grow with
/// `scale` and stand in for unbounded operators at finite size.
inline Matrix generate(const OperatorSpec& spec) {
  spec.validate();
  const std::size_t n = spec.dim;
  const double s = spec.scale;
  switch (spec.kind) {
    case OperatorKind::random_normal:
      return random_normal_with_spectrum(n, s, *spec.seed).matrix;
    case OperatorKind::random_hermitian:
      return random_normal_with_spectrum(n, s, *spec.seed, true).matrix;
    case OperatorKind::random_unitary: {
      Rng rng(*spec.seed);
      return random_unitary(n, rng);
    }
    case OperatorKind::multiplication: {
      Matrix m(n);
      for (std::size_t k = 0; k < n; ++k) m(k, k) = s * static_cast<double>(k + 1) / static_cast<double>(n);
      return m;
    }
    case OperatorKind::laplacian_1d: {
      Matrix m(n);
      for (std::size_t k = 0; k < n; ++k) {
        m(k, k) = 2.0 * s;
        if (k + 1 < n) {
          m(k, k + 1) = -s;
          m(k + 1, k) = -s;
        }
      }
      return m;
    }
    case OperatorKind::momentum_1d: {
      // s·i·(S − Sᵀ)/2 with S the cyclic forward shift.
      Matrix m(n);
      for (std::size_t k = 0; k < n; ++k) {
        m(k, (k + 1) % n) += Complex(0.0, 0.5 * s);
        m((k + 1) % n, k) -= Complex(0.0, 0.5 * s);
      }
      return m;
    }
    case OperatorKind::jordan_block: {
      Matrix m(n);
      for (std::size_t k = 0; k + 1 < n; ++k) m(k, k + 1) = s;
      return m;
    }
    case OperatorKind::from_file:
      return io::read_matrix(*spec.path);
  }
  throw Error(ErrorKind::BadSpec, "unhandled operator kind");
}

}  // namespace spectral_forge
