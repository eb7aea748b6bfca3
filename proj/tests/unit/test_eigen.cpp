#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "spectral_forge.hpp"
#include "support/oracles.hpp"

using namespace spectral_forge;
using namespace std::complex_literals;

namespace {

const Complex I1 = 1i;

void expect_valid(const Matrix& m, const EigenSystem& es, double tau) {
  EXPECT_LE(unitary_defect(es.unitary), tau);
  EXPECT_LE(reconstruction_residual(m, es), tau * (1.0 + frobenius(m)));
}

TEST(HermitianEig, DiagonalGivesPermutation) {
  const EigenSystem es = hermitian_eig(Matrix::diagonal({3.0, 1.0}), Tolerances{});
  EXPECT_EQ(es.eigenvalues, (std::vector<Complex>{1.0, 3.0}));
  EXPECT_EQ(es.unitary, Matrix({{0.0, 1.0}, {1.0, 0.0}}));
}

TEST(HermitianEig, PauliX) {
  const EigenSystem es = hermitian_eig(Matrix{{0.0, 1.0}, {1.0, 0.0}}, Tolerances{});
  EXPECT_NEAR(es.eigenvalues[0].real(), -1.0, 1e-15);
  EXPECT_NEAR(es.eigenvalues[1].real(), 1.0, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  // Largest component made real positive; ties resolve to the first entry.
  EXPECT_NEAR(std::abs(es.unitary(0, 0) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(es.unitary(1, 0) + r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(es.unitary(0, 1) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(es.unitary(1, 1) - r), 0.0, 1e-15);
}

TEST(HermitianEig, MatchesClosedFormOnRandom2x2) {
  for (std::uint32_t seed = 0; seed < 50; ++seed) {
    const Matrix h = oracle::random_hermitian(2, seed);
    const auto [lo, hi] = oracle::hermitian_2x2(h(0, 0).real(), h(0, 1), h(1, 1).real());
    const EigenSystem es = hermitian_eig(h, Tolerances::for_dim(2));
    EXPECT_NEAR(es.eigenvalues[0].real(), lo, 1e-14);
    EXPECT_NEAR(es.eigenvalues[1].real(), hi, 1e-14);
    for (const auto& z : es.eigenvalues) EXPECT_EQ(z.imag(), 0.0);
  }
}

TEST(HermitianEig, RandomResidualAndOrdering) {
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    const Matrix h = oracle::random_hermitian(16, seed);
    const EigenSystem es = hermitian_eig(h, Tolerances::for_dim(16));
    expect_valid(h, es, 1e-12);
    EXPECT_TRUE(std::is_sorted(es.eigenvalues.begin(), es.eigenvalues.end(),
                               [](Complex a, Complex b) { return a.real() < b.real(); }));
    // Trace and Frobenius norm are similarity invariants.
    double sum = 0.0, sq = 0.0;
    for (const auto& z : es.eigenvalues) {
      sum += z.real();
      sq += z.real() * z.real();
    }
    EXPECT_NEAR(sum, trace(h).real(), 1e-12);
    EXPECT_NEAR(std::sqrt(sq), frobenius(h), 1e-12);
  }
}

TEST(HermitianEig, PhaseConventionMakesLargestComponentRealPositive) {
  const Matrix h = oracle::random_hermitian(10, 77);
  const EigenSystem es = hermitian_eig(h, Tolerances::for_dim(10));
  for (std::size_t j = 0; j < 10; ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 10; ++i)
      if (std::abs(es.unitary(i, j)) > std::abs(es.unitary(best, j))) best = i;
    EXPECT_EQ(es.unitary(best, j).imag(), 0.0);
    EXPECT_GT(es.unitary(best, j).real(), 0.0);
  }
}

TEST(HermitianEig, RejectsNonHermitian) {
  try {
    hermitian_eig(Matrix{{0.0, 1.0}, {0.0, 0.0}}, Tolerances{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
  }
}

TEST(HermitianEig, DegenerateSpectrum) {
  const Matrix u = [] {
    Rng rng(5);
    return random_unitary(6, rng);
  }();
  const Matrix h = oracle::conjugate_diagonal(u, {2.0, 2.0, 2.0, -1.0, -1.0, 7.0});
  const EigenSystem es = hermitian_eig(hermitian_part(h), Tolerances::for_dim(6));
  expect_valid(h, es, 1e-13);
  EXPECT_NEAR(es.eigenvalues[0].real(), -1.0, 1e-13);
  EXPECT_NEAR(es.eigenvalues[4].real(), 2.0, 1e-13);
}

TEST(NormalEig, DiagonalSortedLexicographically) {
  const EigenSystem es = normal_eig(Matrix::diagonal({2.0 * I1, -3.0}), Tolerances{});
  ASSERT_EQ(es.eigenvalues.size(), 2u);
  EXPECT_EQ(es.eigenvalues[0], Complex(-3.0));
  EXPECT_EQ(es.eigenvalues[1], 2.0 * I1);
}

TEST(NormalEig, RotationHasEigenvaluesMinusIPlusI) {
  const Matrix m{{0.0, -1.0}, {1.0, 0.0}};
  const EigenSystem es = normal_eig(m, Tolerances{});
  EXPECT_NEAR(std::abs(es.eigenvalues[0] + I1), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(es.eigenvalues[1] - I1), 0.0, 1e-15);
  expect_valid(m, es, 1e-15);
}

TEST(NormalEig, RecoversGeneratingSpectrum) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = random_normal_with_spectrum(32, 3.0, seed);
    const EigenSystem es = normal_eig(g.matrix, Tolerances::for_dim(32));
    expect_valid(g.matrix, es, 1e-12);
    EXPECT_LE(oracle::hausdorff(es.eigenvalues, g.spectrum), 1e-12);
  }
}

TEST(NormalEig, SharedModulusAndRealParts) {
  // Eigenvalues ±1 ± i share real parts pairwise; the K stage must split them.
  Rng rng(3);
  const Matrix u = random_unitary(4, rng);
  const std::vector<Complex> d{1.0 + I1, 1.0 - I1, -1.0 + I1, -1.0 - I1};
  const Matrix m = oracle::conjugate_diagonal(u, d);
  const EigenSystem es = normal_eig(m, Tolerances::for_dim(4));
  expect_valid(m, es, 1e-13);
  const std::vector<Complex> expected{-1.0 - I1, -1.0 + I1, 1.0 - I1, 1.0 + I1};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_LE(std::abs(es.eigenvalues[k] - expected[k]), 1e-13);
}

TEST(NormalEig, HermitianInputHasRealSpectrum) {
  const Matrix h = oracle::random_hermitian(12, 8);
  const Tolerances tol = Tolerances::for_dim(12);
  const EigenSystem es = normal_eig(h, tol);
  for (const auto& z : es.eigenvalues) EXPECT_LE(std::abs(z.imag()), tol.atol);
}

TEST(NormalEig, RejectsJordanBlock) {
  try {
    normal_eig(Matrix{{0.0, 1.0}, {0.0, 0.0}}, Tolerances{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotNormal);
  }
}

TEST(JointEig, DiagonalizesCommutingPairWithCoincidentFirstMember) {
  // A has one eigenvalue of multiplicity 3; only B tells the vectors apart.
  Rng rng(11);
  const Matrix u = random_unitary(5, rng);
  const Matrix a = hermitian_part(oracle::conjugate_diagonal(u, {0.5, 0.5, 0.5, 0.25, 1.0}));
  const Matrix b = oracle::conjugate_diagonal(u, {I1, -I1, 0.3, 0.3, 0.3});
  const JointEigenSystem js = joint_eig(a, b, Tolerances::for_dim(5));
  EXPECT_LE(unitary_defect(js.unitary), 1e-13);
  const Matrix ua = adjoint_times(js.unitary, a * js.unitary);
  const Matrix ub = adjoint_times(js.unitary, b * js.unitary);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      if (i == j) continue;
      EXPECT_LE(std::abs(ua(i, j)), 1e-13);
      EXPECT_LE(std::abs(ub(i, j)), 1e-13);
    }
}

TEST(JointEig, RejectsNonCommutingPair) {
  const Matrix a = oracle::random_hermitian(4, 1);
  const Matrix b = oracle::random_hermitian(4, 2);
  try {
    joint_eig(a, b, Tolerances::for_dim(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotCommuting);
  }
}

TEST(Eig, DeterministicAcrossCalls) {
  const auto g = random_normal_with_spectrum(20, 1.0, 42);
  const EigenSystem a = normal_eig(g.matrix, Tolerances::for_dim(20));
  const EigenSystem b = normal_eig(g.matrix, Tolerances::for_dim(20));
  EXPECT_EQ(a.unitary, b.unitary);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
}

}  // namespace
