#include <gtest/gtest.h>

#include <cmath>

#include "spectral_forge.hpp"
#include "support/oracles.hpp"

using namespace spectral_forge;
using namespace std::complex_literals;

namespace {

const Complex I1 = 1i;

std::vector<Complex> points(const SpectralMeasure& e) {
  std::vector<Complex> out;
  for (const auto& a : e.atoms()) out.push_back(a.point);
  return out;
}

TEST(Pipeline, DiagonalExampleEveryStage) {
  const Matrix t = Matrix::diagonal({2.0 * I1, -3.0});
  const Tolerances tol = Tolerances::for_dim(2);
  const PipelineResult res = spectral_theorem(t, tol);

  EXPECT_LE(oracle::max_abs_diff(res.decomposition.a, Matrix::diagonal({0.2, 0.1})), 1e-16);
  EXPECT_LE(oracle::max_abs_diff(res.decomposition.b, Matrix::diagonal({0.4 * I1, -0.3})), 1e-16);

  ASSERT_EQ(res.product.size(), 2u);
  for (const auto& atom : res.product.atoms()) {
    const Matrix p = atom.projection.dense();
    if (std::abs(atom.t - 0.2) < 1e-15) {
      EXPECT_NEAR(std::abs(atom.w - 0.4 * I1), 0.0, 1e-16);
      EXPECT_LE(oracle::max_abs_diff(p, Matrix::diagonal({1.0, 0.0})), 1e-15);
    } else {
      EXPECT_NEAR(atom.t, 0.1, 1e-16);
      EXPECT_NEAR(std::abs(atom.w + 0.3), 0.0, 1e-16);
      EXPECT_LE(oracle::max_abs_diff(p, Matrix::diagonal({0.0, 1.0})), 1e-15);
    }
  }

  const SpectralMeasure& e = res.spectral_measure;
  ASSERT_EQ(e.size(), 2u);
  EXPECT_NEAR(std::abs(e[0].point + 3.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e[1].point - 2.0 * I1), 0.0, 1e-15);
  EXPECT_LE(oracle::max_abs_diff(e[0].projection.dense(), Matrix::diagonal({0.0, 1.0})), 1e-15);
  EXPECT_LE(oracle::max_abs_diff(e[1].projection.dense(), Matrix::diagonal({1.0, 0.0})), 1e-15);
  EXPECT_LE(res.report.residual("reconstruction"), 1e-14);
  EXPECT_TRUE(res.report.all_pass());
  EXPECT_EQ(res.report.residual("spectral_atoms"), 2.0);
}

TEST(Pipeline, ZeroOperatorHasSingleAtom) {
  const PipelineResult res = spectral_theorem(Matrix(3), Tolerances::for_dim(3));
  ASSERT_EQ(res.spectral_measure.size(), 1u);
  EXPECT_EQ(res.spectral_measure[0].point, Complex(0.0));
  EXPECT_LE(frobenius(res.spectral_measure[0].projection.dense() - Matrix::identity(3)), 1e-15);
}

TEST(Pipeline, RandomNormalMatchesDirect) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto g = random_normal_with_spectrum(32, 5.0, seed);
    const Tolerances tol = Tolerances::for_dim(32);
    const PipelineResult res = spectral_theorem(g.matrix, tol);
    EXPECT_TRUE(res.report.all_pass());
    const SpectralMeasure direct = pvm_from_normal(g.matrix, tol);
    const VerificationReport cc = cross_check(res, direct, tol);
    EXPECT_TRUE(cc.all_pass());
    EXPECT_EQ(cc.residual("unmatched"), 0.0);
    EXPECT_LE(cc.residual("max_projection_gap"), 1e-6 * 32);
    EXPECT_EQ(res.spectral_measure.size(), direct.size());
    // Points approximate the generating spectrum.
    EXPECT_LE(oracle::hausdorff(points(res.spectral_measure), g.spectrum), tol.cluster_radius(5.0));
  }
}

TEST(Pipeline, CrossCheckOnDiagonalIsExact) {
  const Matrix t = Matrix::diagonal({1.0, 2.0, 3.0});
  const Tolerances tol = Tolerances::for_dim(3);
  const VerificationReport cc = cross_check(spectral_theorem(t, tol), pvm_from_normal(t, tol), tol);
  EXPECT_EQ(cc.residual("unmatched"), 0.0);
  EXPECT_LE(cc.residual("max_point_gap"), 1e-12);
  EXPECT_LE(cc.residual("max_projection_gap"), 1e-12);
}

TEST(Pipeline, CrossCheckFlagsMismatchedClustering) {
  const Matrix t = Matrix::diagonal({1.0, 1.0 + 1e-4, 3.0});
  const Tolerances tol = Tolerances::for_dim(3);
  Tolerances coarse = tol;
  coarse.cluster = 1e-2;
  const VerificationReport cc = cross_check(spectral_theorem(t, tol), pvm_from_normal(t, coarse), tol);
  EXPECT_GT(cc.residual("unmatched"), 0.0);
  EXPECT_FALSE(cc.passed("unmatched"));
}

TEST(Pipeline, HermitianInputGivesRealAtoms) {
  const Tolerances tol = Tolerances::for_dim(10);
  const PipelineResult res = spectral_theorem(oracle::random_hermitian(10, 5), tol);
  for (const auto& a : res.spectral_measure.atoms()) EXPECT_LE(std::abs(a.point.imag()), tol.atol);
  EXPECT_TRUE(res.report.all_pass());
}

TEST(Pipeline, SupportOfSecondFactorWithinHalf) {
  const auto g = random_normal_with_spectrum(12, 30.0, 3);
  const PipelineResult res = spectral_theorem(g.matrix, Tolerances::for_dim(12));
  EXPECT_LE(res.e2.support_radius(), 0.5 + 1e-12);
  for (const auto& a : res.e1.atoms()) {
    EXPECT_GT(a.point.real(), 0.0);
    EXPECT_LE(a.point.real(), 1.0 + 1e-14);
  }
}

TEST(Pipeline, ModulusCollisionsAreResolvedJointly) {
  // z and −z, and z and 1/z̄, collide in A (|z| equal) or in B (z/(1+|z|²) equal).
  const std::vector<Complex> d{2.0, -2.0, 2.0 * I1, 0.5, Complex(0.3, 0.4), Complex(-0.4, 0.3)};
  Rng rng(17);
  const Matrix u = random_unitary(d.size(), rng);
  const Matrix t = oracle::conjugate_diagonal(u, d);
  const Tolerances tol = Tolerances::for_dim(d.size());
  const PipelineResult res = spectral_theorem(t, tol);
  EXPECT_TRUE(res.report.all_pass());
  EXPECT_EQ(res.spectral_measure.size(), d.size());
  EXPECT_LE(oracle::hausdorff(points(res.spectral_measure), d), 1e-12);
  EXPECT_LT(res.e1.size(), d.size());
  EXPECT_LT(res.e2.size(), d.size());
  EXPECT_TRUE(cross_check(res, pvm_from_normal(t, tol), tol).all_pass());
}

TEST(Pipeline, DegradesGracefullyAtLargeScale) {
  const auto g = random_normal_with_spectrum(16, 1.0, 2);
  const Matrix t = 1e4 * g.matrix;
  const Tolerances tol = Tolerances::for_dim(16);
  const PipelineResult res = spectral_theorem(t, tol);
  EXPECT_TRUE(res.report.all_pass());
  EXPECT_GT(res.report.tolerances.at("conditioning_factor"), 1.0);
  const VerificationReport cc = cross_check(res, pvm_from_normal(t, tol), tol);
  EXPECT_TRUE(cc.all_pass());
  EXPECT_EQ(cc.residual("unmatched"), 0.0);
}

TEST(Pipeline, RefusesIllConditionedUnlessAllowed) {
  const Matrix t = Matrix::diagonal({1e9, 1.0});
  try {
    spectral_theorem(t, Tolerances::for_dim(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IllConditioned);
  }
  PipelineOptions opt{.tol = Tolerances::for_dim(2), .allow_ill_conditioned = true};
  // Past the refusal the reciprocal weight breaks down: A's atom 1e-18 is singular.
  try {
    spectral_theorem(t, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteValue);
  }
}

TEST(Pipeline, RejectsNonNormal) {
  for (std::size_t n = 2; n <= 5; ++n) {
    OperatorSpec spec{.kind = OperatorKind::jordan_block, .dim = n};
    try {
      spectral_theorem(generate(spec), Tolerances::for_dim(n));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NotNormal);
    }
  }
}

TEST(ConditioningFactor, Schedule) {
  EXPECT_EQ(conditioning_factor(0.0), 1.0);
  EXPECT_EQ(conditioning_factor(100.0), 1.0);
  EXPECT_EQ(conditioning_factor(1e4), 100.0);
}

}  // namespace
