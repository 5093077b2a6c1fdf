#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "corpca/error.hpp"
#include "corpca/linalg.hpp"
#include "corpca/random.hpp"

using namespace corpca;

namespace {

Vector reference_singular_values(const Matrix& A) {
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues();
}

Matrix concat(const Matrix& B, const Vector& v) {
  Matrix out(B.rows(), B.cols() + 1);
  out << B, v;
  return out;
}

// Compares the leading k values of both lists; the remaining ones must vanish.
void expect_same_spectrum(const Vector& got, const Vector& want, double tol) {
  const Eigen::Index k = std::max(got.size(), want.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    const double g = i < got.size() ? got(i) : 0.0;
    const double w = i < want.size() ? want(i) : 0.0;
    EXPECT_NEAR(g, w, tol * std::max(1.0, want(0))) << "index " << i;
  }
}

}  // namespace

TEST(ThinSvd, MatchesJacobiOnRandomMatrices) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index rows = 1 + trial % 7 * 5;
    const Eigen::Index cols = 1 + trial % 5 * 4;
    const Matrix A = randn(rows, cols, rng);
    const ThinSvd s = thin_svd(A);
    EXPECT_EQ(s.rank(), std::min(rows, cols));
    expect_same_spectrum(s.S, reference_singular_values(A), 1e-12);
    EXPECT_LT((s.reconstruct() - A).norm(), 1e-12 * std::max(1.0, A.norm()));
    EXPECT_LT(orthonormality_error(s.U), 1e-12);
    EXPECT_LT(orthonormality_error(s.V), 1e-12);
    for (Eigen::Index i = 1; i < s.S.size(); ++i) EXPECT_GE(s.S(i - 1), s.S(i));
  }
}

TEST(ThinSvd, SignConvention) {
  Rng rng(2);
  const ThinSvd s = thin_svd(randn(12, 4, rng));
  for (Eigen::Index k = 0; k < s.U.cols(); ++k) {
    Eigen::Index at = 0;
    s.U.col(k).cwiseAbs().maxCoeff(&at);
    EXPECT_GE(s.U(at, k), 0.0);
  }
}

TEST(ThinSvd, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(thin_svd(Matrix(0, 3)), InvalidInput);
  Matrix A = Matrix::Ones(3, 3);
  A(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(thin_svd(A), InvalidInput);
}

TEST(ThinSvd, DiagonalExample) {
  Matrix A = Matrix::Zero(3, 2);
  A(0, 0) = 3.0;
  A(1, 1) = -4.0;
  const ThinSvd s = thin_svd(A);
  EXPECT_NEAR(s.S(0), 4.0, 1e-14);
  EXPECT_NEAR(s.S(1), 3.0, 1e-14);
  EXPECT_NEAR(s.nuclear_norm(), 7.0, 1e-14);
}

TEST(IncSvd, MatchesFullSvdOfConcatenation) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 5 + trial;
    const Eigen::Index d = 1 + trial % 9;
    const Matrix B = randn(n, d, rng);
    const Vector v = randn(n, rng);
    const ThinSvd inc = inc_svd(thin_svd(B), v);
    const Matrix C = concat(B, v);
    expect_same_spectrum(inc.S, reference_singular_values(C), 1e-10);
    EXPECT_LT((inc.reconstruct() - C).norm(), 1e-10 * C.norm());
    EXPECT_LT(orthonormality_error(inc.U), 1e-10);
    EXPECT_LT(orthonormality_error(inc.V), 1e-10);
  }
}

TEST(IncSvd, VectorInsideSpanKeepsRank) {
  Rng rng(4);
  const Matrix B = randn(30, 4, rng);
  const Vector v = B * randn(4, rng);
  const ThinSvd inc = inc_svd(thin_svd(B), v);
  EXPECT_EQ(inc.rank(), 4);
  EXPECT_LT((inc.reconstruct() - concat(B, v)).norm(), 1e-10 * B.norm());
  expect_same_spectrum(inc.S, reference_singular_values(concat(B, v)), 1e-10);
}

TEST(IncSvd, ZeroVectorAndEmptyPrior) {
  Rng rng(5);
  const Matrix B = randn(10, 3, rng);
  const ThinSvd z = inc_svd(thin_svd(B), Vector::Zero(10));
  EXPECT_LT((z.reconstruct() - concat(B, Vector::Zero(10))).norm(), 1e-12);

  ThinSvd empty;
  empty.U = Matrix(10, 0);
  empty.S = Vector(0);
  empty.V = Matrix(0, 0);
  const Vector v = randn(10, rng);
  const ThinSvd one = inc_svd(empty, v);
  ASSERT_EQ(one.rank(), 1);
  EXPECT_NEAR(one.S(0), v.norm(), 1e-12);
}

TEST(IncSvd, DimensionMismatchThrows) {
  Rng rng(6);
  EXPECT_THROW(inc_svd(thin_svd(randn(6, 2, rng)), Vector::Ones(5)), InvalidInput);
}

TEST(Svt, AgreesWithExplicitShrinkage) {
  Rng rng(7);
  const Matrix A = randn(15, 8, rng);
  Eigen::JacobiSVD<Matrix> ref(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double tau = ref.singularValues()(3);
  const Vector shrunk = (ref.singularValues().array() - tau).max(0.0).matrix();
  const Matrix want = ref.matrixU() * shrunk.asDiagonal() * ref.matrixV().transpose();
  EXPECT_LT((svt(A, tau) - want).norm(), 1e-10);
  EXPECT_LT((shrink(thin_svd(A), tau).reconstruct() - want).norm(), 1e-10);
  EXPECT_EQ(shrink(thin_svd(A), tau).rank(), 3);
}

TEST(Svt, LargeThresholdGivesZero) {
  Rng rng(8);
  const Matrix A = randn(6, 6, rng);
  EXPECT_EQ(svt(A, 1e6).norm(), 0.0);
  EXPECT_EQ(shrink(thin_svd(A), 1e6).rank(), 0);
  EXPECT_LT((svt(A, 0.0) - A).norm(), 1e-12);
}

TEST(Compact, DropsVanishingDirections) {
  Rng rng(9);
  const Matrix A = randn(20, 2, rng) * randn(2, 6, rng);
  const ThinSvd c = compact(thin_svd(A));
  EXPECT_EQ(c.rank(), 2);
  EXPECT_LT((c.reconstruct() - A).norm(), 1e-10 * A.norm());
}

TEST(SpectralNorm, MatchesLargestSingularValue) {
  Rng rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix A = randn(40 + trial, 25, rng);
    EXPECT_NEAR(spectral_norm(A), reference_singular_values(A)(0), 1e-9);
  }
  EXPECT_EQ(spectral_norm(Matrix::Zero(3, 3)), 0.0);
}

TEST(Orthonormality, IdentityIsExact) {
  EXPECT_EQ(orthonormality_error(Matrix::Identity(5, 3)), 0.0);
  Matrix Q = Matrix::Identity(4, 2);
  Q(0, 1) = 0.5;
  EXPECT_NEAR(orthonormality_error(Q), 0.5, 1e-15);
}
