#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qsens/error.hpp"
#include "qsens/linalg.hpp"
#include "qsens/states.hpp"
#include "test_support.hpp"

namespace qsens {
namespace {

using testing::deg;

void expect_spectrum(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "index " << i;
}

ComplexMatrix diag(std::initializer_list<double> d) { return ComplexMatrix::diagonal(std::vector<double>(d)); }

TEST(ComplexMatrix, RejectsOversizeAndMismatchedDimensions) {
  EXPECT_THROW(ComplexMatrix(5), Error);
  EXPECT_THROW(ComplexMatrix(2) + ComplexMatrix(4), Error);
  EXPECT_THROW(ComplexMatrix(2) * ComplexMatrix(4), Error);
  EXPECT_FALSE(ComplexMatrix(2).approx_equal(ComplexMatrix(4), 1.0));
}

TEST(ComplexMatrix, AdjointConjugateAndTrace) {
  const ComplexMatrix m(2, {Complex{1, 2}, Complex{3, -1}, Complex{0, 4}, Complex{5, 0}});
  EXPECT_EQ(m.adjoint()(0, 1), Complex(0, -4));
  EXPECT_EQ(m.conjugate()(0, 0), Complex(1, -2));
  EXPECT_EQ(m.trace(), Complex(6, 2));
  EXPECT_GT(m.hermiticity_error(), 1.0);
  EXPECT_DOUBLE_EQ((m * ComplexMatrix::identity(2)).frobenius_norm(), m.frobenius_norm());
}

TEST(HermitianEig, DiagonalInput) {
  expect_spectrum(hermitian_eig(diag({1, 0, 0, 0})).eigenvalues, {1, 0, 0, 0}, 1e-15);
  expect_spectrum(hermitian_eig(diag({0, 3, -1, 2})).eigenvalues, {3, 2, 0, -1}, 1e-15);
}

TEST(HermitianEig, ScaledIdentity) {
  expect_spectrum(hermitian_eig(ComplexMatrix::identity(4) * Complex{0.25}).eigenvalues, {0.25, 0.25, 0.25, 0.25},
                  1e-15);
}

TEST(HermitianEig, WernerSpectrum) {
  const auto s = hermitian_eig(rho1(0.2, deg(22.5)).matrix());
  expect_spectrum(s.eigenvalues, {0.85, 0.05, 0.05, 0.05}, 1e-12);
}

TEST(HermitianEig, RejectsNonHermitian) {
  ComplexMatrix m = diag({1, 2});
  m(0, 1) = 1e-6;
  try {
    hermitian_eig(m);
    FAIL() << "expected NotHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotHermitian);
  }
  EXPECT_NO_THROW(hermitian_eig(m, 1e-5));
}

TEST(HermitianEig, EigenvaluesOnlyAgreesWithFullSolve) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const ComplexMatrix m = testing::random_hermitian(rng, 4);
    expect_spectrum(hermitian_eigenvalues(m), hermitian_eig(m).eigenvalues, 1e-12);
  }
}

TEST(HermitianEig, TwoByTwoClosedForm) {
  const ComplexMatrix m(2, {2.0, Complex{0, 1}, Complex{0, -1}, 2.0});
  expect_spectrum(hermitian_eig(m).eigenvalues, {3.0, 1.0}, 1e-14);
}

TEST(HermitianEigProperty, ReconstructionAndOrthonormality) {
  std::mt19937_64 rng(2024);
  for (std::size_t n : {1u, 2u, 3u, 4u}) {
    for (int k = 0; k < 200; ++k) {
      const ComplexMatrix m = testing::random_hermitian(rng, n);
      const HermitianSpectrum s = hermitian_eig(m);
      EXPECT_LT((s.reconstruct() - m).frobenius_norm(), 1e-10 * std::max(1.0, m.frobenius_norm()));
      const ComplexMatrix gram = s.eigenvectors.adjoint() * s.eigenvectors;
      EXPECT_TRUE(gram.approx_equal(ComplexMatrix::identity(n), 1e-10));
      for (std::size_t i = 1; i < n; ++i) EXPECT_GE(s.eigenvalues[i - 1], s.eigenvalues[i]);
    }
  }
}

TEST(HermitianEigProperty, DegenerateSpectra) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const ComplexMatrix u = testing::random_unitary(rng, 4);
    const ComplexMatrix m = u * diag({0.5, 0.5, 0.0, 0.0}) * u.adjoint();
    const HermitianSpectrum s = hermitian_eig(m);
    expect_spectrum(s.eigenvalues, {0.5, 0.5, 0.0, 0.0}, 1e-12);
    EXPECT_LT((s.reconstruct() - m).frobenius_norm(), 1e-10);
  }
}

TEST(SqrtPsd, IdentityAndDiagonal) {
  EXPECT_TRUE(sqrt_psd(ComplexMatrix::identity(4)).approx_equal(ComplexMatrix::identity(4), 1e-14));
  EXPECT_TRUE(sqrt_psd(diag({4, 1, 0, 0})).approx_equal(diag({2, 1, 0, 0}), 1e-14));
}

TEST(SqrtPsd, WernerRootSpectrum) {
  const ComplexMatrix r = sqrt_psd(rho1(0.2, deg(22.5)).matrix());
  expect_spectrum(hermitian_eig(r).eigenvalues, {std::sqrt(0.85), std::sqrt(0.05), std::sqrt(0.05), std::sqrt(0.05)},
                  1e-12);
}

TEST(SqrtPsd, ClampsNoiseButRejectsNegativeEigenvalues) {
  EXPECT_TRUE(sqrt_psd(diag({1, -5e-10})).approx_equal(diag({1, 0}), 1e-15));
  try {
    sqrt_psd(diag({1, -1e-6}));
    FAIL() << "expected NotPSD";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPSD);
  }
}

TEST(SqrtPsdProperty, SquaresBackToInput) {
  std::mt19937_64 rng(99);
  for (std::size_t rank = 1; rank <= 4; ++rank) {
    for (int k = 0; k < 100; ++k) {
      const ComplexMatrix m = testing::random_density(rng, 4, rank).matrix();
      const ComplexMatrix r = sqrt_psd(m);
      EXPECT_LT((r * r - m).frobenius_norm(), 1e-9);
      EXPECT_LT(r.hermiticity_error(), 1e-12);
      EXPECT_GE(hermitian_eig(r).eigenvalues.back(), -1e-12);
    }
  }
}

TEST(TraceNorm, Examples) {
  EXPECT_DOUBLE_EQ(trace_norm(ComplexMatrix(4)), 0.0);
  EXPECT_NEAR(trace_norm(diag({0.5, -0.5, 0, 0})), 1.0, 1e-15);
  const ComplexMatrix diff = rho1(0, deg(22.5)).matrix() - fully_mixed(4).matrix();
  EXPECT_NEAR(trace_norm(diff), 1.5, 1e-12);
}

TEST(TraceNormProperty, UnitaryInvariance) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const ComplexMatrix m = testing::random_hermitian(rng, 4);
    const ComplexMatrix u = testing::random_unitary(rng, 4);
    EXPECT_NEAR(trace_norm(u * m * u.adjoint(), 1e-9), trace_norm(m), 1e-10 * std::max(1.0, trace_norm(m)));
  }
}

TEST(Kron, Examples) {
  EXPECT_TRUE(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)).approx_equal(ComplexMatrix::identity(4), 0));
  EXPECT_TRUE(kron(diag({1, 0}), diag({1, 0})).approx_equal(diag({1, 0, 0, 0}), 0));

  // Anti-diagonal, read from the top-right corner: -1, 1, 1, -1.
  const ComplexMatrix yy = kron(pauli_y(), pauli_y());
  const double anti[4] = {-1, 1, 1, -1};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const Complex want = (i + j == 3) ? Complex{anti[i]} : Complex{};
      EXPECT_EQ(yy(i, j), want) << i << "," << j;
    }
  }
  EXPECT_THROW(kron(ComplexMatrix::identity(4), ComplexMatrix::identity(2)), Error);
}

TEST(KronProperty, BlockLayoutAndTrace) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const ComplexMatrix a = testing::random_hermitian(rng, 2);
    const ComplexMatrix b = testing::random_hermitian(rng, 2);
    const ComplexMatrix c = kron(a, b);
    EXPECT_NEAR(std::abs(c.trace() - a.trace() * b.trace()), 0.0, 1e-12);
    EXPECT_EQ(c(2 + 1, 0 + 1), a(1, 0) * b(1, 1));
  }
}

}  // namespace
}  // namespace qsens
