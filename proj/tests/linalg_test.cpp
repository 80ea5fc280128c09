#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "g2d/error.hpp"
#include "g2d/linalg.hpp"
#include "g2d/matrix_io.hpp"
#include "g2d/spectra.hpp"
#include "test_support.hpp"

namespace g2d {
namespace {

using testing::max_abs_diff;
using testing::random_gaussian;
using testing::cofactor_determinant;
using testing::random_integer;

void expect_valid_svd(const Matrix& a) {
  const SpectralDecomposition s = svd(a);
  const std::size_t k = std::min(a.rows(), a.cols());
  ASSERT_EQ(s.singular_values.size(), k);
  ASSERT_EQ(s.left.rows(), a.rows());
  ASSERT_EQ(s.right.rows(), a.cols());
  for (std::size_t i = 0; i + 1 < k; ++i) EXPECT_GE(s.singular_values[i], s.singular_values[i + 1]);
  for (double x : s.singular_values) EXPECT_GE(x, 0.0);

  Matrix sigma(k, k);
  for (std::size_t i = 0; i < k; ++i) sigma(i, i) = s.singular_values[i];
  const Matrix rebuilt = s.left * sigma * s.right.transposed();
  const double scale = std::max(frobenius_norm(a), 1.0);
  EXPECT_LE(frobenius_norm(rebuilt - a), kSvdTolerance * scale);
  EXPECT_LE(max_abs_diff(s.left.transposed() * s.left, Matrix::identity(k)), kSvdTolerance);
  EXPECT_LE(max_abs_diff(s.right.transposed() * s.right, Matrix::identity(k)), kSvdTolerance);
}

TEST(KronTest, IdentityTimesIdentity) {
  EXPECT_EQ(kron(Matrix::identity(2), Matrix::identity(2)), Matrix::identity(4));
}

TEST(KronTest, TriangleSquared) {
  const Matrix t2{{1, 0}, {1, 1}};
  const Matrix expected{{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}, {1, 1, 1, 1}};
  EXPECT_EQ(kron(t2, t2), expected);
}

TEST(KronTest, SingularValuesArePairwiseProducts) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix a = random_gaussian(rng, 3, 3);
    const Matrix b = random_gaussian(rng, 3, 3);
    std::vector<double> expected;
    for (double x : singular_values(a))
      for (double y : singular_values(b)) expected.push_back(x * y);
    std::sort(expected.rbegin(), expected.rend());
    const std::vector<double> got = singular_values(kron(a, b));
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-10 * expected[0]);
  }
}

TEST(KronTest, MixedProductProperty) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_gaussian(rng, 2, 3), c = random_gaussian(rng, 3, 2);
    const Matrix b = random_gaussian(rng, 3, 4), d = random_gaussian(rng, 4, 2);
    const Matrix lhs = kron(a, b) * kron(c, d);
    const Matrix rhs = kron(a * c, b * d);
    EXPECT_LE(max_abs_diff(lhs, rhs), 1e-10 * std::max(1.0, max_abs(rhs)));
  }
}

TEST(KronTest, ElementCapIsEnforced) {
  EXPECT_THROW(kron(Matrix::ones(100, 100), Matrix::ones(100, 100), 1000), CapExceeded);
  EXPECT_THROW(kron_power(Matrix::ones(3, 2), 20), CapExceeded);
  EXPECT_EQ(kron_power(Matrix::ones(3, 2), 0), Matrix::identity(1));
}

TEST(SvdTest, IdentityHasUnitSingularValues) {
  for (double s : singular_values(Matrix::identity(5))) EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(SvdTest, TriangleMatchesClosedForm) {
  const std::vector<double> got = singular_values(lower_triangular_ones(3));
  const double pi = std::numbers::pi;
  const std::vector<double> expected{1 / (2 * std::sin(pi / 14)), 1 / (2 * std::sin(3 * pi / 14)),
                                     1 / (2 * std::sin(5 * pi / 14))};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
}

TEST(SvdTest, SquaresMatchGramEigenvalues) {
  std::mt19937_64 rng(3);
  const Matrix a = random_gaussian(rng, 4, 6);
  const std::vector<double> s = singular_values(a);
  SymmetricEigen eig = symmetric_eigen(a * a.transposed());
  std::sort(eig.values.rbegin(), eig.values.rend());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(s[i] * s[i], eig.values[i], 1e-10 * eig.values[0]);
}

TEST(SvdTest, FactorsAreValidAcrossShapes) {
  std::mt19937_64 rng(4);
  const std::vector<std::pair<int, int>> shapes{{1, 1}, {1, 5}, {5, 1}, {4, 6}, {7, 7},
                                                {20, 3}, {3, 20}, {40, 12}, {9, 9}};
  for (auto [m, n] : shapes) {
    SCOPED_TRACE(std::to_string(m) + "x" + std::to_string(n));
    expect_valid_svd(random_gaussian(rng, m, n));
  }
}

TEST(SvdTest, RankDeficientInputsKeepOrthonormalFactors) {
  std::mt19937_64 rng(5);
  const Matrix low = random_gaussian(rng, 8, 2) * random_gaussian(rng, 2, 6);
  expect_valid_svd(low);
  expect_valid_svd(Matrix(4, 3));
  expect_valid_svd(Matrix{{1, 1, 0}, {1, 1, 0}, {0, 0, 0}, {1, 1, 1}});
  expect_valid_svd(random_gaussian(rng, 30, 2) * random_gaussian(rng, 2, 10));
}

TEST(SvdTest, RejectsNonFiniteInput) {
  Matrix a = Matrix::identity(2);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(svd(a), std::invalid_argument);
}

TEST(SymmetricEigenTest, ResidualAndOrthogonality) {
  std::mt19937_64 rng(6);
  for (std::size_t n : {1u, 2u, 5u, 17u, 60u}) {
    const Matrix g = random_gaussian(rng, n, n);
    const Matrix s = symmetrized(g + g.transposed());
    const SymmetricEigen e = symmetric_eigen(s);
    for (std::size_t i = 0; i + 1 < n; ++i) EXPECT_LE(e.values[i], e.values[i + 1]);
    const Matrix av = s * e.vectors;
    const Matrix vl = e.vectors * Matrix::diagonal(e.values);
    EXPECT_LE(max_abs_diff(av, vl), 1e-11 * std::max(1.0, max_abs(s)) * n);
    EXPECT_LE(max_abs_diff(e.vectors.transposed() * e.vectors, Matrix::identity(n)), 1e-12 * n);
  }
}

TEST(SymmetricEigenTest, RepeatedEigenvalues) {
  const SymmetricEigen e = symmetric_eigen(Matrix::ones(6, 6));
  EXPECT_NEAR(e.values.back(), 6.0, 1e-12);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(e.values[i], 0.0, 1e-12);
}

TEST(NuclearNormTest, IdentityAndTriangle) {
  EXPECT_NEAR(nuclear_norm(Matrix::identity(7)), 7.0, 1e-12);
  const std::vector<double> closed = tn_singular_values_closed_form(10);
  const double expected = std::accumulate(closed.begin(), closed.end(), 0.0);
  EXPECT_NEAR(nuclear_norm(lower_triangular_ones(10)), expected, 1e-10);
}

TEST(NuclearNormTest, CirculantBoundedByFourTriangles) {
  const std::size_t n = 8;
  EXPECT_LE(nuclear_norm(circulant_interval(n)), 4 * nuclear_norm(lower_triangular_ones(n)));
}

TEST(NuclearNormTest, TransposeInvariant) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_gaussian(rng, 1 + trial % 6, 1 + (trial * 5) % 7);
    const double x = nuclear_norm(a);
    EXPECT_NEAR(x, nuclear_norm(a.transposed()), 1e-10 * x);
  }
}

TEST(DeterminantTest, KnownValues) {
  EXPECT_DOUBLE_EQ(determinant(Matrix::identity(4)), 1.0);
  EXPECT_NEAR(determinant(Matrix{{2, 1}, {-1, 2}}), 5.0, 1e-14);
  EXPECT_NEAR(determinant(Matrix{{0, 1}, {1, 0}}), -1.0, 1e-14);
  EXPECT_EQ(determinant(Matrix{{1, 2}, {2, 4}}), 0.0);
  EXPECT_THROW(determinant(Matrix(2, 3)), std::invalid_argument);
}

TEST(DeterminantTest, MatchesCofactorExpansion) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_integer(rng, 4, 4, -3, 3);
    EXPECT_NEAR(determinant(a), cofactor_determinant(a), 1e-9);
  }
}

TEST(DeterminantTest, ProductRule) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_gaussian(rng, 5, 5), b = random_gaussian(rng, 5, 5);
    const double lhs = determinant(a * b);
    const double rhs = determinant(a) * determinant(b);
    EXPECT_NEAR(lhs, rhs, 1e-8 * std::abs(rhs));
  }
}

TEST(PsdProjectTest, PsdInputUnchanged) {
  std::mt19937_64 rng(10);
  const Matrix g = random_gaussian(rng, 5, 5);
  const Matrix psd = g * g.transposed();
  EXPECT_LE(max_abs_diff(psd_project(psd), psd), kSvdTolerance * max_abs(psd));
}

TEST(PsdProjectTest, ClipsNegativeEigenvalues) {
  const Matrix p = psd_project(Matrix{{1, 0}, {0, -1}});
  EXPECT_LE(max_abs_diff(p, Matrix{{1, 0}, {0, 0}}), 1e-15);
}

TEST(PsdProjectTest, NearestAmongSampledPsdMatrices) {
  std::mt19937_64 rng(13);
  const Matrix g = random_gaussian(rng, 6, 6);
  const Matrix s = symmetrized(g + g.transposed());
  const Matrix p = psd_project(s);
  for (double lambda : symmetric_eigen(p).values) EXPECT_GE(lambda, -1e-12);
  const double best = frobenius_norm(s - p);
  for (int trial = 0; trial < 200; ++trial) {
    // PSD perturbations of the projection: add a random PSD term or shrink.
    const Matrix h = random_gaussian(rng, 6, 2) * 0.1;
    const Matrix y = (trial % 2 == 0) ? p + h * h.transposed() : p * (1.0 - 0.01 * (trial % 7 + 1));
    EXPECT_GE(frobenius_norm(s - y), best - 1e-12);
  }
}

TEST(PsdProjectTest, RejectsAsymmetricInput) {
  EXPECT_THROW(psd_project(Matrix{{1, 1}, {0, 1}}), std::invalid_argument);
  EXPECT_THROW(psd_project(Matrix(2, 3)), std::invalid_argument);
}

TEST(ClosedFormTest, SmallCases) {
  const std::vector<double> one = tn_singular_values_closed_form(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0], 1.0, 1e-15);
  const std::vector<double> three = tn_singular_values_closed_form(3);
  const std::vector<double> numeric = singular_values(lower_triangular_ones(3));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(three[i], numeric[i], 1e-10);
}

TEST(ClosedFormTest, AgreesWithSvdUpTo64) {
  for (std::size_t n = 1; n <= 64; ++n) {
    const std::vector<double> closed = tn_singular_values_closed_form(n);
    const std::vector<double> numeric = singular_values(lower_triangular_ones(n));
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(numeric[i], closed[i], 1e-8 * closed[i]) << n;
  }
}

TEST(TridiagonalTest, SmallCase) {
  EXPECT_EQ(sn_tridiagonal(2), (Matrix{{2, -1}, {-1, 1}}));
  EXPECT_EQ(sn_tridiagonal(1), (Matrix{{1}}));
}

TEST(TridiagonalTest, InvertsTriangleGram) {
  for (std::size_t n = 1; n <= 64; ++n) {
    const Matrix t = lower_triangular_ones(n);
    const Matrix product = sn_tridiagonal(n) * (t * t.transposed());
    ASSERT_LE(max_abs_diff(product, Matrix::identity(n)), 1e-10) << n;
  }
}

TEST(TridiagonalTest, EigenvaluesGiveSingularValues) {
  const std::size_t n = 6;
  SymmetricEigen e = symmetric_eigen(sn_tridiagonal(n));
  // Ascending eigenvalues map to descending singular values.
  const std::vector<double> closed = tn_singular_values_closed_form(n);
  for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(1.0 / std::sqrt(e.values[j]), closed[j], 1e-10);
}

TEST(CirculantTest, DisplayedExample) {
  const Matrix expected{{1, 0, 0, 1, 1, 1}, {1, 1, 0, 0, 1, 1}, {1, 1, 1, 0, 0, 1},
                        {1, 1, 1, 1, 0, 0}, {0, 1, 1, 1, 1, 0}, {0, 0, 1, 1, 1, 1}};
  EXPECT_EQ(circulant_interval(3), expected);
}

TEST(CirculantTest, BlockLayout) {
  const std::size_t n = 5;
  const Matrix c = circulant_interval(n);
  const Matrix t = lower_triangular_ones(n);
  const Matrix tt = t.transposed();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_EQ(c(i, j), t(i, j));
      EXPECT_EQ(c(i, n + j), tt(i, j));
      EXPECT_EQ(c(n + i, j), tt(i, j));
      EXPECT_EQ(c(n + i, n + j), t(i, j));
    }
}

TEST(CirculantTest, FourierModuliSumToNuclearNorm) {
  const std::size_t n = 8;
  const auto eig = circulant_interval_eigenvalues(n);
  double sum = 0.0;
  for (const auto& c : eig) sum += c.modulus();
  EXPECT_NEAR(sum, nuclear_norm(circulant_interval(n)), 1e-8);
  EXPECT_NEAR(eig[0].re, n + 1.0, 1e-12);
  EXPECT_NEAR(eig[0].im, 0.0, 1e-12);
}

TEST(CirculantTest, ClosedFormQuotient) {
  // c_j = (w^{js} - 1) / (w^j - 1) for j != 0.
  const std::size_t n = 6, size = 2 * n, s = n + 1;
  const auto eig = circulant_interval_eigenvalues(n);
  for (std::size_t j = 1; j < size; ++j) {
    const double a = -2 * std::numbers::pi * j / size;
    const double nr = std::cos(a * s) - 1, ni = std::sin(a * s);
    const double dr = std::cos(a) - 1, di = std::sin(a);
    const double den = dr * dr + di * di;
    EXPECT_NEAR(eig[j].re, (nr * dr + ni * di) / den, 1e-12);
    EXPECT_NEAR(eig[j].im, (ni * dr - nr * di) / den, 1e-12);
  }
}

TEST(MatrixIoTest, RoundTripIsExact) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_gaussian(rng, 1 + trial % 4, 1 + trial % 3) * std::pow(10.0, trial - 5);
    EXPECT_EQ(parse_matrix_text(format_matrix(a)).matrix, a);
  }
}

TEST(MatrixIoTest, CommentsAndLabels) {
  const std::string text =
      "# labels:\n# {1}\n# {1,2}\n2 2  # header\n1 0\n# interleaved comment\n1 1 # trailing\n";
  const MatrixText parsed = parse_matrix_text(text);
  EXPECT_EQ(parsed.matrix, (Matrix{{1, 0}, {1, 1}}));
  ASSERT_EQ(parsed.labels.size(), 2u);
  EXPECT_EQ(parsed.labels[1], "{1,2}");
  const std::vector<std::string> labels{"a", "b"};
  EXPECT_EQ(parse_matrix_text(format_matrix(parsed.matrix, labels)).labels, labels);
}

TEST(MatrixIoTest, MalformedInputThrows) {
  EXPECT_THROW(parse_matrix_text(""), FormatError);
  EXPECT_THROW(parse_matrix_text("2\n1 1\n"), FormatError);
  EXPECT_THROW(parse_matrix_text("2 2\n1 1\n1\n"), FormatError);
  EXPECT_THROW(parse_matrix_text("1 2\n1 x\n"), FormatError);
  EXPECT_THROW(parse_matrix_text("2 1\n1\n"), FormatError);
}

}  // namespace
}  // namespace g2d
