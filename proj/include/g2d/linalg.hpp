#pragma once

#include <cstddef>
#include <vector>

#include "g2d/matrix.hpp"

namespace g2d {

// Entry budget for products that can blow up (Kronecker powers, grids).
inline constexpr std::size_t kDefaultElementCap = 40'000'000;

// Relative accuracy promised by svd(): reconstruction and orthogonality.
inline constexpr double kSvdTolerance = 1e-10;
inline constexpr int kSvdMaxSweeps = 60;

// Thin SVD, a = left * diag(singular_values) * right^T, with
// k = min(rows, cols) columns in both factors and singular values
// sorted nonincreasing.
struct SpectralDecomposition {
  std::vector<double> singular_values;
  Matrix left;   // rows x k, orthonormal columns
  Matrix right;  // cols x k, orthonormal columns
  int sweeps = 0;
};

// One-sided Jacobi on the smaller dimension. Tall inputs are first reduced
// by a Householder QR so the rotations act on a square triangle.
// Throws ConvergenceError after kSvdMaxSweeps sweeps.
SpectralDecomposition svd(const Matrix& a);
std::vector<double> singular_values(const Matrix& a);

// Eigenvalues ascending; eigenvectors are the columns of `vectors`.
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
};

// Householder tridiagonalisation followed by implicit QL. The input must be
// symmetric; only the lower triangle is read.
SymmetricEigen symmetric_eigen(const Matrix& s);

// LU with partial pivoting.
double determinant(const Matrix& a);

Matrix kron(const Matrix& a, const Matrix& b, std::size_t element_cap = kDefaultElementCap);
// d-fold Kronecker power; d = 0 gives the 1x1 identity.
Matrix kron_power(const Matrix& a, int d, std::size_t element_cap = kDefaultElementCap);

double nuclear_norm(const Matrix& a);

// Nearest PSD matrix in Frobenius norm. Inputs whose relative asymmetry
// exceeds kSymmetryTolerance are rejected; smaller asymmetry is averaged out.
inline constexpr double kSymmetryTolerance = 1e-9;
Matrix psd_project(const Matrix& s);

}  // namespace g2d
