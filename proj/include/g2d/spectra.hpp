#pragma once

#include <cstddef>
#include <vector>

#include "g2d/matrix.hpp"

namespace g2d {

// T_n: ones on and below the diagonal. Row i is the initial segment {1..i}.
Matrix lower_triangular_ones(std::size_t n);

// 1 / (2 sin((2j-1) pi / (4n+2))), j = 1..n, nonincreasing.
std::vector<double> tn_singular_values_closed_form(std::size_t n);

// (T_n T_n^T)^{-1}: 2 on the diagonal except a 1 in the last position,
// -1 on both off-diagonals.
Matrix sn_tridiagonal(std::size_t n);

// The 2n x 2n circulant [[T_n, T_n^T], [T_n^T, T_n]] whose first column is
// n+1 ones followed by n-1 zeros. Requires n >= 2.
Matrix circulant_interval(std::size_t n);

struct ComplexValue {
  double re = 0.0;
  double im = 0.0;
  double modulus() const;
};

// Eigenvalues of circulant_interval(n): the Fourier coefficients
// c_j = sum_{k<n+1} w^{jk} with w = exp(-2 pi i / 2n), evaluated directly.
std::vector<ComplexValue> circulant_interval_eigenvalues(std::size_t n);

}  // namespace g2d
