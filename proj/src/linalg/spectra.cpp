#include "g2d/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace g2d {

Matrix lower_triangular_ones(std::size_t n) {
  Matrix t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) t(i, j) = 1.0;
  return t;
}

std::vector<double> tn_singular_values_closed_form(std::size_t n) {
  if (n == 0) throw std::invalid_argument("tn_singular_values_closed_form: n must be >= 1");
  std::vector<double> s(n);
  const double denom = 4.0 * static_cast<double>(n) + 2.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double angle = (2.0 * static_cast<double>(j) - 1.0) * std::numbers::pi / denom;
    s[j - 1] = 1.0 / (2.0 * std::sin(angle));
  }
  // sin is increasing on (0, pi/2), so the sequence is already nonincreasing.
  return s;
}

Matrix sn_tridiagonal(std::size_t n) {
  if (n == 0) throw std::invalid_argument("sn_tridiagonal: n must be >= 1");
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    s(i, i) = 2.0;
    if (i + 1 < n) {
      s(i, i + 1) = -1.0;
      s(i + 1, i) = -1.0;
    }
  }
  s(n - 1, n - 1) = 1.0;
  return s;
}

Matrix circulant_interval(std::size_t n) {
  if (n < 2) throw std::invalid_argument("circulant_interval: n must be >= 2");
  const std::size_t size = 2 * n;
  Matrix c(size, size);
  // Entry (i, j) of a circulant is c[(i - j) mod size]; c[k] = 1 for k <= n.
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) {
      const std::size_t k = (i + size - j) % size;
      c(i, j) = k <= n ? 1.0 : 0.0;
    }
  return c;
}

double ComplexValue::modulus() const { return std::hypot(re, im); }

std::vector<ComplexValue> circulant_interval_eigenvalues(std::size_t n) {
  if (n < 2) throw std::invalid_argument("circulant_interval_eigenvalues: n must be >= 2");
  const std::size_t size = 2 * n;
  const std::size_t ones = n + 1;
  std::vector<ComplexValue> out(size);
  for (std::size_t j = 0; j < size; ++j) {
    ComplexValue c;
    for (std::size_t k = 0; k < ones; ++k) {
      // w^{jk} with w = exp(-2 pi i / size); reduce the exponent first.
      const double angle =
          -2.0 * std::numbers::pi * static_cast<double>((j * k) % size) / static_cast<double>(size);
      c.re += std::cos(angle);
      c.im += std::sin(angle);
    }
    out[j] = c;
  }
  return out;
}

}  // namespace g2d
