#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "g2d/error.hpp"
#include "g2d/linalg.hpp"

namespace g2d {

namespace {

constexpr int kQlMaxIterations = 60;

// Householder reduction to tridiagonal form. On return `v` holds the
// accumulated orthogonal transformation, d the diagonal and e the
// subdiagonal (e[0] = 0).
void tridiagonalize(std::vector<double>& v, std::size_t n, std::vector<double>& d,
                    std::vector<double>& e) {
  auto V = [&](std::size_t i, std::size_t j) -> double& { return v[i * n + j]; };
  for (std::size_t j = 0; j < n; ++j) d[j] = V(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
        V(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        V(j, i) = f;
        g = e[j] + V(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += V(k, j) * d[k];
          e[k] += V(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k) V(k, j) -= (f * e[k] + g * d[k]);
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    V(n - 1, i) = V(i, i);
    V(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = V(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += V(k, i + 1) * V(k, j);
        for (std::size_t k = 0; k <= i; ++k) V(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) V(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = V(n - 1, j);
    V(n - 1, j) = 0.0;
  }
  V(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e), accumulating rotations into the
// rows of `vt` (vt row i is the running eigenvector i).
void tridiagonal_ql(std::vector<double>& vt, std::size_t n, std::vector<double>& d,
                    std::vector<double>& e) {
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::ldexp(1.0, -52);
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m == n) m = n - 1;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kQlMaxIterations) {
          throw ConvergenceError("symmetric_eigen: QL iteration did not converge",
                                 std::abs(e[l]));
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          double* vi = vt.data() + i * n;
          double* vi1 = vt.data() + (i + 1) * n;
          for (std::size_t k = 0; k < n; ++k) {
            const double hk = vi1[k];
            vi1[k] = s * vi[k] + c * hk;
            vi[k] = c * vi[k] - s * hk;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix& s) {
  if (!s.is_square()) throw std::invalid_argument("symmetric_eigen: matrix is not square");
  if (!s.all_finite()) throw std::invalid_argument("symmetric_eigen: non-finite entries");
  const std::size_t n = s.rows();
  SymmetricEigen out;
  if (n == 0) {
    out.vectors = Matrix(0, 0);
    return out;
  }

  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      v[i * n + j] = s(i, j);
      v[j * n + i] = s(i, j);
    }
  std::vector<double> d(n), e(n);
  tridiagonalize(v, n, d, e);

  // QL rotates columns of v; work on the transpose so rotations touch rows.
  std::vector<double> vt(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) vt[j * n + i] = v[i * n + j];
  tridiagonal_ql(vt, n, d, e);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    const double* row = vt.data() + order[k] * n;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = row[i];
  }
  return out;
}

Matrix psd_project(const Matrix& s) {
  if (!s.is_square()) throw std::invalid_argument("psd_project: matrix is not square");
  if (asymmetry(s) > kSymmetryTolerance) {
    throw std::invalid_argument("psd_project: input is not symmetric");
  }
  const std::size_t n = s.rows();
  const SymmetricEigen eig = symmetric_eigen(symmetrized(s));
  // V diag(max(lambda, 0)) V^T, built from the scaled positive part only.
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < n; ++k)
    if (eig.values[k] > 0.0) keep.push_back(k);
  Matrix scaled(n, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const double r = std::sqrt(eig.values[keep[c]]);
    for (std::size_t i = 0; i < n; ++i) scaled(i, c) = eig.vectors(i, keep[c]) * r;
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double x = dot(scaled.row(i), scaled.row(j));
      out(i, j) = x;
      out(j, i) = x;
    }
  return out;
}

double determinant(const Matrix& a) {
  if (!a.is_square()) throw std::invalid_argument("determinant: matrix is not square");
  const std::size_t n = a.rows();
  Matrix lu = a;
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (lu(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(piv).begin());
      det = -det;
    }
    const double pivot = lu(k, k);
    det *= pivot;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = lu(i, k) / pivot;
      if (factor == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= factor * lu(k, j);
    }
  }
  return det;
}

Matrix kron(const Matrix& a, const Matrix& b, std::size_t element_cap) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (rows != 0 && cols > element_cap / rows) {
    throw CapExceeded("kron: result would exceed the element cap");
  }
  Matrix k(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return k;
}

Matrix kron_power(const Matrix& a, int d, std::size_t element_cap) {
  if (d < 0) throw std::invalid_argument("kron_power: negative exponent");
  Matrix out = Matrix::identity(1);
  for (int i = 0; i < d; ++i) out = kron(out, a, element_cap);
  return out;
}

}  // namespace g2d
