#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "g2d/error.hpp"
#include "g2d/linalg.hpp"

namespace g2d {

namespace {

constexpr double kRotationThreshold = 1e-15;

// Column-major scratch: columns[j] holds column j contiguously.
using Columns = std::vector<std::vector<double>>;

Columns to_columns(const Matrix& a) {
  Columns c(a.cols(), std::vector<double>(a.rows()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c[j][i] = a(i, j);
  return c;
}

// Householder QR of a tall matrix. Returns thin Q (m x n) and R (n x n).
void householder_qr(const Matrix& a, Matrix& q, Matrix& r) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Columns w = to_columns(a);
  std::vector<std::vector<double>> reflectors(n);
  std::vector<double> betas(n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double>& col = w[k];
    double sigma = 0.0;
    for (std::size_t i = k; i < m; ++i) sigma += col[i] * col[i];
    sigma = std::sqrt(sigma);
    std::vector<double> v(m - k, 0.0);
    if (sigma == 0.0) {
      reflectors[k] = std::move(v);
      continue;
    }
    const double alpha = col[k] > 0 ? -sigma : sigma;
    for (std::size_t i = k; i < m; ++i) v[i - k] = col[i];
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    betas[k] = vnorm2 == 0.0 ? 0.0 : 2.0 / vnorm2;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += v[i - k] * w[j][i];
      s *= betas[k];
      for (std::size_t i = k; i < m; ++i) w[j][i] -= s * v[i - k];
    }
    reflectors[k] = std::move(v);
  }

  r = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) r(i, j) = w[j][i];

  // Accumulate Q = H_0 ... H_{n-1} applied to the first n unit vectors.
  Columns qc(n, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < n; ++j) qc[j][j] = 1.0;
  for (std::size_t kk = n; kk-- > 0;) {
    const std::vector<double>& v = reflectors[kk];
    if (betas[kk] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = kk; i < m; ++i) s += v[i - kk] * qc[j][i];
      s *= betas[kk];
      for (std::size_t i = kk; i < m; ++i) qc[j][i] -= s * v[i - kk];
    }
  }
  q = Matrix(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = qc[j][i];
}

// Orthonormalise the columns of u in place (two passes of modified
// Gram-Schmidt), replacing degenerate columns by completions drawn from the
// standard basis.
void orthonormalize_columns(Columns& u, std::size_t m) {
  std::size_t next_basis = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    for (int attempt = 0;; ++attempt) {
      const double before = norm2(u[j]);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < j; ++k) {
          const double s = dot(u[k], u[j]);
          for (std::size_t i = 0; i < m; ++i) u[j][i] -= s * u[k][i];
        }
      }
      const double after = norm2(u[j]);
      if (before > 0.0 && after > 0.5 * before && after > 1e-300) {
        for (double& x : u[j]) x /= after;
        break;
      }
      if (next_basis >= m) throw std::logic_error("svd: cannot complete orthonormal basis");
      std::fill(u[j].begin(), u[j].end(), 0.0);
      u[j][next_basis++] = 1.0;
    }
  }
}

// One-sided Jacobi on a matrix with rows >= cols.
SpectralDecomposition jacobi_svd(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Columns w = to_columns(a);
  Columns v(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

  // Columns below this squared norm are numerically zero; rotating them only
  // shuffles rounding noise and can keep the sweep from settling.
  const double fro = frobenius_norm(a);
  const double negligible = fro * fro * 1e-34;

  int sweep = 0;
  bool converged = false;
  for (; sweep < kSvdMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double* wp = w[p].data();
        double* wq = w[q].data();
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += wp[i] * wp[i];
          beta += wq[i] * wq[i];
          gamma += wp[i] * wq[i];
        }
        if (gamma == 0.0 || alpha <= negligible || beta <= negligible ||
            std::abs(gamma) <= kRotationThreshold * std::sqrt(alpha * beta)) {
          continue;
        }
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = wp[i];
          const double y = wq[i];
          wp[i] = c * x - s * y;
          wq[i] = s * x + c * y;
        }
        double* vp = v[p].data();
        double* vq = v[q].data();
        for (std::size_t i = 0; i < n; ++i) {
          const double x = vp[i];
          const double y = vq[i];
          vp[i] = c * x - s * y;
          vq[i] = s * x + c * y;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(dot(w[p], w[q])));
    throw ConvergenceError("svd: Jacobi sweeps did not converge", off);
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(w[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SpectralDecomposition out;
  out.sweeps = sweep;
  out.singular_values.resize(n);
  Columns u(n);
  Columns vs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.singular_values[k] = sigma[j];
    u[k] = w[j];
    if (sigma[j] > 0.0)
      for (double& x : u[k]) x /= sigma[j];
    else
      std::fill(u[k].begin(), u[k].end(), 0.0);
    vs[k] = std::move(v[j]);
  }
  orthonormalize_columns(u, m);

  out.left = Matrix(m, n);
  out.right = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < m; ++i) out.left(i, k) = u[k][i];
    for (std::size_t i = 0; i < n; ++i) out.right(i, k) = vs[k][i];
  }
  return out;
}

}  // namespace

SpectralDecomposition svd(const Matrix& a) {
  if (!a.all_finite()) throw std::invalid_argument("svd: non-finite entries");
  if (a.rows() < a.cols()) {
    SpectralDecomposition t = svd(a.transposed());
    std::swap(t.left, t.right);
    return t;
  }
  if (a.cols() == 0) {
    SpectralDecomposition empty;
    empty.left = Matrix(a.rows(), 0);
    empty.right = Matrix(0, 0);
    return empty;
  }
  if (a.rows() > 2 * a.cols()) {
    Matrix q, r;
    householder_qr(a, q, r);
    SpectralDecomposition s = jacobi_svd(r);
    s.left = q * s.left;
    return s;
  }
  return jacobi_svd(a);
}

std::vector<double> singular_values(const Matrix& a) { return svd(a).singular_values; }

double nuclear_norm(const Matrix& a) {
  const std::vector<double> s = singular_values(a);
  return std::accumulate(s.begin(), s.end(), 0.0);
}

}  // namespace g2d
