#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "g2d/linalg.hpp"
#include "internal.hpp"

namespace g2d {

namespace {

void check_weights(const Matrix& a, std::span<const double> p, std::span<const double> q) {
  if (p.size() != a.rows() || q.size() != a.cols())
    throw std::invalid_argument("weights: size mismatch");
  for (double x : p)
    if (!(x >= 0.0)) throw std::invalid_argument("weights: negative or NaN entry");
  for (double x : q)
    if (!(x >= 0.0)) throw std::invalid_argument("weights: negative or NaN entry");
}

std::vector<double> sqrt_all(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::sqrt(v[i]);
  return out;
}

std::pair<double, double> max_row_col_norms(const Matrix& b, const Matrix& c) {
  double rb = 0.0, cc = 0.0;
  for (std::size_t i = 0; i < b.rows(); ++i) rb = std::max(rb, norm2(b.row(i)));
  std::vector<double> col(c.cols(), 0.0);
  for (std::size_t k = 0; k < c.rows(); ++k)
    for (std::size_t j = 0; j < c.cols(); ++j) col[j] += c(k, j) * c(k, j);
  for (double x : col) cc = std::max(cc, std::sqrt(x));
  return {rb, cc};
}

}  // namespace

double weighted_nuclear_norm(const Matrix& a, std::span<const double> p, std::span<const double> q) {
  check_weights(a, p, q);
  if (a.empty()) return 0.0;
  const auto sp = sqrt_all(p), sq = sqrt_all(q);
  return nuclear_norm(scale_rows_cols(a, sp, sq));
}

namespace detail {

WeightedEvaluator::WeightedEvaluator(const Matrix& a) {
  transposed_ = a.rows() < a.cols();
  const Matrix t = transposed_ ? a.transposed() : Matrix();
  const Matrix& src = transposed_ ? t : a;
  rows_.rows = src.rows();
  rows_.cols = src.cols();
  rows_.start.assign(1, 0);
  for (std::size_t i = 0; i < src.rows(); ++i) {
    for (std::size_t j = 0; j < src.cols(); ++j)
      if (src(i, j) != 0.0) {
        rows_.index.push_back(static_cast<std::uint32_t>(j));
        rows_.value.push_back(src(i, j));
      }
    rows_.start.push_back(rows_.index.size());
  }
}

WeightedSpectrum WeightedEvaluator::operator()(std::span<const double> p,
                                               std::span<const double> q) const {
  if (!transposed_) return tall(p, q);
  WeightedSpectrum s = tall(q, p);
  std::swap(s.row_ratio, s.col_ratio);
  return s;
}

WeightedSpectrum WeightedEvaluator::tall(std::span<const double> p,
                                         std::span<const double> q) const {
  const std::size_t m = rows_.rows, n = rows_.cols;
  // Lower triangle of G = Q^{1/2} A^T P A Q^{1/2}.
  Matrix g(n, n);
  for (std::size_t i = 0; i < m; ++i) {
    const double w = p[i];
    if (w == 0.0) continue;
    for (std::size_t u = rows_.start[i]; u < rows_.start[i + 1]; ++u) {
      const std::size_t j = rows_.index[u];
      const double x = w * rows_.value[u];
      for (std::size_t v = rows_.start[i]; v <= u; ++v) g(j, rows_.index[v]) += x * rows_.value[v];
    }
  }
  std::vector<double> sq(n);
  for (std::size_t j = 0; j < n; ++j) sq[j] = std::sqrt(q[j]);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k <= j; ++k) g(j, k) *= sq[j] * sq[k];

  const SymmetricEigen e = symmetric_eigen(g);
  const double top = std::max(0.0, e.values.back());
  WeightedSpectrum out;
  out.row_ratio.assign(m, 0.0);
  out.col_ratio.assign(n, 0.0);
  if (top == 0.0) return out;

  std::vector<std::size_t> keep;
  std::vector<double> sigma;
  for (std::size_t k = 0; k < n; ++k) {
    if (e.values[k] > 0.0) out.nuclear += std::sqrt(e.values[k]);
    if (e.values[k] > 1e-13 * top) {
      keep.push_back(k);
      sigma.push_back(std::sqrt(e.values[k]));
    }
  }
  const std::size_t r = keep.size();
  // Y = Q^{1/2} V S^{-1/2}, so row_ratio[i] = ||a_i Y||^2.
  Matrix y(n, r);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = 0.0;
    for (std::size_t c = 0; c < r; ++c) {
      const double v = e.vectors(j, keep[c]);
      diag += v * v * sigma[c];
      y(j, c) = sq[j] * v / std::sqrt(sigma[c]);
    }
    out.col_ratio[j] = q[j] > 0.0 ? diag / q[j] : 0.0;
  }
  std::vector<double> acc(r);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t u = rows_.start[i]; u < rows_.start[i + 1]; ++u) {
      const double x = rows_.value[u];
      const auto yr = y.row(rows_.index[u]);
      for (std::size_t c = 0; c < r; ++c) acc[c] += x * yr[c];
    }
    double s = 0.0;
    for (double v : acc) s += v * v;
    out.row_ratio[i] = s;
  }
  return out;
}

void balance(Factorization& f) {
  auto [rb, cc] = max_row_col_norms(f.b, f.c);
  if (rb == 0.0 || cc == 0.0) {
    f.upper = 0.0;
    return;
  }
  const double s = std::sqrt(cc / rb);
  f.b *= s;
  f.c *= 1.0 / s;
  std::tie(rb, cc) = max_row_col_norms(f.b, f.c);
  f.upper = rb * cc;
}

Factorization factor_at_weights(const Matrix& a, std::span<const double> p,
                                std::span<const double> q) {
  check_weights(a, p, q);
  const std::size_t m = a.rows(), n = a.cols();
  for (double x : p)
    if (x <= 0.0) throw std::invalid_argument("factor_at_weights: weights must be positive");
  for (double x : q)
    if (x <= 0.0) throw std::invalid_argument("factor_at_weights: weights must be positive");
  const auto sp = sqrt_all(p), sq = sqrt_all(q);
  const SpectralDecomposition s = svd(scale_rows_cols(a, sp, sq));
  Factorization f;
  const double smax = s.singular_values.empty() ? 0.0 : s.singular_values[0];
  if (smax == 0.0) {
    f.b = Matrix(m, 1);
    f.c = Matrix(1, n);
    return f;
  }
  const double cut = smax * 1e-15 * static_cast<double>(m + n);
  std::size_t r = 0;
  while (r < s.singular_values.size() && s.singular_values[r] > cut) ++r;

  // B = A Q^{1/2} V S^{-1/2}, C = S^{1/2} V^T Q^{-1/2}.
  Matrix w(n, r);
  f.c = Matrix(r, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < r; ++k) {
      const double root = std::sqrt(s.singular_values[k]);
      w(j, k) = sq[j] * s.right(j, k) / root;
      f.c(k, j) = root * s.right(j, k) / sq[j];
    }
  f.b = a * w;

  const Matrix residual = a - f.b * f.c;
  const double res = frobenius_norm(residual);
  if (res > 1e-13 * frobenius_norm(a)) {
    // A = [B, alpha R] [C; I / alpha] with alpha balancing the extra norms.
    auto [rb, cc] = max_row_col_norms(f.b, f.c);
    double rmax = 0.0;
    for (std::size_t i = 0; i < m; ++i) rmax = std::max(rmax, norm2(residual.row(i)));
    const double alpha = std::sqrt(rb / (rmax * std::max(cc, 1e-300)));
    f.b = hstack(f.b, residual * alpha);
    f.c = vstack(f.c, Matrix::identity(n) * (1.0 / alpha));
  }
  balance(f);
  return f;
}

Factorization factor_from_dual(const Matrix& a, const Matrix& d) {
  const std::size_t m = a.rows();
  if (d.rows() != m || !d.is_square()) throw std::invalid_argument("factor_from_dual: size mismatch");
  const SymmetricEigen e = symmetric_eigen(symmetrized(d));
  double top = std::max(0.0, e.values.back());
  if (top == 0.0) top = 1.0;
  const double lift = 1e-12 * top;
  Matrix root(m, m), inv_root(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    const double lambda = std::max(e.values[k], 0.0) + lift;
    const double s = std::sqrt(lambda);
    for (std::size_t i = 0; i < m; ++i) {
      const double vi = e.vectors(i, k);
      for (std::size_t j = 0; j < m; ++j) {
        const double vv = vi * e.vectors(j, k);
        root(i, j) += s * vv;
        inv_root(i, j) += vv / s;
      }
    }
  }
  Factorization f;
  f.b = std::move(root);
  f.c = inv_root * a;
  balance(f);
  return f;
}

Factorization factor_from_completion(const Matrix& a, const Matrix& x) {
  const std::size_t m = a.rows(), n = a.cols(), size = m + n;
  if (x.rows() != size || x.cols() != size)
    throw std::invalid_argument("factor_from_completion: size mismatch");
  Matrix e(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) e(i, j) = a(i, j) - 0.5 * (x(i, m + j) + x(m + j, i));
  const double d = max_abs(e) == 0.0 ? 0.0 : singular_values(e).front();
  Matrix fixed = symmetrized(x);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      fixed(i, m + j) = a(i, j);
      fixed(m + j, i) = a(i, j);
    }
  for (std::size_t i = 0; i < size; ++i) fixed(i, i) += d;
  const SymmetricEigen eig = symmetric_eigen(fixed);
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < size; ++k)
    if (eig.values[k] > 0.0) keep.push_back(k);
  Factorization f;
  f.b = Matrix(m, keep.size());
  f.c = Matrix(keep.size(), n);
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const double root = std::sqrt(eig.values[keep[c]]);
    for (std::size_t i = 0; i < m; ++i) f.b(i, c) = eig.vectors(i, keep[c]) * root;
    for (std::size_t j = 0; j < n; ++j) f.c(c, j) = eig.vectors(m + j, keep[c]) * root;
  }
  balance(f);
  return f;
}

Ellipsoid ellipsoid_from_factor(const Matrix& b, double upper) {
  return Ellipsoid::from_factor(b, upper);
}

PrimalResult finish_primal(const Matrix& a, Factorization f, const Gamma2Options& options) {
  PrimalResult out;
  balance(f);
  out.upper = f.upper;
  if (a.rows() <= options.ellipsoid_max_dim) out.ellipsoid = ellipsoid_from_factor(f.b, f.upper);
  out.factor_left = std::move(f.b);
  out.factor_right = std::move(f.c);
  return out;
}

std::vector<double> project_simplex(std::span<const double> v) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) total += out[i] = std::max(v[i] - theta, 0.0);
  if (!(total > 0.0)) {
    // Cancellation against a huge theta; fall back to the largest entries.
    std::fill(out.begin(), out.end(), 0.0);
    const double peak = u.front();
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == peak) total += out[i] = 1.0;
  }
  for (double& x : out) x /= total;
  return out;
}

bool past_deadline(const Gamma2Options& options) {
  return options.deadline && Clock::now() >= *options.deadline;
}

double trivial_upper(const Matrix& a) {
  double row = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) row = std::max(row, norm2(a.row(i)));
  double col = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) col = std::max(col, norm2(a.column(j)));
  return std::min(row, col);
}

}  // namespace detail
}  // namespace g2d
