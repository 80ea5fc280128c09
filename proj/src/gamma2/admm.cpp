#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "g2d/linalg.hpp"
#include "internal.hpp"

namespace g2d::detail {

namespace {

// argmin_t  t + rho/2 * sum_i (min(v_i, t) - v_i)^2, i.e. the root of
// rho * sum_i (v_i - t)_+ = 1.
double water_fill(const std::vector<double>& v, double rho) {
  std::vector<double> s(v);
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumulative = 0.0, t = s.back();
  for (std::size_t j = 0; j < s.size(); ++j) {
    cumulative += s[j];
    t = (cumulative - 1.0 / rho) / static_cast<double>(j + 1);
    if (j + 1 == s.size() || t >= s[j + 1]) break;
  }
  return t;
}

// The affine-and-box constraint set of the semidefinite program, with the
// off-diagonal block pinned to A and the diagonal clamped at t.
void pin_blocks(Matrix& z, const Matrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      z(i, m + j) = a(i, j);
      z(m + j, i) = a(i, j);
    }
}

struct Weights {
  std::vector<double> p, q;
  bool ok = false;
};

// Positive parts of the multipliers on the diagonal constraints, normalised.
Weights weights_from_multipliers(const Matrix& u, std::size_t m, std::size_t n) {
  Weights w;
  w.p.resize(m);
  w.q.resize(n);
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) sp += w.p[i] = std::max(u(i, i), 0.0);
  for (std::size_t j = 0; j < n; ++j) sq += w.q[j] = std::max(u(m + j, m + j), 0.0);
  if (sp <= 0.0 || sq <= 0.0) return w;
  for (double& x : w.p) x /= sp;
  for (double& x : w.q) x /= sq;
  w.ok = true;
  return w;
}

}  // namespace

PrimalResult admm_upper(const Matrix& a, const Gamma2Options& options) {
  const std::size_t m = a.rows(), n = a.cols(), size = m + n;
  double rho = 8.0 / static_cast<double>(size);
  Matrix z(size, size), u(size, size);
  pin_blocks(z, a);
  for (std::size_t i = 0; i < size; ++i) z(i, i) = 1.0;

  Factorization best;
  best.upper = std::numeric_limits<double>::infinity();
  std::vector<double> low_p(m, 1.0 / static_cast<double>(m)), low_q(n, 1.0 / static_cast<double>(n));
  double best_lower = weighted_nuclear_norm(a, low_p, low_q);
  bool converged = false;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    const Matrix x = psd_project(symmetrized(z - u));
    Matrix w = x + u;
    std::vector<double> v = w.diagonal_entries();
    const double t = water_fill(v, rho);
    Matrix next = w;
    pin_blocks(next, a);
    for (std::size_t i = 0; i < size; ++i) next(i, i) = std::min(v[i], t);
    const double primal_res = frobenius_norm(x - next);
    const double dual_res = rho * frobenius_norm(next - z);
    z = std::move(next);
    u += x - z;

    if (it % 10 == 9) {
      if (primal_res > 10.0 * dual_res) {
        rho *= 2.0;
        u *= 0.5;
      } else if (dual_res > 10.0 * primal_res) {
        rho *= 0.5;
        u *= 2.0;
      }
    }
    if (it % 25 == 24 || it + 1 == options.max_iter || past_deadline(options)) {
      Factorization f = factor_from_completion(a, x);
      if (f.upper < best.upper) best = std::move(f);
      const Weights wts = weights_from_multipliers(u, m, n);
      if (wts.ok) {
        const double lower = weighted_nuclear_norm(a, wts.p, wts.q);
        if (lower > best_lower) {
          best_lower = lower;
          low_p = wts.p;
          low_q = wts.q;
        }
      }
      if (best.upper - best_lower <= options.tol * best.upper) {
        converged = true;
        ++it;
        break;
      }
      if (past_deadline(options)) {
        ++it;
        break;
      }
    }
  }
  if (!std::isfinite(best.upper)) {
    best.b = a;
    best.c = Matrix::identity(n);
  }
  PrimalResult out = finish_primal(a, std::move(best), options);
  out.weights_p = std::move(low_p);
  out.weights_q = std::move(low_q);
  out.weights_lower = best_lower;
  out.iterations = it;
  out.converged = converged || out.upper - best_lower <= options.tol * out.upper;
  return out;
}

PrimalResult dykstra_upper(const Matrix& a, const Gamma2Options& options) {
  const std::size_t m = a.rows(), n = a.cols(), size = m + n;
  const double anorm = frobenius_norm(a);
  std::vector<double> up(m, 1.0 / static_cast<double>(m)), uq(n, 1.0 / static_cast<double>(n));
  double lo = weighted_nuclear_norm(a, up, uq);

  // Start from the better trivial factorization.
  Factorization best;
  double row = 0.0, col = 0.0;
  for (std::size_t i = 0; i < m; ++i) row = std::max(row, norm2(a.row(i)));
  for (std::size_t j = 0; j < n; ++j) col = std::max(col, norm2(a.column(j)));
  if (row <= col) {
    best.b = a;
    best.c = Matrix::identity(n);
  } else {
    best.b = Matrix::identity(m);
    best.c = a;
  }
  balance(best);
  double hi = best.upper;

  int total = 0;
  while (hi - lo > options.tol * hi && !past_deadline(options)) {
    const double t = 0.5 * (lo + hi);
    Matrix x(size, size), p(size, size), q(size, size);
    pin_blocks(x, a);
    for (std::size_t i = 0; i < size; ++i) x(i, i) = t;
    bool feasible = false;
    for (int k = 0; k < options.max_iter && !feasible; ++k, ++total) {
      const Matrix y = psd_project(symmetrized(x + p));
      p = x + p - y;
      Matrix next = y + q;
      pin_blocks(next, a);
      for (std::size_t i = 0; i < size; ++i) next(i, i) = std::min(next(i, i), t);
      q = y + q - next;
      x = std::move(next);
      const bool close = frobenius_norm(y - x) < 1e-7 * anorm;
      if (close || k % 10 == 9) {
        Factorization f = factor_from_completion(a, y);
        if (f.upper <= t * (1.0 + options.tol / 2.0) || close) {
          if (f.upper < best.upper) best = std::move(f);
          feasible = true;
        }
      }
      if (past_deadline(options)) break;
    }
    // A probe that converges by distance alone shrinks the bracket even when
    // its certificate is looser than t; the reported bound stays certified.
    if (feasible) {
      hi = std::min(t, best.upper);
    } else {
      lo = t;
    }
  }
  PrimalResult out = finish_primal(a, std::move(best), options);
  out.weights_p = std::move(up);
  out.weights_q = std::move(uq);
  out.weights_lower = weighted_nuclear_norm(a, out.weights_p, out.weights_q);
  out.iterations = total;
  out.converged = out.upper - out.weights_lower <= options.tol * out.upper;
  return out;
}

}  // namespace g2d::detail
