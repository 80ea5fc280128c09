#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "internal.hpp"

namespace g2d::detail {

namespace {

std::vector<double> start_weights(std::span<const double> given, std::size_t size) {
  std::vector<double> w(size, 1.0 / static_cast<double>(size));
  if (given.size() == size) {
    const double total = std::accumulate(given.begin(), given.end(), 0.0);
    if (total > 0.0)
      for (std::size_t i = 0; i < size; ++i) w[i] = std::max(given[i], 0.0) / total;
  }
  return w;
}

// Over-relaxation exponent. The plain update (1) is slow on degenerate
// systems such as progressions; above 2 it starts to oscillate.
constexpr double kOmega = 1.8;

// w_i <- max(w_i * (ratio_i / nuclear)^omega, floor), renormalised.
void rescale(std::vector<double>& w, const std::vector<double>& ratio, double nuclear) {
  const double floor = 1e-12 / static_cast<double>(w.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::max(w[i] * std::pow(ratio[i] / nuclear, kOmega), floor);
    total += w[i];
  }
  for (double& x : w) x /= total;
}

}  // namespace

// Fixed point of p_i = ((A~ A~^T)^{1/2})_ii / ||A~||_*, and likewise for q.
// Any positive (p, q) gives the factorization B = P^{-1/2} U S^{1/2},
// C = S^{1/2} V^T Q^{-1/2}; at the fixed point its norm product meets the
// weighted nuclear norm, closing the duality gap.
PrimalResult scaling_upper(const Matrix& a, const Gamma2Options& options,
                           std::span<const double> p0, std::span<const double> q0) {
  const std::size_t m = a.rows(), n = a.cols();
  const WeightedEvaluator evaluate(a);
  std::vector<double> p = start_weights(p0, m), q = start_weights(q0, n);
  std::vector<double> best_p = p, best_q = q, low_p = p, low_q = q;
  double best_upper = std::numeric_limits<double>::infinity(), best_lower = 0.0;
  const double inner_tol = options.tol / 4.0;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    const WeightedSpectrum s = evaluate(p, q);
    if (s.nuclear <= 0.0) break;
    const double rmax = *std::max_element(s.row_ratio.begin(), s.row_ratio.end());
    const double cmax = *std::max_element(s.col_ratio.begin(), s.col_ratio.end());
    const double upper = std::sqrt(rmax * cmax);
    if (upper < best_upper) {
      best_upper = upper;
      best_p = p;
      best_q = q;
    }
    if (s.nuclear > best_lower) {
      best_lower = s.nuclear;
      low_p = p;
      low_q = q;
    }
    if (best_upper - best_lower <= inner_tol * best_upper || past_deadline(options)) {
      ++it;
      break;
    }
    rescale(p, s.row_ratio, s.nuclear);
    rescale(q, s.col_ratio, s.nuclear);
  }

  PrimalResult out = finish_primal(a, factor_at_weights(a, best_p, best_q), options);
  out.weights_p = std::move(low_p);
  out.weights_q = std::move(low_q);
  out.weights_lower = weighted_nuclear_norm(a, out.weights_p, out.weights_q);
  out.iterations = it;
  out.converged = out.upper - out.weights_lower <= options.tol * out.upper;
  return out;
}

}  // namespace g2d::detail
