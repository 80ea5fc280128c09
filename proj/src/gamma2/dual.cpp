#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "g2d/parallel.hpp"
#include "internal.hpp"

namespace g2d::detail {

namespace {

struct Candidate {
  double value = -1.0;  // Gram estimate during ascent, exact afterwards
  std::vector<double> p, q;
};

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t size) {
  std::exponential_distribution<double> draw(1.0);
  std::vector<double> w(size);
  double total = 0.0;
  for (double& x : w) total += x = draw(rng);
  for (double& x : w) x /= total;
  return w;
}

// Spread of g around its mean; spreads at rounding level read as zero.
double centered_max(const std::vector<double>& g) {
  const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
  double out = 0.0, top = 0.0;
  for (double x : g) {
    out = std::max(out, std::abs(x - mean));
    top = std::max(top, std::abs(x));
  }
  return out <= 1e-12 * top ? 0.0 : out;
}

// Projected subgradient ascent with steps c / sqrt(k), normalised by the
// largest centred gradient entry times the larger dimension.
Candidate ascend(const WeightedEvaluator& evaluate, std::vector<double> p, std::vector<double> q,
                 const Gamma2Options& options) {
  Candidate best;
  const double scale = static_cast<double>(std::max(p.size(), q.size()));
  for (int k = 1; k <= std::max(1, options.dual_iter); ++k) {
    const WeightedSpectrum s = evaluate(p, q);
    if (s.nuclear > best.value) {
      best.value = s.nuclear;
      best.p = p;
      best.q = q;
    }
    if (k == options.dual_iter || past_deadline(options)) break;
    std::vector<double> gp(p.size()), gq(q.size());
    for (std::size_t i = 0; i < p.size(); ++i) gp[i] = 0.5 * s.row_ratio[i];
    for (std::size_t j = 0; j < q.size(); ++j) gq[j] = 0.5 * s.col_ratio[j];
    const double norm = std::max(centered_max(gp), centered_max(gq)) * scale;
    if (!(norm > 0.0)) break;
    const double step = options.dual_step / std::sqrt(static_cast<double>(k)) / norm;
    for (std::size_t i = 0; i < p.size(); ++i) gp[i] = p[i] + step * gp[i];
    for (std::size_t j = 0; j < q.size(); ++j) gq[j] = q[j] + step * gq[j];
    p = project_simplex(gp);
    q = project_simplex(gq);
  }
  return best;
}

}  // namespace

DualResult dual_ascent(const Matrix& a, const Gamma2Options& options, std::span<const double> seed_p,
                       std::span<const double> seed_q, double stop_upper) {
  const std::size_t m = a.rows(), n = a.cols();
  DualResult out;
  out.p.assign(m, 1.0 / static_cast<double>(m));
  out.q.assign(n, 1.0 / static_cast<double>(n));
  if (max_abs(a) == 0.0) return out;
  const WeightedEvaluator evaluate(a);

  auto exact = [&](Candidate& c) { c.value = weighted_nuclear_norm(a, c.p, c.q); };
  auto adopt = [&](const Candidate& c, int index) {
    if (c.value > out.lower) {
      out.lower = c.value;
      out.p = c.p;
      out.q = c.q;
      out.best_restart = index;
    }
  };
  auto done = [&] {
    return out.lower >= stop_upper * (1.0 - options.tol) || past_deadline(options);
  };

  if (seed_p.size() == m && seed_q.size() == n) {
    Candidate start{0.0, project_simplex(seed_p), project_simplex(seed_q)};
    exact(start);
    adopt(start, -1);
    if (done()) return out;
    Candidate c = ascend(evaluate, start.p, start.q, options);
    exact(c);
    adopt(c, -1);
    if (done()) return out;
  }

  const int total = 1 + std::max(0, options.restarts);
  std::vector<Candidate> results(static_cast<std::size_t>(total));
  parallel_for(results.size(), options.threads, [&](std::size_t k) {
    std::vector<double> p(m, 1.0 / static_cast<double>(m)), q(n, 1.0 / static_cast<double>(n));
    if (k > 0) {
      std::mt19937_64 rng(options.seed * 0x9E3779B97F4A7C15ULL + k);
      p = dirichlet(rng, m);
      q = dirichlet(rng, n);
    }
    results[k] = ascend(evaluate, std::move(p), std::move(q), options);
    exact(results[k]);
  });
  for (std::size_t k = 0; k < results.size(); ++k) adopt(results[k], static_cast<int>(k));
  return out;
}

}  // namespace g2d::detail

namespace g2d {

DualResult gamma2_lower_dual(const Matrix& a, const Gamma2Options& options,
                             std::span<const double> seed_p, std::span<const double> seed_q) {
  if (a.empty()) throw std::invalid_argument("gamma2_lower_dual: empty matrix");
  if (options.restarts < 0) throw std::invalid_argument("gamma2_lower_dual: restarts must be >= 0");
  return detail::dual_ascent(a, options, seed_p, seed_q, std::numeric_limits<double>::infinity());
}

}  // namespace g2d
