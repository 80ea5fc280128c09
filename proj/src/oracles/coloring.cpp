#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "g2d/error.hpp"
#include "g2d/oracles.hpp"
#include "g2d/parallel.hpp"

namespace g2d {

namespace {

void check_matrix(const Matrix& a, std::size_t cap, const char* name) {
  if (!a.all_finite()) throw std::invalid_argument(std::string(name) + ": non-finite entries");
  if (a.cols() > cap)
    throw CapExceeded(std::string(name) + ": " + std::to_string(a.cols()) + " columns exceeds the cap of " +
                      std::to_string(cap));
}

// Depth-first search over colorings in lexicographic order with x_0 = +1.
class DiscSearch {
 public:
  explicit DiscSearch(const Matrix& a) : a_(a), m_(a.rows()), n_(a.cols()) {
    // tail_[j * m + i] = sum_{j' >= j} |a_ij'|
    tail_.assign((n_ + 1) * m_, 0.0);
    for (std::size_t j = n_; j-- > 0;)
      for (std::size_t i = 0; i < m_; ++i) tail_[j * m_ + i] = tail_[(j + 1) * m_ + i] + std::abs(a(i, j));
  }

  // Searches colorings whose positions [1, 1 + prefix.size()) are fixed.
  // Stops once the best value is <= stop_at.
  void run(const std::vector<int>& prefix, double stop_at) {
    stop_at_ = stop_at;
    best_ = std::numeric_limits<double>::infinity();
    x_.assign(n_, 1);
    sums_.assign(m_, 0.0);
    done_ = false;
    std::size_t depth = 0;
    for (std::size_t j = 0; j < n_ && j < 1 + prefix.size(); ++j) {
      x_[j] = j == 0 ? 1 : prefix[j - 1];
      for (std::size_t i = 0; i < m_; ++i) sums_[i] += x_[j] * a_(i, j);
      depth = j + 1;
    }
    if (n_ == 0) {
      best_ = 0.0;
      best_x_.clear();
      return;
    }
    descend(depth);
  }

  double best() const { return best_; }
  const std::vector<int>& best_coloring() const { return best_x_; }

 private:
  void descend(std::size_t j) {
    if (done_) return;
    double bound = 0.0;
    for (std::size_t i = 0; i < m_; ++i) bound = std::max(bound, std::abs(sums_[i]) - tail_[j * m_ + i]);
    if (bound >= best_) return;
    if (j == n_) {
      double value = 0.0;
      for (double s : sums_) value = std::max(value, std::abs(s));
      best_ = value;
      best_x_ = x_;
      if (best_ <= stop_at_) done_ = true;
      return;
    }
    for (int sign : {-1, 1}) {
      x_[j] = sign;
      for (std::size_t i = 0; i < m_; ++i) sums_[i] += sign * a_(i, j);
      descend(j + 1);
      for (std::size_t i = 0; i < m_; ++i) sums_[i] -= sign * a_(i, j);
      if (done_) return;
    }
  }

  const Matrix& a_;
  std::size_t m_, n_;
  std::vector<double> tail_, sums_;
  std::vector<int> x_, best_x_;
  double best_ = 0.0, stop_at_ = -1.0;
  bool done_ = false;
};

struct Partial {
  double value = std::numeric_limits<double>::infinity();
  std::vector<int> coloring;
};

// Splits on the first few free positions so each task covers a contiguous
// lexicographic range; reducing in task order keeps the tie-break.
Partial disc_search(const Matrix& a, int threads, double stop_at) {
  const std::size_t n = a.cols();
  std::size_t bits = 0;
  if (threads > 1)
    while (bits + 2 < n && (std::size_t{1} << bits) < 4 * static_cast<std::size_t>(threads)) ++bits;
  const std::size_t tasks = std::size_t{1} << bits;
  std::vector<Partial> parts(tasks);
  parallel_for(tasks, threads, [&](std::size_t t) {
    std::vector<int> prefix(bits);
    for (std::size_t b = 0; b < bits; ++b) prefix[b] = (t >> (bits - 1 - b)) & 1 ? 1 : -1;
    DiscSearch search(a);
    search.run(prefix, stop_at);
    parts[t].value = search.best();
    parts[t].coloring = search.best_coloring();
  });
  Partial out;
  for (auto& p : parts)
    if (p.value < out.value) out = std::move(p);
  return out;
}

std::vector<double> normalised_weights(std::span<const double> w, std::size_t m) {
  if (w.empty()) return {};
  if (w.size() != m) throw std::invalid_argument("disc_p: weight count must equal the number of rows");
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("disc_p: weights must be finite and nonnegative");
    total += x;
  }
  if (total <= 0.0) throw std::invalid_argument("disc_p: weight vector is identically zero");
  std::vector<double> out(w.begin(), w.end());
  for (double& x : out) x *= static_cast<double>(m) / total;
  return out;
}

double power(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

}  // namespace

double coloring_value(const Matrix& a, std::span<const int> x, double p, std::span<const double> weights) {
  if (x.size() != a.cols()) throw std::invalid_argument("coloring_value: coloring length mismatch");
  const std::vector<double> w = normalised_weights(weights, a.rows());
  double out = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += x[j] * a(i, j);
    if (std::isinf(p)) {
      if (w.empty() || w[i] > 0.0) out = std::max(out, std::abs(s));
    } else {
      out += (w.empty() ? 1.0 : w[i]) * power(std::abs(s), p);
    }
  }
  if (std::isinf(p) || a.rows() == 0) return out;
  return std::pow(out / static_cast<double>(a.rows()), 1.0 / p);
}

ColoringResult disc_exact(const Matrix& a, int threads, const OracleLimits& limits) {
  check_matrix(a, limits.max_disc_cols, "disc_exact");
  Partial best = disc_search(a, threads, 0.0);
  ColoringResult out;
  out.coloring = std::move(best.coloring);
  out.value = coloring_value(a, out.coloring);
  return out;
}

double herdisc_exact(const Matrix& a, int threads, const OracleLimits& limits) {
  check_matrix(a, limits.max_herdisc_cols, "herdisc_exact");
  const std::size_t n = a.cols();
  if (n == 0 || a.rows() == 0) return 0.0;
  // Larger subsets first: they tend to set a high bar that cuts the
  // searches on their subsets short.
  std::vector<std::uint32_t> subsets;
  subsets.reserve((std::size_t{1} << n) - 1);
  for (std::uint32_t s = 1; s < (std::uint32_t{1} << n); ++s) subsets.push_back(s);
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](std::uint32_t x, std::uint32_t y) { return std::popcount(x) > std::popcount(y); });
  std::atomic<double> high{0.0};
  parallel_for(subsets.size(), threads, [&](std::size_t k) {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n; ++j)
      if (subsets[k] >> j & 1) cols.push_back(j);
    const Matrix sub = select_columns(a, cols);
    DiscSearch search(sub);
    // Anything at or below the current maximum cannot raise it.
    search.run({}, high.load());
    const double value = search.best();
    double seen = high.load();
    while (value > seen && !high.compare_exchange_weak(seen, value)) {
    }
  });
  return high.load();
}

ColoringResult disc_p_exact(const Matrix& a, double p, std::span<const double> weights, int threads,
                            const OracleLimits& limits) {
  if (!(p >= 1.0)) throw std::invalid_argument("disc_p: p must be >= 1");
  check_matrix(a, limits.max_discp_cols, "disc_p_exact");
  const std::size_t m = a.rows(), n = a.cols();
  const std::vector<double> w = normalised_weights(weights, m);
  ColoringResult out;
  out.p = p;
  out.weights = w;
  out.norm_kind = w.empty() ? NormKind::kLp : NormKind::kWeightedLp;
  if (n == 0) {
    out.value = 0.0;
    return out;
  }

  if (std::isinf(p)) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m; ++i)
      if (w.empty() || w[i] > 0.0) rows.push_back(i);
    out.coloring = disc_search(select_rows(a, rows), threads, 0.0).coloring;
    out.value = coloring_value(a, out.coloring, p, weights);
    return out;
  }

  // Gray code over positions 1..n-1; bit b of the code is position n-1-b
  // with 1 meaning +1, so comparing codes compares colorings
  // lexicographically.
  const std::size_t free = n - 1;
  const std::uint64_t total = std::uint64_t{1} << free;
  const std::size_t tasks = threads > 1 ? std::min<std::uint64_t>(total, 4 * static_cast<std::uint64_t>(threads)) : 1;
  struct Best {
    double value = std::numeric_limits<double>::infinity();
    std::uint64_t code = 0;
  };
  std::vector<Best> bests(tasks);
  parallel_for(tasks, threads, [&](std::size_t t) {
    const std::uint64_t lo = total * t / tasks, hi = total * (t + 1) / tasks;
    std::vector<double> y(m);
    auto rebuild = [&](std::uint64_t code) {
      for (std::size_t i = 0; i < m; ++i) {
        double s = a(i, 0);
        for (std::size_t b = 0; b < free; ++b) s += (code >> b & 1 ? 1.0 : -1.0) * a(i, free - b);
        y[i] = s;
      }
    };
    Best& best = bests[t];
    std::uint64_t code = lo ^ (lo >> 1);
    rebuild(code);
    for (std::uint64_t k = lo; k < hi; ++k) {
      if (k != lo) {
        const int b = std::countr_zero(k);
        code ^= std::uint64_t{1} << b;
        if ((k & 0xFFF) == 0) {
          rebuild(code);
        } else {
          const double sign = code >> b & 1 ? 2.0 : -2.0;
          const std::size_t j = free - static_cast<std::size_t>(b);
          for (std::size_t i = 0; i < m; ++i) y[i] += sign * a(i, j);
        }
      }
      double f = 0.0;
      for (std::size_t i = 0; i < m; ++i) f += (w.empty() ? 1.0 : w[i]) * power(std::abs(y[i]), p);
      if (f < best.value || (f == best.value && code < best.code)) {
        best.value = f;
        best.code = code;
      }
    }
  });
  Best best;
  for (const Best& b : bests)
    if (b.value < best.value || (b.value == best.value && b.code < best.code)) best = b;
  out.coloring.assign(n, 1);
  for (std::size_t b = 0; b < free; ++b) out.coloring[free - b] = best.code >> b & 1 ? 1 : -1;
  out.value = coloring_value(a, out.coloring, p, weights);
  return out;
}

}  // namespace g2d
