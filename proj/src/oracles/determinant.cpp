#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "g2d/error.hpp"
#include "g2d/linalg.hpp"
#include "g2d/oracles.hpp"
#include "g2d/parallel.hpp"

namespace g2d {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_mul(std::uint64_t x, std::uint64_t y) {
  if (x != 0 && y > kSaturated / x) return kSaturated;
  return x * y;
}

std::uint64_t saturating_add(std::uint64_t x, std::uint64_t y) { return y > kSaturated - x ? kSaturated : x + y; }

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // C(n, i) = C(n, i-1) (n-i+1) / i stays integral at every step.
  unsigned __int128 c = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(c);
}

// The combination of rank r (lexicographic order) of k elements from [0, n).
std::vector<std::size_t> unrank(std::size_t n, std::size_t k, std::uint64_t r) {
  std::vector<std::size_t> out;
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (;; ++next) {
      const std::uint64_t with = binomial(n - next - 1, k - slot - 1);
      if (r < with) break;
      r -= with;
    }
    out.push_back(next++);
  }
  return out;
}

bool advance(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t s = k; s-- > 0;) {
    if (c[s] < n - k + s) {
      ++c[s];
      for (std::size_t t = s + 1; t < k; ++t) c[t] = c[t - 1] + 1;
      return true;
    }
  }
  return false;
}

// Visits every k-combination of [0, n) split over `threads` rank ranges.
template <class Fn>
void for_each_combination(std::size_t n, std::size_t k, int threads, Fn&& fn) {
  const std::uint64_t total = binomial(n, k);
  const std::size_t tasks = threads > 1 ? std::min<std::uint64_t>(total, 4 * static_cast<std::uint64_t>(threads)) : 1;
  parallel_for(tasks, threads, [&](std::size_t t) {
    const std::uint64_t lo = total * t / tasks, hi = total * (t + 1) / tasks;
    if (lo == hi) return;
    std::vector<std::size_t> c = unrank(n, k, lo);
    for (std::uint64_t r = lo; r < hi; ++r) {
      fn(t, c);
      advance(c, n);
    }
  });
}

// Determinant of the k x k row-major buffer by partial-pivot LU; destroys it.
double det_in_place(std::vector<double>& b, std::size_t k) {
  double det = 1.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(b[r * k + c]) > std::abs(b[piv * k + c])) piv = r;
    if (b[piv * k + c] == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t j = 0; j < k; ++j) std::swap(b[c * k + j], b[piv * k + j]);
      det = -det;
    }
    const double d = b[c * k + c];
    det *= d;
    for (std::size_t r = c + 1; r < k; ++r) {
      const double f = b[r * k + c] / d;
      if (f == 0.0) continue;
      for (std::size_t j = c + 1; j < k; ++j) b[r * k + j] -= f * b[c * k + j];
    }
  }
  return det;
}

double root(double det, std::size_t k) {
  const double x = std::abs(det);
  if (k == 1) return x;
  if (k == 2) return std::sqrt(x);
  return std::pow(x, 1.0 / static_cast<double>(k));
}

void check_budget(std::uint64_t work, const OracleLimits& limits, const char* name) {
  if (work > limits.subset_budget)
    throw CapExceeded(std::string(name) + ": enumeration needs " + std::to_string(work) +
                      " subsets, budget is " + std::to_string(limits.subset_budget) + "; lower k_max");
}

// Indices picked by k steps of complete-pivot elimination on a copy of b:
// first = pivot rows, second = pivot columns, in pick order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> complete_pivots(Matrix b, std::size_t k) {
  std::vector<std::size_t> rows, cols;
  std::vector<bool> row_used(b.rows(), false), col_used(b.cols(), false);
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t pr = 0, pc = 0;
    double big = -1.0;
    for (std::size_t i = 0; i < b.rows(); ++i) {
      if (row_used[i]) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        if (!col_used[j] && std::abs(b(i, j)) > big) {
          big = std::abs(b(i, j));
          pr = i;
          pc = j;
        }
    }
    if (big < 0.0) break;
    rows.push_back(pr);
    cols.push_back(pc);
    row_used[pr] = col_used[pc] = true;
    if (big == 0.0) continue;
    for (std::size_t i = 0; i < b.rows(); ++i) {
      if (row_used[i]) continue;
      const double f = b(i, pc) / b(pr, pc);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(pr, j);
    }
  }
  return {rows, cols};
}

void check_weights(std::span<const double> w, std::size_t size, const char* what) {
  if (w.size() != size) throw std::invalid_argument(std::string("detlb_bucketing: ") + what + " has the wrong length");
  for (double x : w)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument(std::string("detlb_bucketing: ") + what + " must be nonnegative");
}

}  // namespace

std::uint64_t detlb_work(std::size_t m, std::size_t n, std::size_t k_max) {
  std::uint64_t total = 0;
  for (std::size_t k = 1; k <= std::min({k_max, m, n}); ++k)
    total = saturating_add(total, saturating_mul(binomial(m, k), binomial(n, k)));
  return total;
}

std::uint64_t detlb2_work(std::size_t n, std::size_t k_max) {
  std::uint64_t total = 0;
  for (std::size_t k = 1; k <= std::min(k_max, n); ++k) total = saturating_add(total, binomial(n, k));
  return total;
}

double detlb_exact(const Matrix& a, std::size_t k_max, int threads, const OracleLimits& limits) {
  if (!a.all_finite()) throw std::invalid_argument("detlb_exact: non-finite entries");
  const std::size_t m = a.rows(), n = a.cols();
  k_max = std::min({k_max, m, n});
  check_budget(detlb_work(m, n, k_max), limits, "detlb_exact");
  double best = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const std::size_t tasks = threads > 1 ? 4 * static_cast<std::size_t>(threads) : 1;
    std::vector<double> local(tasks, 0.0);
    for_each_combination(m, k, threads, [&](std::size_t t, const std::vector<std::size_t>& rows) {
      std::vector<double> buf(k * k);
      std::vector<std::size_t> cols(k);
      std::iota(cols.begin(), cols.end(), 0);
      do {
        for (std::size_t r = 0; r < k; ++r)
          for (std::size_t c = 0; c < k; ++c) buf[r * k + c] = a(rows[r], cols[c]);
        local[t] = std::max(local[t], root(det_in_place(buf, k), k));
      } while (advance(cols, n));
    });
    for (double v : local) best = std::max(best, v);
  }
  return best;
}

double detlb2_exact(const Matrix& a, std::size_t k_max, int threads, const OracleLimits& limits) {
  if (!a.all_finite()) throw std::invalid_argument("detlb2_exact: non-finite entries");
  const std::size_t m = a.rows(), n = a.cols();
  if (m == 0) return 0.0;
  k_max = std::min(k_max, n);
  check_budget(detlb2_work(n, k_max), limits, "detlb2_exact");
  const Matrix gram = a.transposed() * a;
  double best = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const std::size_t tasks = threads > 1 ? 4 * static_cast<std::size_t>(threads) : 1;
    std::vector<double> local(tasks, 0.0);
    const double scale = std::sqrt(static_cast<double>(k) / static_cast<double>(m));
    for_each_combination(n, k, threads, [&](std::size_t t, const std::vector<std::size_t>& cols) {
      std::vector<double> buf(k * k);
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) buf[r * k + c] = gram(cols[r], cols[c]);
      const double det = std::max(0.0, det_in_place(buf, k));
      local[t] = std::max(local[t], scale * std::sqrt(root(det, k)));
    });
    for (double v : local) best = std::max(best, v);
  }
  return best;
}

BucketingWitness detlb_bucketing(const Matrix& a, std::span<const double> p, std::span<const double> q) {
  const std::size_t m = a.rows(), n = a.cols();
  check_weights(p, m, "p");
  check_weights(q, n, "q");
  std::vector<double> sp(m), sq(n);
  for (std::size_t i = 0; i < m; ++i) sp[i] = std::sqrt(p[i]);
  for (std::size_t j = 0; j < n; ++j) sq[j] = std::sqrt(q[j]);
  const SpectralDecomposition s = svd(scale_rows_cols(a, sp, sq));
  const std::vector<double>& sigma = s.singular_values;
  if (sigma.empty() || !(sigma.front() > 0.0)) throw std::invalid_argument("detlb_bucketing: weighted matrix has rank 0");

  // Bucket b holds sigma in (sigma_1 / 2^(b+1), sigma_1 / 2^b].
  const double top = sigma.front();
  std::vector<double> sums;
  std::vector<std::vector<std::size_t>> members;
  double nuclear = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] <= 1e-12 * top) break;
    nuclear += sigma[i];
    const auto b = static_cast<std::size_t>(std::floor(std::log2(top / sigma[i])));
    if (b >= sums.size()) {
      sums.resize(b + 1, 0.0);
      members.resize(b + 1);
    }
    sums[b] += sigma[i];
    members[b].push_back(i);
  }
  const std::size_t chosen = static_cast<std::size_t>(std::max_element(sums.begin(), sums.end()) - sums.begin());
  const std::vector<std::size_t>& bucket = members[chosen];
  const std::size_t k = bucket.size();

  // Columns: complete pivoting on U_K^T P^(1/2) A.
  Matrix c(k, n);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t i = 0; i < m; ++i) {
      const double u = s.left(i, bucket[r]) * sp[i];
      if (u == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(r, j) += u * a(i, j);
    }
  std::vector<std::size_t> cols = complete_pivots(c, k).second;

  // Rows: complete pivoting on P^(1/2) A_J, and on A_J itself; any k x k
  // submatrix is a valid witness, so the larger determinant wins.
  const Matrix aj = select_columns(a, cols);
  std::vector<double> ones(k, 1.0);
  BucketingWitness out;
  out.k = k;
  out.bucket_low = top / std::ldexp(1.0, static_cast<int>(chosen) + 1);
  out.bucket_share = sums[chosen] / nuclear;
  for (const Matrix& d : {scale_rows_cols(aj, sp, ones), aj}) {
    std::vector<std::size_t> rows = complete_pivots(d, k).first;
    const double value = root(determinant(submatrix(a, rows, cols)), k);
    if (out.rows.empty() || value > out.value) {
      out.value = value;
      out.rows = rows;
    }
  }
  std::sort(out.rows.begin(), out.rows.end());
  out.cols = cols;
  std::sort(out.cols.begin(), out.cols.end());
  return out;
}

ComposedBound compose_bounds(CompositionKind kind, std::span<const ComposedPart> parts) {
  if (parts.empty()) throw std::invalid_argument("compose_bounds: no parts");
  for (const ComposedPart& part : parts)
    if (!(part.gamma2 > 0.0) || part.set_count == 0)
      throw std::invalid_argument("compose_bounds: values and set counts must be positive");
  ComposedBound out;
  switch (kind) {
    case CompositionKind::kUnion: {
      double squares = 0.0;
      for (const ComposedPart& part : parts) {
        squares += part.gamma2 * part.gamma2;
        out.set_count += part.set_count;
      }
      out.gamma2 = std::sqrt(squares);
      break;
    }
    case CompositionKind::kDisjointPieces:
    case CompositionKind::kProduct: {
      out.gamma2 = kind == CompositionKind::kProduct ? 1.0 : 0.0;
      std::uint64_t count = 1;
      for (const ComposedPart& part : parts) {
        if (kind == CompositionKind::kProduct) {
          out.gamma2 *= part.gamma2;
        } else {
          out.gamma2 += part.gamma2;
        }
        count = saturating_mul(count, part.set_count);
      }
      out.set_count = static_cast<std::size_t>(count);
      break;
    }
  }
  const double log_m = std::max(1.0, std::log2(static_cast<double>(out.set_count)));
  out.herdisc_lower_shape = out.gamma2 / log_m;
  out.herdisc_upper_shape = out.gamma2 * std::sqrt(log_m);
  return out;
}

}  // namespace g2d
