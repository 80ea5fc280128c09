#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "g2d/matrix.hpp"

namespace g2d {

struct OracleLimits {
  std::size_t max_disc_cols = 26;
  std::size_t max_herdisc_cols = 16;
  std::size_t max_discp_cols = 24;
  // Submatrices (detlb) or column subsets (detlb2) examined.
  std::uint64_t subset_budget = 10'000'000;
};

enum class NormKind { kInfinity, kLp, kWeightedLp };

struct ColoringResult {
  double value = 0.0;
  std::vector<int> coloring;  // entries in {-1, +1}, coloring[0] = +1
  NormKind norm_kind = NormKind::kInfinity;
  double p = std::numeric_limits<double>::infinity();
  std::vector<double> weights;  // normalised to sum to m; empty unless weighted
};

// Objective of a coloring, recomputed from scratch:
// infinity norm: max_i |(Ax)_i|;
// L_p: (1/m sum_i w_i |(Ax)_i|^p)^(1/p) with w == 1 when weights are empty.
double coloring_value(const Matrix& a, std::span<const int> x, double p = std::numeric_limits<double>::infinity(),
                      std::span<const double> weights = {});

// min over x in {-1,+1}^n of ||Ax||_inf by depth-first search with
// partial-sum pruning. Ties go to the lexicographically smallest coloring
// (-1 before +1) with x_1 = +1. Throws CapExceeded above the column cap.
ColoringResult disc_exact(const Matrix& a, int threads = 1, const OracleLimits& limits = {});

// Max of disc over nonempty column subsets.
double herdisc_exact(const Matrix& a, int threads = 1, const OracleLimits& limits = {});

// Weighted combinatorial L_p discrepancy by Gray-code enumeration. Weights
// (one per row) are rescaled to sum to m; an empty span means w == 1.
// p = infinity reduces to disc_exact on the rows of positive weight.
ColoringResult disc_p_exact(const Matrix& a, double p, std::span<const double> weights = {},
                            int threads = 1, const OracleLimits& limits = {});

// sum_{k <= k_max} C(m,k) C(n,k), saturating.
std::uint64_t detlb_work(std::size_t m, std::size_t n, std::size_t k_max);
// sum_{k <= k_max} C(n,k), saturating.
std::uint64_t detlb2_work(std::size_t n, std::size_t k_max);

// max over k <= k_max and k x k submatrices B of |det B|^(1/k).
// k_max is clipped to min(m, n). Throws CapExceeded if detlb_work exceeds
// the budget.
double detlb_exact(const Matrix& a, std::size_t k_max, int threads = 1, const OracleLimits& limits = {});

// max over column sets J, 0 < |J| <= k_max, of sqrt(|J|/m) |det A_J^T A_J|^(1/2|J|).
double detlb2_exact(const Matrix& a, std::size_t k_max, int threads = 1, const OracleLimits& limits = {});

struct BucketingWitness {
  double value = 0.0;  // |det A_{I,J}|^(1/k)
  std::size_t k = 0;
  std::vector<std::size_t> rows, cols;  // sorted
  double bucket_low = 0.0;              // bucket is (bucket_low, 2 bucket_low]
  double bucket_share = 0.0;            // sum of sigma in bucket / nuclear norm
};

// Witness extraction from dual weights: singular values of
// diag(p)^(1/2) A diag(q)^(1/2) are bucketed by powers of two, the bucket
// with the largest sum fixes k, and complete-pivot elimination picks the k
// columns and then the k rows. Throws std::invalid_argument on rank 0.
BucketingWitness detlb_bucketing(const Matrix& a, std::span<const double> p, std::span<const double> q);

enum class CompositionKind { kUnion, kDisjointPieces, kProduct };

struct ComposedPart {
  double gamma2 = 0.0;
  std::size_t set_count = 0;
};

struct ComposedBound {
  double gamma2 = 0.0;     // composed gamma2 bound
  std::size_t set_count = 0;  // sum for unions, product otherwise (an upper bound)
  // Translation to herdisc up to the unspecified absolute constants:
  // gamma2 / log2(m) and gamma2 * sqrt(log2 m), with log2 floored at 1.
  double herdisc_lower_shape = 0.0;
  double herdisc_upper_shape = 0.0;
};

ComposedBound compose_bounds(CompositionKind kind, std::span<const ComposedPart> parts);

struct NamedValue {
  std::string name;
  double value = 0.0;
};

struct BoundsReport {
  std::pair<double, double> gamma2_interval{0.0, 0.0};
  double detlb = 0.0;
  bool detlb_is_exact = false;  // false: bucketing witness
  std::optional<double> detlb2;
  double nuclear_uniform = 0.0;
  std::optional<double> disc_exact;
  std::optional<double> herdisc_exact;
  std::vector<NamedValue> ratios;
  std::vector<std::string> failures;  // violated constant-free inequalities
  std::vector<std::string> skipped;   // columns refused by caps
};

}  // namespace g2d
