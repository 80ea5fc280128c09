#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "g2d/linalg.hpp"
#include "g2d/matrix.hpp"

namespace g2d {

// Size limits for constructors. Violations throw CapExceeded.
struct SetSystemLimits {
  std::size_t max_ground = 4096;
  std::size_t max_entries = kDefaultElementCap;
  std::size_t max_ap_ground = 128;
  std::size_t max_power_set_ground = 20;
};

// A set system over the ground set {0, ..., ground_size()-1}. Row i of the
// incidence matrix is the indicator of set i. Labels, when present, use
// 1-based element names as in the usual [n] convention.
class SetSystem {
 public:
  SetSystem() = default;
  // Throws std::invalid_argument unless every entry is 0 or 1 and the label
  // count matches the row count (or is zero).
  explicit SetSystem(Matrix incidence, std::vector<std::string> labels = {});

  // Sets given as 0-based element lists.
  static SetSystem from_sets(std::size_t ground_size,
                             const std::vector<std::vector<std::size_t>>& sets,
                             std::vector<std::string> labels = {});

  const Matrix& incidence() const { return incidence_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool has_labels() const { return !labels_.empty(); }
  std::size_t ground_size() const { return incidence_.cols(); }
  std::size_t set_count() const { return incidence_.rows(); }
  std::vector<std::size_t> members(std::size_t set) const;
  // Label of a set, or its member list "{1,3}" when unlabeled.
  std::string describe(std::size_t set) const;

  // First occurrence of each distinct row survives, labels follow.
  SetSystem deduplicated() const;
  bool has_duplicate_rows() const;

  friend bool operator==(const SetSystem&, const SetSystem&) = default;

 private:
  Matrix incidence_;
  std::vector<std::string> labels_;
};

// "{1,3,4}" with 1-based names.
std::string set_notation(std::span<const std::size_t> members);

SetSystem initial_segments(std::size_t n);
// Anchored boxes on [n]^d; incidence is the d-fold Kronecker power of T_n,
// points ordered row-major lexicographically.
SetSystem grid_anchored(int d, std::size_t n, const SetSystemLimits& limits = {});
// Subcubes of {0,1}^d; incidence is the d-fold power of [[1,1],[1,0],[0,1]].
SetSystem subcubes(int d, const SetSystemLimits& limits = {});
// All distinct arithmetic progressions in [n], singletons included.
SetSystem arithmetic_progressions(std::size_t n, const SetSystemLimits& limits = {});
// Nonempty prefixes of each permutation (0-based images), deduplicated.
SetSystem k_permutations(const std::vector<std::vector<std::size_t>>& perms);
// All 2^n subsets, empty set first, in binary counting order.
SetSystem power_set(std::size_t n, const SetSystemLimits& limits = {});

SetSystem set_union(const SetSystem& f, const SetSystem& g);
SetSystem product(const SetSystem& f, const SetSystem& g, const SetSystemLimits& limits = {});
// Columns in `ground` (0-based, strictly increasing after sorting, no repeats),
// rows deduplicated.
SetSystem restrict(const SetSystem& f, std::vector<std::size_t> ground);

// Dyadic block [offset * 2^level, (offset+1) * 2^level) clipped to [0, n).
struct CanonicalInterval {
  std::size_t offset = 0;
  int level = 0;
  std::size_t begin() const { return offset << level; }
  std::size_t end(std::size_t n) const;
  std::size_t size(std::size_t n) const { return end(n) - begin(); }
  friend bool operator==(const CanonicalInterval&, const CanonicalInterval&) = default;
};

// Splits the initial interval [0, j) along the binary expansion of j,
// largest block first. Requires 1 <= j <= n.
std::vector<CanonicalInterval> canonical_decomposition(std::size_t j, std::size_t n);

// Inclusion-maximal arithmetic progressions in [size]: one per difference
// delta in 1..size and residue class. `small` holds delta <= sqrt(size),
// `large` the rest; each view is deduplicated on its own.
struct MaximalAps {
  SetSystem all;
  SetSystem small;
  SetSystem large;
};
MaximalAps maximal_aps(std::size_t size, const SetSystemLimits& limits = {});

// Matrix text format with an optional "# labels:" block.
SetSystem parse_set_system(const std::string& text);
SetSystem read_set_system_file(const std::filesystem::path& path);
void write_set_system_file(const std::filesystem::path& path, const SetSystem& f);
std::string format_set_system(const SetSystem& f);

}  // namespace g2d
