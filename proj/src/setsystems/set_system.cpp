#include "g2d/set_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "g2d/error.hpp"
#include "g2d/matrix_io.hpp"

namespace g2d {

namespace {

std::string row_key(const Matrix& a, std::size_t i) {
  std::string key(a.cols(), '0');
  for (std::size_t j = 0; j < a.cols(); ++j)
    if (a(i, j) != 0.0) key[j] = '1';
  return key;
}

void check_entries(std::size_t rows, std::size_t cols, const SetSystemLimits& limits,
                   const char* who) {
  if (cols > limits.max_ground) {
    throw CapExceeded(std::string(who) + ": ground size " + std::to_string(cols) +
                      " exceeds cap " + std::to_string(limits.max_ground));
  }
  if (cols != 0 && rows > limits.max_entries / cols) {
    throw CapExceeded(std::string(who) + ": incidence would have " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " entries, cap " +
                      std::to_string(limits.max_entries));
  }
}

std::size_t checked_power(std::size_t base, int d, std::size_t cap, const char* who) {
  std::size_t out = 1;
  for (int k = 0; k < d; ++k) {
    if (base != 0 && out > cap / base) throw CapExceeded(std::string(who) + ": size overflow");
    out *= base;
  }
  return out;
}

}  // namespace

SetSystem::SetSystem(Matrix incidence, std::vector<std::string> labels)
    : incidence_(std::move(incidence)), labels_(std::move(labels)) {
  for (double x : incidence_.data())
    if (x != 0.0 && x != 1.0) throw std::invalid_argument("SetSystem: entries must be 0 or 1");
  if (!labels_.empty() && labels_.size() != incidence_.rows())
    throw std::invalid_argument("SetSystem: label count does not match set count");
}

SetSystem SetSystem::from_sets(std::size_t ground_size,
                               const std::vector<std::vector<std::size_t>>& sets,
                               std::vector<std::string> labels) {
  Matrix a(sets.size(), ground_size);
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t e : sets[i]) {
      if (e >= ground_size) throw std::invalid_argument("SetSystem: element out of range");
      a(i, e) = 1.0;
    }
  return SetSystem(std::move(a), std::move(labels));
}

std::vector<std::size_t> SetSystem::members(std::size_t set) const {
  std::vector<std::size_t> out;
  const auto row = incidence_.row(set);
  for (std::size_t j = 0; j < row.size(); ++j)
    if (row[j] != 0.0) out.push_back(j);
  return out;
}

std::string SetSystem::describe(std::size_t set) const {
  if (!labels_.empty()) return labels_[set];
  const auto m = members(set);
  return set_notation(m);
}

SetSystem SetSystem::deduplicated() const {
  std::unordered_set<std::string> seen;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < set_count(); ++i)
    if (seen.insert(row_key(incidence_, i)).second) keep.push_back(i);
  if (keep.size() == set_count()) return *this;
  std::vector<std::string> labels;
  if (!labels_.empty())
    for (std::size_t i : keep) labels.push_back(labels_[i]);
  return SetSystem(select_rows(incidence_, keep), std::move(labels));
}

bool SetSystem::has_duplicate_rows() const {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < set_count(); ++i)
    if (!seen.insert(row_key(incidence_, i)).second) return true;
  return false;
}

std::string set_notation(std::span<const std::size_t> members) {
  std::string s = "{";
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(members[k] + 1);
  }
  return s + "}";
}

SetSystem initial_segments(std::size_t n) {
  if (n == 0) throw std::invalid_argument("initial_segments: n must be >= 1");
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= n; ++i) labels.push_back("[1.." + std::to_string(i) + "]");
  Matrix t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) t(i, j) = 1.0;
  return SetSystem(std::move(t), std::move(labels));
}

SetSystem grid_anchored(int d, std::size_t n, const SetSystemLimits& limits) {
  if (d < 1 || n == 0) throw std::invalid_argument("grid_anchored: need d >= 1 and n >= 1");
  const std::size_t side = checked_power(n, d, limits.max_ground, "grid_anchored");
  check_entries(side, side, limits, "grid_anchored");
  SetSystem g = initial_segments(n);
  const SetSystem t = g;
  for (int k = 1; k < d; ++k) g = product(g, t, limits);
  return g;
}

SetSystem subcubes(int d, const SetSystemLimits& limits) {
  if (d < 1) throw std::invalid_argument("subcubes: d must be >= 1");
  const std::size_t ground = checked_power(2, d, limits.max_ground, "subcubes");
  const std::size_t rows = checked_power(3, d, limits.max_entries, "subcubes");
  check_entries(rows, ground, limits, "subcubes");
  const Matrix c1{{1, 1}, {1, 0}, {0, 1}};
  // Coordinate pattern per row: '*' free, '0' or '1' fixed.
  std::vector<std::string> labels{"*", "0", "1"};
  Matrix a = c1;
  for (int k = 1; k < d; ++k) {
    a = kron(a, c1, limits.max_entries);
    std::vector<std::string> next;
    for (const auto& l : labels)
      for (const char* c : {"*", "0", "1"}) next.push_back(l + c);
    labels = std::move(next);
  }
  return SetSystem(std::move(a), std::move(labels));
}

SetSystem arithmetic_progressions(std::size_t n, const SetSystemLimits& limits) {
  if (n == 0) throw std::invalid_argument("arithmetic_progressions: n must be >= 1");
  if (n > limits.max_ap_ground)
    throw CapExceeded("arithmetic_progressions: n exceeds cap " +
                      std::to_string(limits.max_ap_ground));
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::string> labels;
  std::unordered_set<std::string> seen;
  // Singletons once, then every (start, difference, length >= 2).
  for (std::size_t a = 0; a < n; ++a) {
    sets.push_back({a});
    labels.push_back("AP(a=" + std::to_string(a + 1) + ",k=1)");
  }
  for (std::size_t delta = 1; delta < n; ++delta)
    for (std::size_t a = 0; a + delta < n; ++a) {
      std::vector<std::size_t> s{a};
      for (std::size_t x = a + delta; x < n; x += delta) {
        s.push_back(x);
        sets.push_back(s);
        labels.push_back("AP(a=" + std::to_string(a + 1) + ",d=" + std::to_string(delta) +
                         ",k=" + std::to_string(s.size()) + ")");
      }
    }
  // A set with >= 2 elements fixes (a, delta, k), so these are already distinct.
  check_entries(sets.size(), n, limits, "arithmetic_progressions");
  return SetSystem::from_sets(n, sets, std::move(labels));
}

SetSystem k_permutations(const std::vector<std::vector<std::size_t>>& perms) {
  if (perms.empty()) throw std::invalid_argument("k_permutations: no permutations");
  const std::size_t n = perms.front().size();
  if (n == 0) throw std::invalid_argument("k_permutations: empty permutation");
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::string> labels;
  for (std::size_t p = 0; p < perms.size(); ++p) {
    const auto& pi = perms[p];
    if (pi.size() != n) throw std::invalid_argument("k_permutations: length mismatch");
    std::vector<bool> hit(n, false);
    for (std::size_t x : pi) {
      if (x >= n || hit[x]) throw std::invalid_argument("k_permutations: not a permutation");
      hit[x] = true;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      sets.emplace_back(pi.begin(), pi.begin() + static_cast<std::ptrdiff_t>(i));
      labels.push_back("pi" + std::to_string(p + 1) + "[1.." + std::to_string(i) + "]");
    }
  }
  return SetSystem::from_sets(n, sets, std::move(labels)).deduplicated();
}

SetSystem power_set(std::size_t n, const SetSystemLimits& limits) {
  if (n == 0) throw std::invalid_argument("power_set: n must be >= 1");
  if (n > limits.max_power_set_ground)
    throw CapExceeded("power_set: n exceeds cap " + std::to_string(limits.max_power_set_ground));
  const std::size_t rows = std::size_t{1} << n;
  check_entries(rows, n, limits, "power_set");
  Matrix a(rows, n);
  for (std::size_t mask = 0; mask < rows; ++mask)
    for (std::size_t j = 0; j < n; ++j)
      if (mask >> j & 1U) a(mask, j) = 1.0;
  return SetSystem(std::move(a));
}

SetSystem set_union(const SetSystem& f, const SetSystem& g) {
  if (f.ground_size() != g.ground_size())
    throw std::invalid_argument("set_union: ground sizes differ");
  std::vector<std::string> labels;
  if (f.has_labels() && g.has_labels()) {
    labels = f.labels();
    labels.insert(labels.end(), g.labels().begin(), g.labels().end());
  }
  return SetSystem(vstack(f.incidence(), g.incidence()), std::move(labels)).deduplicated();
}

SetSystem product(const SetSystem& f, const SetSystem& g, const SetSystemLimits& limits) {
  const std::size_t ground = f.ground_size() * g.ground_size();
  const std::size_t rows = f.set_count() * g.set_count();
  check_entries(rows, ground, limits, "product");
  std::vector<std::string> labels;
  if (f.has_labels() && g.has_labels())
    for (const auto& a : f.labels())
      for (const auto& b : g.labels()) labels.push_back(a + "x" + b);
  return SetSystem(kron(f.incidence(), g.incidence(), limits.max_entries), std::move(labels));
}

SetSystem restrict(const SetSystem& f, std::vector<std::size_t> ground) {
  if (ground.empty()) throw std::invalid_argument("restrict: empty ground subset");
  std::sort(ground.begin(), ground.end());
  if (std::adjacent_find(ground.begin(), ground.end()) != ground.end())
    throw std::invalid_argument("restrict: repeated element");
  if (ground.back() >= f.ground_size()) throw std::invalid_argument("restrict: element out of range");
  return SetSystem(select_columns(f.incidence(), ground), f.labels()).deduplicated();
}

std::size_t CanonicalInterval::end(std::size_t n) const {
  return std::min(n, (offset + 1) << level);
}

std::vector<CanonicalInterval> canonical_decomposition(std::size_t j, std::size_t n) {
  if (j < 1 || j > n) throw std::invalid_argument("canonical_decomposition: need 1 <= j <= n");
  std::vector<CanonicalInterval> out;
  std::size_t start = 0;
  for (int level = 63; level >= 0; --level) {
    const std::size_t block = std::size_t{1} << level;
    if (j & block) {
      out.push_back({start >> level, level});
      start += block;
    }
  }
  return out;
}

MaximalAps maximal_aps(std::size_t size, const SetSystemLimits& limits) {
  if (size == 0) throw std::invalid_argument("maximal_aps: size must be >= 1");
  if (size > limits.max_ap_ground)
    throw CapExceeded("maximal_aps: size exceeds cap " + std::to_string(limits.max_ap_ground));
  const double root = std::sqrt(static_cast<double>(size));
  std::vector<std::vector<std::size_t>> all, small, large;
  std::vector<std::string> all_labels, small_labels, large_labels;
  for (std::size_t delta = 1; delta <= size; ++delta)
    for (std::size_t r = 0; r < delta && r < size; ++r) {
      std::vector<std::size_t> s;
      for (std::size_t x = r; x < size; x += delta) s.push_back(x);
      const std::string label =
          "M(d=" + std::to_string(delta) + ",r=" + std::to_string(r + 1) + ")";
      all.push_back(s);
      all_labels.push_back(label);
      if (static_cast<double>(delta) <= root) {
        small.push_back(s);
        small_labels.push_back(label);
      } else {
        large.push_back(s);
        large_labels.push_back(label);
      }
    }
  MaximalAps out;
  out.all = SetSystem::from_sets(size, all, std::move(all_labels)).deduplicated();
  out.small = SetSystem::from_sets(size, small, std::move(small_labels)).deduplicated();
  out.large = SetSystem::from_sets(size, large, std::move(large_labels)).deduplicated();
  return out;
}

SetSystem parse_set_system(const std::string& text) {
  MatrixText parsed = parse_matrix_text(text);
  try {
    return SetSystem(std::move(parsed.matrix), std::move(parsed.labels));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("set system: ") + e.what());
  }
}

SetSystem read_set_system_file(const std::filesystem::path& path) {
  MatrixText parsed = read_matrix_file(path);
  try {
    return SetSystem(std::move(parsed.matrix), std::move(parsed.labels));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_set_system_file(const std::filesystem::path& path, const SetSystem& f) {
  write_matrix_file(path, f.incidence(), f.labels());
}

std::string format_set_system(const SetSystem& f) { return format_matrix(f.incidence(), f.labels()); }

}  // namespace g2d
