#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "g2d/error.hpp"
#include "g2d/set_system.hpp"
#include "g2d/spectra.hpp"

namespace g2d {
namespace {

using Sets = std::set<std::vector<std::size_t>>;

Sets as_sets(const SetSystem& f) {
  Sets out;
  for (std::size_t i = 0; i < f.set_count(); ++i) out.insert(f.members(i));
  return out;
}

int floor_log2(std::size_t n) {
  int k = 0;
  while ((n >> (k + 1)) != 0) ++k;
  return k;
}

TEST(InitialSegmentsTest, SmallCases) {
  EXPECT_EQ(initial_segments(1).incidence(), (Matrix{{1}}));
  EXPECT_EQ(initial_segments(3).incidence(), (Matrix{{1, 0, 0}, {1, 1, 0}, {1, 1, 1}}));
  EXPECT_EQ(initial_segments(3).describe(1), "[1..2]");
  EXPECT_THROW(initial_segments(0), std::invalid_argument);
}

TEST(GridTest, OneDimensionIsTriangle) {
  EXPECT_EQ(grid_anchored(1, 5).incidence(), initial_segments(5).incidence());
}

TEST(GridTest, TwoByTwo) {
  const Matrix expected{{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}, {1, 1, 1, 1}};
  EXPECT_EQ(grid_anchored(2, 2).incidence(), expected);
}

TEST(GridTest, EqualsKroneckerPower) {
  for (auto [d, n] : std::vector<std::pair<int, std::size_t>>{{2, 3}, {2, 5}, {3, 3}, {4, 2}}) {
    EXPECT_EQ(grid_anchored(d, n).incidence(), kron_power(lower_triangular_ones(n), d)) << d << n;
  }
}

TEST(GridTest, RowsAreAnchoredBoxes) {
  // Row (b1, b2) in lexicographic order is the box [0,b1] x [0,b2].
  const std::size_t n = 4;
  const SetSystem g = grid_anchored(2, n);
  for (std::size_t b1 = 0; b1 < n; ++b1)
    for (std::size_t b2 = 0; b2 < n; ++b2) {
      std::vector<std::size_t> box;
      for (std::size_t x = 0; x <= b1; ++x)
        for (std::size_t y = 0; y <= b2; ++y) box.push_back(x * n + y);
      std::sort(box.begin(), box.end());
      EXPECT_EQ(g.members(b1 * n + b2), box);
    }
}

TEST(GridTest, CapIsEnforced) {
  EXPECT_THROW(grid_anchored(3, 32), CapExceeded);
  EXPECT_NO_THROW(grid_anchored(2, 64));
}

TEST(SubcubesTest, OneDimension) {
  EXPECT_EQ(subcubes(1).incidence(), (Matrix{{1, 1}, {1, 0}, {0, 1}}));
}

TEST(SubcubesTest, RowsAreExactlyTheSubcubes) {
  for (int d : {2, 3}) {
    const std::size_t points = std::size_t{1} << d;
    // Enumerate patterns over {free, 0, 1}^d directly.
    Sets expected;
    std::size_t patterns = 1;
    for (int k = 0; k < d; ++k) patterns *= 3;
    for (std::size_t code = 0; code < patterns; ++code) {
      std::vector<int> pattern(d);
      std::size_t c = code;
      for (int k = d - 1; k >= 0; --k) {
        pattern[k] = static_cast<int>(c % 3);
        c /= 3;
      }
      std::vector<std::size_t> members;
      for (std::size_t x = 0; x < points; ++x) {
        bool inside = true;
        for (int k = 0; k < d; ++k) {
          const int bit = static_cast<int>(x >> (d - 1 - k) & 1U);
          if (pattern[k] != 0 && pattern[k] - 1 != bit) inside = false;
        }
        if (inside) members.push_back(x);
      }
      expected.insert(members);
    }
    const SetSystem c = subcubes(d);
    EXPECT_EQ(c.set_count(), patterns);
    EXPECT_FALSE(c.has_duplicate_rows());
    EXPECT_EQ(as_sets(c), expected);
  }
  EXPECT_EQ(subcubes(2).describe(0), "**");
}

TEST(SubcubesTest, CapIsEnforced) { EXPECT_THROW(subcubes(13), CapExceeded); }

TEST(ArithmeticProgressionTest, SmallCases) {
  EXPECT_EQ(as_sets(arithmetic_progressions(2)), (Sets{{0}, {1}, {0, 1}}));
  const Sets four = as_sets(arithmetic_progressions(4));
  EXPECT_TRUE(four.count({0, 2}));
  EXPECT_TRUE(four.count({1, 3}));
  EXPECT_TRUE(four.count({0, 3}));
  EXPECT_EQ(arithmetic_progressions(1).set_count(), 1u);
}

TEST(ArithmeticProgressionTest, MatchesExhaustiveEnumeration) {
  for (std::size_t n : {5u, 10u, 17u}) {
    Sets expected;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t delta = 1; delta <= n; ++delta)
        for (std::size_t k = 1; a + (k - 1) * delta < n; ++k) {
          std::vector<std::size_t> s;
          for (std::size_t t = 0; t < k; ++t) s.push_back(a + t * delta);
          expected.insert(s);
        }
    const SetSystem ap = arithmetic_progressions(n);
    EXPECT_EQ(ap.set_count(), expected.size());
    EXPECT_FALSE(ap.has_duplicate_rows());
    EXPECT_EQ(as_sets(ap), expected);
  }
}

TEST(ArithmeticProgressionTest, CapIsEnforced) {
  EXPECT_THROW(arithmetic_progressions(129), CapExceeded);
  SetSystemLimits limits;
  limits.max_ap_ground = 8;
  EXPECT_THROW(arithmetic_progressions(9, limits), CapExceeded);
}

TEST(KPermutationsTest, IdentityGivesInitialSegments) {
  EXPECT_EQ(k_permutations({{0, 1, 2, 3}}).incidence(), initial_segments(4).incidence());
}

TEST(KPermutationsTest, ReversalAddsRows) {
  const SetSystem f = k_permutations({{0, 1}, {1, 0}});
  EXPECT_EQ(as_sets(f), (Sets{{0}, {1}, {0, 1}}));
  EXPECT_EQ(f.set_count(), 3u);
  EXPECT_EQ(as_sets(k_permutations({{1, 0}})), (Sets{{1}, {0, 1}}));
}

TEST(KPermutationsTest, ExcludesEmptyPrefixAndRejectsMalformed) {
  const SetSystem f = k_permutations({{2, 0, 1}, {1, 2, 0}});
  for (std::size_t i = 0; i < f.set_count(); ++i) EXPECT_FALSE(f.members(i).empty());
  EXPECT_THROW(k_permutations({{0, 0}}), std::invalid_argument);
  EXPECT_THROW(k_permutations({{0, 2}}), std::invalid_argument);
  EXPECT_THROW(k_permutations({{0, 1}, {0}}), std::invalid_argument);
  EXPECT_THROW(k_permutations({}), std::invalid_argument);
}

TEST(PowerSetTest, SmallCases) {
  const SetSystem p1 = power_set(1);
  EXPECT_EQ(as_sets(p1), (Sets{{}, {0}}));
  EXPECT_TRUE(p1.members(0).empty());
  const SetSystem p5 = power_set(5);
  EXPECT_EQ(p5.set_count(), 32u);
  EXPECT_FALSE(p5.has_duplicate_rows());
  EXPECT_THROW(power_set(21), CapExceeded);
}

TEST(UnionTest, IdempotentAndDeduplicated) {
  const SetSystem f = arithmetic_progressions(6);
  EXPECT_EQ(set_union(f, f), f);
  const SetSystem a = SetSystem::from_sets(3, {{0, 1}});
  const SetSystem b = SetSystem::from_sets(3, {{2}});
  EXPECT_LE(set_union(a, b).set_count(), 2u);
  EXPECT_EQ(set_union(a, a).set_count(), 1u);
  EXPECT_THROW(set_union(a, initial_segments(2)), std::invalid_argument);
}

TEST(ProductTest, UnitSystemIsNeutral) {
  const SetSystem unit = SetSystem::from_sets(1, {{0}});
  const SetSystem f = arithmetic_progressions(5);
  EXPECT_EQ(product(f, unit).incidence(), f.incidence());
  EXPECT_EQ(product(unit, f).incidence(), f.incidence());
}

TEST(ProductTest, TrianglesGiveGrid) {
  for (std::size_t n : {2u, 3u, 6u})
    EXPECT_EQ(product(initial_segments(n), initial_segments(n)).incidence(),
              grid_anchored(2, n).incidence());
}

TEST(RestrictTest, FullGroundIsIdentity) {
  const SetSystem f = arithmetic_progressions(5);
  EXPECT_EQ(restrict(f, {4, 3, 2, 1, 0}), f.deduplicated());
}

TEST(RestrictTest, TriangleOnTwoColumns) {
  const SetSystem r = restrict(initial_segments(4), {1, 3});
  EXPECT_EQ(r.set_count(), 3u);
  EXPECT_EQ(r.incidence(), (Matrix{{0, 0}, {1, 0}, {1, 1}}));
}

TEST(RestrictTest, RejectsBadSubsets) {
  const SetSystem t = initial_segments(4);
  EXPECT_THROW(restrict(t, {}), std::invalid_argument);
  EXPECT_THROW(restrict(t, {4}), std::invalid_argument);
  EXPECT_THROW(restrict(t, {1, 1}), std::invalid_argument);
}

TEST(CanonicalDecompositionTest, PowerOfTwo) {
  const auto parts = canonical_decomposition(8, 8);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0].begin(), 0u);
  EXPECT_EQ(parts[0].size(8), 8u);
}

TEST(CanonicalDecompositionTest, SevenOfEight) {
  const auto parts = canonical_decomposition(7, 8);
  ASSERT_EQ(parts.size(), 3u);
  const std::vector<std::pair<std::size_t, std::size_t>> ranges{{0, 4}, {4, 6}, {6, 7}};
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(parts[k].begin(), ranges[k].first);
    EXPECT_EQ(parts[k].end(8), ranges[k].second);
  }
}

TEST(CanonicalDecompositionTest, ExhaustiveCover) {
  for (std::size_t n : {64u, 50u}) {
    for (std::size_t j = 1; j <= n; ++j) {
      const auto parts = canonical_decomposition(j, n);
      EXPECT_LE(parts.size(), static_cast<std::size_t>(floor_log2(n) + 1));
      std::vector<int> cover(n, 0);
      std::set<std::size_t> sizes;
      for (const auto& c : parts) {
        EXPECT_EQ(c.begin() % (std::size_t{1} << c.level), 0u);
        EXPECT_LE(c.size(n), std::size_t{1} << c.level);
        EXPECT_GT(c.size(n), 0u);
        sizes.insert(c.size(n));
        for (std::size_t x = c.begin(); x < c.end(n); ++x) ++cover[x];
      }
      EXPECT_EQ(sizes.size(), parts.size());
      for (std::size_t x = 0; x < n; ++x) ASSERT_EQ(cover[x], x < j ? 1 : 0) << n << " " << j;
    }
  }
  EXPECT_THROW(canonical_decomposition(0, 4), std::invalid_argument);
  EXPECT_THROW(canonical_decomposition(5, 4), std::invalid_argument);
}

TEST(CanonicalDecompositionTest, GridSetsSplitIntoFewBoxes) {
  for (auto [d, n] : std::vector<std::pair<int, std::size_t>>{{2, 8}, {2, 6}, {3, 4}}) {
    const SetSystem g = grid_anchored(d, n);
    const std::size_t bound = static_cast<std::size_t>(std::pow(floor_log2(n) + 1, d));
    for (std::size_t row = 0; row < g.set_count(); ++row) {
      // Row index digits in base n are the box corners b_1..b_d.
      std::vector<std::vector<CanonicalInterval>> axes(d);
      std::size_t r = row;
      for (int k = d - 1; k >= 0; --k) {
        axes[k] = canonical_decomposition(r % n + 1, n);
        r /= n;
      }
      std::size_t boxes = 1;
      for (const auto& a : axes) boxes *= a.size();
      EXPECT_LE(boxes, bound);
      // Count coverage by the product boxes.
      std::vector<int> cover(g.ground_size(), 0);
      std::vector<std::size_t> pick(d, 0);
      while (true) {
        std::vector<std::size_t> lo(d), hi(d), x(d);
        for (int k = 0; k < d; ++k) {
          lo[k] = axes[k][pick[k]].begin();
          hi[k] = axes[k][pick[k]].end(n);
          x[k] = lo[k];
        }
        while (true) {
          std::size_t idx = 0;
          for (int k = 0; k < d; ++k) idx = idx * n + x[k];
          ++cover[idx];
          int k = d - 1;
          while (k >= 0 && ++x[k] == hi[k]) x[k] = lo[k], --k;
          if (k < 0) break;
        }
        int k = d - 1;
        while (k >= 0 && ++pick[k] == axes[k].size()) pick[k] = 0, --k;
        if (k < 0) break;
      }
      const auto row_data = g.incidence().row(row);
      for (std::size_t x = 0; x < g.ground_size(); ++x)
        ASSERT_EQ(cover[x], static_cast<int>(row_data[x]));
    }
  }
}

TEST(MaximalApsTest, SizeTwo) {
  const MaximalAps m = maximal_aps(2);
  EXPECT_EQ(as_sets(m.all), (Sets{{0, 1}, {0}, {1}}));
}

TEST(MaximalApsTest, SplitViewBounds) {
  for (std::size_t size : {4u, 16u, 64u}) {
    const MaximalAps m = maximal_aps(size);
    const double root = std::sqrt(static_cast<double>(size));
    for (std::size_t x = 0; x < size; ++x) {
      double degree = 0;
      for (std::size_t i = 0; i < m.small.set_count(); ++i) degree += m.small.incidence()(i, x);
      EXPECT_LE(degree, root) << size;
    }
    for (std::size_t i = 0; i < m.large.set_count(); ++i)
      EXPECT_LE(static_cast<double>(m.large.members(i).size()), root) << size;
    EXPECT_FALSE(m.small.has_duplicate_rows());
    EXPECT_FALSE(m.large.has_duplicate_rows());
  }
}

TEST(MaximalApsTest, SetsAreMaximalProgressions) {
  const std::size_t size = 20;
  const MaximalAps m = maximal_aps(size);
  const Sets all_aps = as_sets(arithmetic_progressions(size));
  for (std::size_t i = 0; i < m.all.set_count(); ++i) {
    const auto s = m.all.members(i);
    EXPECT_TRUE(all_aps.count(s));
    if (s.size() >= 2) {
      const std::size_t delta = s[1] - s[0];
      EXPECT_LT(s.front(), delta);
      EXPECT_GE(s.back() + delta, size);
    }
  }
}

TEST(SetSystemIoTest, RoundTripWithLabels) {
  const SetSystem f = k_permutations({{2, 0, 1}, {0, 1, 2}});
  EXPECT_EQ(parse_set_system(format_set_system(f)), f);
  const SetSystem p = power_set(3);
  EXPECT_EQ(parse_set_system(format_set_system(p)), p);
}

TEST(SetSystemIoTest, RejectsNonBinaryEntries) {
  EXPECT_THROW(parse_set_system("1 2\n1 2\n"), FormatError);
  EXPECT_THROW(SetSystem(Matrix{{0.5}}), std::invalid_argument);
}

TEST(SetSystemTest, AllConstructorsAreBinaryWithoutDuplicates) {
  const std::vector<SetSystem> systems{initial_segments(7), grid_anchored(2, 5), subcubes(3),
                                       arithmetic_progressions(12),
                                       k_permutations({{3, 1, 0, 2}, {0, 1, 2, 3}}),
                                       power_set(6), maximal_aps(16).all};
  for (const auto& f : systems) {
    for (double x : f.incidence().data()) EXPECT_TRUE(x == 0.0 || x == 1.0);
    EXPECT_FALSE(f.has_duplicate_rows());
    if (f.has_labels()) {
      EXPECT_EQ(f.labels().size(), f.set_count());
    }
  }
}

}  // namespace
}  // namespace g2d
