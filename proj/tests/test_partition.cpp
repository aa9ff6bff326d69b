#include <gtest/gtest.h>

#include "ecore/partition.hpp"

using namespace ecore;

namespace {

// Oracle: standard Young tableaux by brute-force removal of corners.
long long count_tableaux(std::vector<std::int64_t> rows) {
  while (!rows.empty() && rows.back() == 0) rows.pop_back();
  if (rows.empty()) return 1;
  long long total = 0;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const bool corner = a + 1 == rows.size() || rows[a + 1] < rows[a];
    if (!corner) continue;
    auto next = rows;
    --next[a];
    total += count_tableaux(next);
  }
  return total;
}

}  // namespace

TEST(MakePartition, EmptyInputIsEmptyPartition) {
  const Partition p = make_partition({});
  EXPECT_TRUE(p.empty());
  EXPECT_EQ(p.size(), 0);
}

TEST(MakePartition, KeepsWeaklyDecreasingParts) {
  const Partition p = make_partition({4, 3, 2, 2});
  EXPECT_EQ(p.size(), 11);
  EXPECT_EQ(p.length(), 4);
  EXPECT_EQ(to_string(p), "[4,3,2,2]");
}

TEST(MakePartition, RejectsIncrease) {
  try {
    make_partition({2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotone);
  }
}

TEST(MakePartition, RejectsNonPositiveButStripsTrailingZeros) {
  EXPECT_EQ(make_partition({3, 1, 0, 0}), make_partition({3, 1}));
  try {
    make_partition({3, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositive);
  }
  try {
    make_partition({-1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositive);
  }
}

TEST(Conjugate, Examples) {
  EXPECT_EQ(conjugate(make_partition({4, 3, 2, 2})), make_partition({4, 4, 2, 1}));
  EXPECT_EQ(conjugate(make_partition({})), make_partition({}));
  EXPECT_EQ(conjugate(make_partition({5, 5, 5, 4, 2})), make_partition({5, 5, 4, 4, 3}));
}

TEST(Conjugate, InvolutionOnAllSmallPartitions) {
  for (std::int64_t n = 0; n <= 14; ++n)
    for (const auto& p : partitions_of(n)) EXPECT_EQ(conjugate(conjugate(p)), p);
}

TEST(DescentSet, FigureExample) {
  const DescentSet d = descent_set(make_partition({4, 3, 2, 2}));
  for (std::int64_t k : {3, 1, -1, -2, -5, -6, -7, -100}) EXPECT_TRUE(d.contains(k)) << k;
  for (std::int64_t k : {4, 2, 0, -3, -4, 10}) EXPECT_FALSE(d.contains(k)) << k;
}

TEST(DescentSet, EmptyAndOneRow) {
  const DescentSet empty = descent_set(make_partition({}));
  EXPECT_FALSE(empty.contains(0));
  EXPECT_TRUE(empty.contains(-1));
  EXPECT_TRUE(empty.contains(-50));

  for (std::int64_t n = 1; n <= 6; ++n) {
    const DescentSet d = descent_set(make_partition({n}));
    EXPECT_TRUE(d.contains(n - 1));
    EXPECT_FALSE(d.contains(-1));
    EXPECT_TRUE(d.contains(-2));
    for (std::int64_t k = 0; k < n - 1; ++k) EXPECT_FALSE(d.contains(k));
  }
}

TEST(DescentSet, InverseExamples) {
  EXPECT_EQ(from_descent_set(DescentSet::from_members(0, {})), make_partition({}));
  EXPECT_EQ(from_descent_set(DescentSet::from_members(4, {3, 1, -1, -2})), make_partition({4, 3, 2, 2}));
  EXPECT_EQ(from_descent_set(DescentSet::from_members(1, {0})), make_partition({1}));
}

TEST(DescentSet, NonCanonicalEncodingsCompareEqual) {
  // {3,1,-1,-2} with threshold 6 lists -5 and -6 explicitly.
  const DescentSet wide = DescentSet::from_members(6, {3, 1, -1, -2, -5, -6});
  EXPECT_EQ(wide, descent_set(make_partition({4, 3, 2, 2})));
  EXPECT_EQ(from_descent_set(wide), make_partition({4, 3, 2, 2}));
}

TEST(DescentSet, RejectsMalformedMembers) {
  EXPECT_THROW(DescentSet::from_members(2, {0, 0}), Error);
  EXPECT_THROW(DescentSet::from_members(2, {5, -3}), Error);
  EXPECT_THROW(DescentSet::from_members(2, {5}), Error);  // charge mismatch
}

TEST(DescentSet, RoundTripAndConjugateDuality) {
  for (std::int64_t n = 0; n <= 14; ++n)
    for (const auto& p : partitions_of(n)) {
      const DescentSet d = descent_set(p);
      EXPECT_EQ(from_descent_set(d), p);
      const DescentSet dc = descent_set(conjugate(p));
      for (std::int64_t k = -n - 2; k <= n + 2; ++k) EXPECT_EQ(dc.contains(k), !d.contains(-k - 1));
    }
}

TEST(Profile, Examples) {
  EXPECT_EQ(profile(make_partition({}), std::int64_t{3}), 3);
  const Partition p = make_partition({4, 3, 2, 2});
  EXPECT_EQ(profile(p, std::int64_t{0}), 4);
  EXPECT_EQ(profile(p, std::int64_t{-2}), 6);
}

TEST(Profile, ParityAndSupport) {
  for (std::int64_t n = 0; n <= 12; ++n)
    for (const auto& p : partitions_of(n)) {
      const std::int64_t hi = p.first_part();
      const std::int64_t lo = -conjugate(p).first_part();
      for (std::int64_t m = lo - 3; m <= hi + 3; ++m) {
        const std::int64_t w = profile(p, m);
        const std::int64_t a = m < 0 ? -m : m;
        EXPECT_GE(w, a);
        EXPECT_EQ((w - a) % 2, 0);
        if (m <= lo || m >= hi) {
          EXPECT_EQ(w, a);
        }
      }
    }
}

TEST(Profile, DescentsAreDownSteps) {
  for (std::int64_t n = 0; n <= 10; ++n)
    for (const auto& p : partitions_of(n)) {
      const DescentSet d = descent_set(p);
      for (std::int64_t k = -n - 2; k <= n + 2; ++k)
        EXPECT_EQ(d.contains(k), profile(p, k) > profile(p, k + 1));
    }
}

TEST(Profile, RealArgumentInterpolates) {
  const Partition p = make_partition({4, 3, 2, 2});
  EXPECT_DOUBLE_EQ(profile(p, -2.0), 6.0);
  EXPECT_DOUBLE_EQ(profile(p, -1.5), 5.5);
  EXPECT_DOUBLE_EQ(profile(p, 0.25), 4.25);
}

TEST(StdCount, Examples) {
  for (std::int64_t n = 1; n <= 10; ++n) EXPECT_EQ(std_count(make_partition({n})), 1);
  EXPECT_EQ(std_count(make_partition({2, 1})), 2);
  boost::multiprecision::cpp_int s = 0;
  for (const auto& p : partitions_of(4)) s += std_count(p) * std_count(p);
  EXPECT_EQ(s, 24);
}

TEST(StdCount, MatchesCornerRemovalAndConjugate) {
  for (std::int64_t n = 0; n <= 12; ++n)
    for (const auto& p : partitions_of(n)) {
      std::vector<std::int64_t> rows(p.parts().begin(), p.parts().end());
      EXPECT_EQ(std_count(p), count_tableaux(rows));
      EXPECT_EQ(std_count(p), std_count(conjugate(p)));
    }
}

TEST(StdCount, SquaresSumToFactorial) {
  for (std::int64_t n = 0; n <= 20; ++n) {
    boost::multiprecision::cpp_int s = 0;
    for (const auto& p : partitions_of(n)) s += std_count(p) * std_count(p);
    boost::multiprecision::cpp_int fact = 1;
    for (std::int64_t k = 2; k <= n; ++k) fact *= k;
    EXPECT_EQ(s, fact) << n;
  }
}

TEST(StdCount, LargeShapeUsesBigIntegers) {
  // (30,30) counts Catalan(30) tableaux.
  EXPECT_EQ(std_count(make_partition({30, 30})), boost::multiprecision::cpp_int("3814986502092304"));
}

TEST(Enumeration, PartitionCounts) {
  const std::vector<std::size_t> expected{1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297, 385};
  for (std::size_t n = 0; n < expected.size(); ++n) EXPECT_EQ(partitions_of(static_cast<std::int64_t>(n)).size(), expected[n]);
}

TEST(TextForm, ParseAndPrint) {
  EXPECT_EQ(parse_partition("[5,5,5,4,2]"), make_partition({5, 5, 5, 4, 2}));
  EXPECT_EQ(parse_partition("[]"), make_partition({}));
  EXPECT_EQ(to_string(make_partition({})), "[]");
  EXPECT_THROW(parse_partition("5,4"), Error);
  EXPECT_THROW(parse_partition("[1,2]"), Error);
}
