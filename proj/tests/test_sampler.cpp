#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "ecore/sampler.hpp"

using namespace ecore;

namespace {

// Oracle: patience sorting.
std::int64_t lis_length(const std::vector<std::int64_t>& perm) {
  std::vector<std::int64_t> piles;
  for (auto v : perm) {
    auto it = std::lower_bound(piles.begin(), piles.end(), v);
    if (it == piles.end()) piles.push_back(v);
    else *it = v;
  }
  return static_cast<std::int64_t>(piles.size());
}

double pl_probability(const Partition& p) {
  const double f = static_cast<double>(std_count(p));
  double fact = 1.0;
  for (std::int64_t k = 2; k <= p.size(); ++k) fact *= static_cast<double>(k);
  return f * f / fact;
}

void expect_frequency(std::int64_t hits, std::int64_t n, double p, double sigmas, const std::string& what) {
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  EXPECT_NEAR(static_cast<double>(hits) / static_cast<double>(n), p, sigmas * se) << what;
}

}  // namespace

TEST(Rsk, Examples) {
  for (std::int64_t n : {1, 4, 9}) {
    std::vector<std::int64_t> id(static_cast<std::size_t>(n));
    std::iota(id.begin(), id.end(), 1);
    EXPECT_EQ(rsk_shape(id), make_partition({n}));
    std::reverse(id.begin(), id.end());
    EXPECT_EQ(rsk_shape(id), partition_unchecked(std::vector<std::int64_t>(static_cast<std::size_t>(n), 1)));
  }
  const std::vector<std::int64_t> perm{2, 1, 3};
  EXPECT_EQ(rsk_shape(perm), make_partition({2, 1}));
  EXPECT_TRUE(rsk_shape(std::vector<std::int64_t>{}).empty());
}

TEST(Rsk, RejectsNonPermutations) {
  for (const auto& bad : {std::vector<std::int64_t>{1, 1}, std::vector<std::int64_t>{0, 1}, std::vector<std::int64_t>{1, 3}}) {
    try {
      rsk_shape(bad);
      FAIL();
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), ErrorCode::NotAPermutation);
    }
  }
}

TEST(Rsk, ShapeMatchesBruteForceOverAllPermutationsOfFive) {
  std::vector<std::int64_t> perm{1, 2, 3, 4, 5};
  std::map<Partition, std::int64_t> freq;
  do {
    ++freq[rsk_shape(perm)];
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (const auto& p : partitions_of(5)) {
    const auto f = static_cast<std::int64_t>(std_count(p));
    EXPECT_EQ(freq[p], f * f) << to_string(p);
  }
}

TEST(Rsk, FirstRowIsLongestIncreasingSubsequence) {
  Substream rng = substream(17, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::int64_t> perm(500);
    std::iota(perm.begin(), perm.end(), 1);
    for (std::int64_t i = 499; i > 0; --i)
      std::swap(perm[static_cast<std::size_t>(i)], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    const Partition p = rsk_shape(perm);
    ASSERT_EQ(p.size(), 500);
    ASSERT_EQ(p.first_part(), lis_length(perm));
  }
}

TEST(Plancherel, EmptyAndSizes) {
  Substream rng = substream(1, 0);
  EXPECT_TRUE(sample_plancherel(0, rng).empty());
  EXPECT_EQ(sample_plancherel(37, rng).size(), 37);
  EXPECT_THROW(sample_plancherel(-1, rng), Error);
}

TEST(Plancherel, ShapeFrequenciesAtThreeAndFour) {
  for (std::int64_t n : {3, 4}) {
    Substream rng = substream(2024, static_cast<std::uint64_t>(n));
    const std::int64_t draws = 1'000'000;
    std::map<Partition, std::int64_t> freq;
    for (std::int64_t k = 0; k < draws; ++k) ++freq[sample_plancherel(n, rng)];
    std::int64_t total = 0;
    for (const auto& p : partitions_of(n)) {
      expect_frequency(freq[p], draws, pl_probability(p), 3.0, to_string(p));
      total += freq[p];
    }
    EXPECT_EQ(total, draws);
  }
  EXPECT_NEAR(pl_probability(make_partition({3})), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(pl_probability(make_partition({2, 1})), 2.0 / 3.0, 1e-15);
}

TEST(Plancherel, ConjugationSymmetry) {
  Substream rng = substream(99, 0);
  const std::int64_t draws = 100'000;
  std::map<Partition, std::int64_t> freq;
  for (std::int64_t k = 0; k < draws; ++k) ++freq[sample_plancherel(20, rng)];
  for (const auto& [p, c] : freq) {
    const Partition q = conjugate(p);
    if (!(p < q)) continue;
    const double a = static_cast<double>(c) / draws;
    const double b = static_cast<double>(freq.count(q) ? freq.at(q) : 0) / draws;
    const double pl = pl_probability(p);
    EXPECT_NEAR(a, b, 4.0 * std::sqrt(2.0 * pl * (1.0 - pl) / draws) + 1e-12) << to_string(p);
  }
}

TEST(Poisson, MomentsAtTen) {
  Substream rng = substream(5, 5);
  const int n = 1'000'000;
  double s = 0.0;
  double s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto v = static_cast<double>(sample_poisson(10.0, rng));
    s += v;
    s2 += v * v;
  }
  const double m = s / n;
  const double var = s2 / n - m * m;
  EXPECT_NEAR(m, 10.0, 3.0 * std::sqrt(10.0 / n));
  // Var of the sample variance is (mu4 - sigma^4)/n with mu4 = 3 t^2 + t.
  EXPECT_NEAR(var, 10.0, 3.0 * std::sqrt((3.0 * 100 + 10 - 100) / n));
}

TEST(Poisson, ZeroProbabilityAtTwo) {
  Substream rng = substream(5, 6);
  const int n = 1'000'000;
  std::int64_t zeros = 0;
  for (int k = 0; k < n; ++k) zeros += sample_poisson(2.0, rng) == 0;
  expect_frequency(zeros, n, std::exp(-2.0), 3.0, "P(N=0)");
}

TEST(Poisson, RejectionBranchPmf) {
  // Above the inversion cutoff: compare the pmf near the mode at t = 80.
  Substream rng = substream(8, 8);
  const int n = 1'000'000;
  std::map<std::int64_t, std::int64_t> freq;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto v = sample_poisson(80.0, rng);
    ++freq[v];
    s += static_cast<double>(v);
  }
  EXPECT_NEAR(s / n, 80.0, 4.0 * std::sqrt(80.0 / n));
  for (std::int64_t v = 60; v <= 100; v += 5) {
    const double p = std::exp(-80.0 + static_cast<double>(v) * std::log(80.0) - std::lgamma(v + 1.0));
    expect_frequency(freq[v], n, p, 4.0, "k=" + std::to_string(v));
  }
  EXPECT_THROW(sample_poisson(0.0, rng), Error);
}

TEST(PoissonisedPlancherel, SmallShapesAndMeanSize) {
  Substream rng = substream(31, 0);
  const int n = 1'000'000;
  std::int64_t empty = 0;
  std::int64_t single = 0;
  for (int k = 0; k < n; ++k) {
    const Partition p = sample_poissonised_plancherel(1.0, rng);
    empty += p.empty();
    single += p == make_partition({1});
  }
  expect_frequency(empty, n, std::exp(-1.0), 3.0, "empty");
  expect_frequency(single, n, std::exp(-1.0), 3.0, "(1)");

  Substream rng20 = substream(31, 1);
  double s = 0.0;
  const int m = 200'000;
  for (int k = 0; k < m; ++k) s += static_cast<double>(sample_poissonised_plancherel(20.0, rng20).size());
  EXPECT_NEAR(s / m, 20.0, 3.0 * std::sqrt(20.0 / m));
}

TEST(RunTrials, SingleTrialMatchesDirectSubstream) {
  const SamplerConfig cfg{FixedN{3}, 123, 1};
  const TrialBatch b = run_trials(cfg, 2, Collect{true});
  ASSERT_EQ(b.records.size(), 1u);
  Substream rng = substream(123, 0);
  const Partition p = sample_plancherel(3, rng);
  EXPECT_EQ(*b.records[0].partition, p);
  EXPECT_EQ(b.records[0].x, x_vector(p, 2));
}

TEST(RunTrials, WorkerCountDoesNotChangeRecords) {
  const SamplerConfig cfg{Poissonised{300.0}, 77, 257};
  const TrialBatch one = run_trials(cfg, 5, Collect{true}, 1);
  for (unsigned w : {2u, 3u, 8u}) {
    const TrialBatch many = run_trials(cfg, 5, Collect{true}, w);
    EXPECT_EQ(many.records, one.records) << w;
  }
}

TEST(RunTrials, RecordsSatisfyCoreInvariants) {
  const TrialBatch b = run_trials({FixedN{400}, 9, 50}, 4, Collect{true});
  for (const auto& r : b.records) {
    EXPECT_EQ(r.n, 400);
    const CoreData d = e_core_abacus(*r.partition, 4);
    EXPECT_TRUE(core_invariants_hold(*r.partition, 4, d));
    EXPECT_EQ(r.core_size, core_size_from_x(r.x));
    EXPECT_EQ(r.n, r.core_size + 4 * r.weight);
  }
}

TEST(RunTrials, ValidatesConfig) {
  EXPECT_THROW(run_trials({FixedN{0}, 1, 1}, 2), Error);
  EXPECT_THROW(run_trials({Poissonised{0.0}, 1, 1}, 2), Error);
  EXPECT_THROW(run_trials({FixedN{3}, 1, 0}, 2), Error);
  EXPECT_THROW(run_trials({FixedN{3}, 1, 1}, 1), Error);
}

TEST(Serialisation, CsvAndJsonLines) {
  TrialBatch b;
  b.e = 2;
  b.records.push_back({3, 1, 1, {1, -1}, std::nullopt});
  b.records.push_back({0, 0, 0, {0, 0}, std::nullopt});
  std::ostringstream csv;
  write_csv(csv, b);
  EXPECT_EQ(csv.str(), "trial,n,core_size,weight,x\n0,3,1,1,1;-1\n1,0,0,0,0;0\n");
  std::ostringstream jl;
  write_jsonl(jl, b);
  EXPECT_EQ(jl.str(),
            "{\"trial\":0,\"n\":3,\"core_size\":1,\"weight\":1,\"x\":[1,-1]}\n"
            "{\"trial\":1,\"n\":0,\"core_size\":0,\"weight\":0,\"x\":[0,0]}\n");
}
