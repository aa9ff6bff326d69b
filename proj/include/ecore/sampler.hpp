#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "ecore/core.hpp"
#include "ecore/error.hpp"
#include "ecore/partition.hpp"
#include "ecore/random.hpp"
#include "json.hpp"

namespace ecore {

/// Shape of the RSK insertion tableau of a permutation of 1..n.
///
/// Only row contents are kept; each bump locates its column by binary search.
inline Partition rsk_shape(std::span<const std::int64_t> perm) {
  const auto n = static_cast<std::int64_t>(perm.size());
  std::vector<bool> seen(perm.size(), false);
  for (auto v : perm) {
    if (v < 1 || v > n || seen[static_cast<std::size_t>(v - 1)])
      throw Error(ErrorCode::NotAPermutation, "input is not a permutation of 1..n");
    seen[static_cast<std::size_t>(v - 1)] = true;
  }
  std::vector<std::vector<std::int64_t>> rows;
  for (auto value : perm) {
    std::int64_t cur = value;
    std::size_t r = 0;
    for (;; ++r) {
      if (r == rows.size()) {
        rows.push_back({cur});
        break;
      }
      auto& row = rows[r];
      auto it = std::upper_bound(row.begin(), row.end(), cur);
      if (it == row.end()) {
        row.push_back(cur);
        break;
      }
      std::swap(*it, cur);
    }
  }
  std::vector<std::int64_t> parts(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) parts[r] = static_cast<std::int64_t>(rows[r].size());
  return partition_unchecked(std::move(parts));
}

/// Pl_n: RSK shape of a uniform permutation (Fisher-Yates).
inline Partition sample_plancherel(std::int64_t n, Substream& rng) {
  if (n < 0) throw Error(ErrorCode::BadParameter, "n must be >= 0");
  std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i + 1;
  for (std::int64_t i = n - 1; i > 0; --i) {
    const auto k = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(k)]);
  }
  return rsk_shape(perm);
}

/// Exact Poisson(t): sequential inversion for t <= 30, Hormann's transformed
/// rejection (PTRS) above.
inline std::int64_t sample_poisson(double t, Substream& rng) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::BadParameter, "Poisson parameter must be > 0");
  if (t <= 30.0) {
    double p = std::exp(-t);
    double cdf = p;
    const double u = rng.uniform();
    std::int64_t k = 0;
    while (u > cdf) {
      ++k;
      p *= t / static_cast<double>(k);
      if (p == 0.0) break;
      cdf += p;
    }
    return k;
  }
  const double slam = std::sqrt(t);
  const double loglam = std::log(t);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + t + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    const double kd = static_cast<double>(k);
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <= -t + kd * loglam - std::lgamma(kd + 1.0))
      return k;
  }
}

inline Partition sample_poissonised_plancherel(double t, Substream& rng) {
  return sample_plancherel(sample_poisson(t, rng), rng);
}

struct FixedN {
  std::int64_t n;
};
struct Poissonised {
  double t;
};

struct SamplerConfig {
  std::variant<FixedN, Poissonised> mode = FixedN{1};
  std::uint64_t master_seed = 0;
  std::int64_t trials = 1;

  void validate() const {
    if (trials < 1) throw Error(ErrorCode::BadParameter, "trials must be >= 1");
    if (const auto* f = std::get_if<FixedN>(&mode); f && f->n < 1)
      throw Error(ErrorCode::BadParameter, "fixed-n mode needs n >= 1");
    if (const auto* p = std::get_if<Poissonised>(&mode); p && !(p->t > 0.0 && std::isfinite(p->t)))
      throw Error(ErrorCode::BadParameter, "poissonised mode needs t > 0");
  }
};

struct TrialRecord {
  std::int64_t n = 0;
  std::int64_t core_size = 0;
  std::int64_t weight = 0;
  std::vector<std::int64_t> x;
  std::optional<Partition> partition;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct Collect {
  bool partitions = false;
};

struct TrialBatch {
  SamplerConfig config;
  std::int64_t e = 2;
  std::vector<TrialRecord> records;
};

/// Draws the partition for one trial from substream(master_seed, index).
inline Partition sample_trial(const SamplerConfig& config, std::uint64_t index) {
  Substream rng = substream(config.master_seed, index);
  if (const auto* f = std::get_if<FixedN>(&config.mode)) return sample_plancherel(f->n, rng);
  return sample_poissonised_plancherel(std::get<Poissonised>(config.mode).t, rng);
}

inline TrialRecord make_record(const Partition& p, std::int64_t e, bool keep_partition) {
  const CoreData d = e_core_abacus(p, e);
  assert(core_invariants_hold(p, e, d));
  TrialRecord r;
  r.n = p.size();
  r.core_size = d.core.size();
  r.weight = d.weight;
  r.x = d.x;
  if (keep_partition) r.partition = p;
  return r;
}

/// Runs fn(i) for i in [0, count) over `workers` threads, contiguous chunks.
template <class Fn>
void parallel_for(std::int64_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::int64_t lo = static_cast<std::int64_t>(w) * chunk;
    const std::int64_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Independent trials, one substream per trial index; the result does not
/// depend on `workers`.
inline TrialBatch run_trials(const SamplerConfig& config, std::int64_t e, Collect collect = {},
                             unsigned workers = 1) {
  config.validate();
  require_modulus(e);
  TrialBatch batch;
  batch.config = config;
  batch.e = e;
  batch.records.resize(static_cast<std::size_t>(config.trials));
  parallel_for(config.trials, workers, [&](std::int64_t i) {
    batch.records[static_cast<std::size_t>(i)] =
        make_record(sample_trial(config, static_cast<std::uint64_t>(i)), e, collect.partitions);
  });
  return batch;
}

/// JSON-lines: {"trial":i,"n":..,"core_size":..,"weight":..,"x":[..]} per line.
inline void write_jsonl(std::ostream& os, const TrialBatch& batch) {
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    const auto& r = batch.records[i];
    nlohmann::ordered_json j;
    j["trial"] = i;
    j["n"] = r.n;
    j["core_size"] = r.core_size;
    j["weight"] = r.weight;
    j["x"] = r.x;
    os << j.dump() << '\n';
  }
}

inline constexpr const char* kTrialCsvHeader = "trial,n,core_size,weight,x";

/// CSV with header trial,n,core_size,weight,x; x is ';'-separated.
inline void write_csv(std::ostream& os, const TrialBatch& batch) {
  os << kTrialCsvHeader << '\n';
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    const auto& r = batch.records[i];
    os << i << ',' << r.n << ',' << r.core_size << ',' << r.weight << ',';
    for (std::size_t k = 0; k < r.x.size(); ++k) os << (k ? ";" : "") << r.x[k];
    os << '\n';
  }
}

}  // namespace ecore
