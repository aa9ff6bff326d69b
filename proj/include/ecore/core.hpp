#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "ecore/error.hpp"
#include "ecore/partition.hpp"

namespace ecore {

/// Residue-class data of a partition for a fixed modulus e.
struct CoreData {
  Partition core;
  std::int64_t weight = 0;
  std::vector<std::int64_t> c;  // c_i(lambda): i-nodes of lambda
  std::vector<std::int64_t> x;  // x_i = c_i - c_{i+1}, cyclic

  friend bool operator==(const CoreData&, const CoreData&) = default;
};

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t mod(std::int64_t a, std::int64_t e) {
  const std::int64_t r = a % e;
  return r < 0 ? r + e : r;
}

/// #{m in [lo, hi] : m == r (mod e)}.
inline std::int64_t count_in_class(std::int64_t lo, std::int64_t hi, std::int64_t r, std::int64_t e) {
  if (hi < lo) return 0;
  return floor_div(hi - r, e) - floor_div(lo - 1 - r, e);
}

}  // namespace detail

/// c_i(lambda) for i in [0, e): nodes (a,b) with b - a == i (mod e).
inline std::vector<std::int64_t> residue_counts(const Partition& p, std::int64_t e) {
  require_modulus(e);
  std::vector<std::int64_t> c(static_cast<std::size_t>(e), 0);
  // Row a (1-based) holds contents 1-a .. lambda_a - a.
  for (std::int64_t a = 1; a <= p.length(); ++a) {
    const std::int64_t lo = 1 - a;
    const std::int64_t hi = p.row(a - 1) - a;
    for (std::int64_t i = 0; i < e; ++i) c[static_cast<std::size_t>(i)] += detail::count_in_class(lo, hi, i, e);
  }
  return c;
}

inline std::vector<std::int64_t> x_from_counts(std::span<const std::int64_t> c) {
  const auto e = c.size();
  std::vector<std::int64_t> x(e);
  for (std::size_t i = 0; i < e; ++i) x[i] = c[i] - c[(i + 1) % e];
  return x;
}

inline std::vector<std::int64_t> x_vector(const Partition& p, std::int64_t e) {
  return x_from_counts(residue_counts(p, e));
}

/// x_i read off the descent set:
/// #((eZ_{>=0} + i) n D) - #((eZ_{<0} + i) n D^c), both finite inside the
/// canonical window [-N, max member].
inline std::vector<std::int64_t> x_vector_from_descent_set(const DescentSet& d, std::int64_t e) {
  require_modulus(e);
  std::vector<std::int64_t> x(static_cast<std::size_t>(e), 0);
  const std::int64_t n = d.threshold();
  for (auto m : d.members_above())
    if (m >= 0) ++x[static_cast<std::size_t>(detail::mod(m, e))];
  // Complement below zero lives in [-N, -1]; everything below -N is in D.
  for (std::int64_t i = 0; i < e; ++i) {
    std::int64_t missing = detail::count_in_class(-n, -1, i, e);
    for (auto m : d.members_above())
      if (m < 0 && detail::mod(m, e) == i) --missing;
    x[static_cast<std::size_t>(i)] -= missing;
  }
  return x;
}

/// |core| = (e/2)||x||^2 + sum_i i*x_i.
inline std::int64_t core_size_from_x(std::span<const std::int64_t> x) {
  const auto e = static_cast<std::int64_t>(x.size());
  std::int64_t norm2 = 0;
  std::int64_t lin = 0;
  for (std::int64_t i = 0; i < e; ++i) {
    norm2 += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    lin += i * x[static_cast<std::size_t>(i)];
  }
  return e * norm2 / 2 + lin;
}

/// Residue counts of the e-core from the x-vector alone.
inline std::vector<std::int64_t> core_counts_from_x(std::span<const std::int64_t> x) {
  require_modulus(static_cast<std::int64_t>(x.size()));
  if (std::accumulate(x.begin(), x.end(), std::int64_t{0}) != 0)
    throw Error(ErrorCode::UnbalancedX, "x-vector entries must sum to 0");
  std::int64_t norm2 = 0;
  for (auto v : x) norm2 += v * v;
  std::vector<std::int64_t> c(x.size());
  std::int64_t acc = norm2 / 2;
  for (std::size_t i = 0; i < x.size(); ++i) {
    c[i] = acc;
    acc -= x[i];
  }
  return c;
}

/// e-core via the abacus: slide every bead on each runner to the lowest free
/// positions; the weight is the total number of level moves.
inline CoreData e_core_abacus(const Partition& p, std::int64_t e) {
  require_modulus(e);
  const std::int64_t n = p.length();
  std::vector<std::int64_t> beads(static_cast<std::size_t>(e), 0);
  std::int64_t level_sum = 0;
  for (std::int64_t a = 1; a <= n; ++a) {
    const std::int64_t beta = p.row(a - 1) - a + n;  // >= 0
    ++beads[static_cast<std::size_t>(beta % e)];
    level_sum += beta / e;
  }
  std::vector<std::int64_t> core_beta;
  core_beta.reserve(static_cast<std::size_t>(n));
  std::int64_t min_level_sum = 0;
  for (std::int64_t r = 0; r < e; ++r) {
    const std::int64_t k = beads[static_cast<std::size_t>(r)];
    min_level_sum += k * (k - 1) / 2;
    for (std::int64_t l = 0; l < k; ++l) core_beta.push_back(r + l * e);
  }
  std::sort(core_beta.begin(), core_beta.end(), std::greater<>());
  std::vector<std::int64_t> parts(core_beta.size());
  for (std::size_t a = 0; a < core_beta.size(); ++a) parts[a] = core_beta[a] - n + static_cast<std::int64_t>(a) + 1;

  CoreData out;
  out.core = partition_unchecked(std::move(parts));
  out.weight = level_sum - min_level_sum;
  out.c = residue_counts(p, e);
  out.x = x_from_counts(out.c);
  return out;
}

/// e-core by repeated rim-hook removal. Each step removes the e-rim hook
/// whose hand (eastmost node) lies in the topmost possible row. Quadratic in
/// |p|; meant as an oracle for small partitions.
inline CoreData e_core_rimhook(const Partition& p, std::int64_t e) {
  require_modulus(e);
  std::vector<std::int64_t> rows(p.parts().begin(), p.parts().end());
  std::int64_t weight = 0;
  for (;;) {
    const Partition cur = partition_unchecked(rows);
    const Partition conj = conjugate(cur);
    bool removed = false;
    for (std::int64_t a = 0; a < cur.length() && !removed; ++a) {
      for (std::int64_t b = 0; b < cur.row(a); ++b) {
        const std::int64_t hook = (cur.row(a) - b - 1) + (conj.row(b) - a - 1) + 1;
        if (hook < e) break;  // hook lengths decrease along a row
        if (hook != e) continue;
        // Rows a .. foot-1 shift to lambda_{r+1} - 1; the foot row ends at column b.
        const std::int64_t foot = conj.row(b) - 1;
        for (std::int64_t r = a; r < foot; ++r) rows[static_cast<std::size_t>(r)] = rows[static_cast<std::size_t>(r + 1)] - 1;
        rows[static_cast<std::size_t>(foot)] = b;
        while (!rows.empty() && rows.back() == 0) rows.pop_back();
        ++weight;
        removed = true;
        break;
      }
    }
    if (!removed) break;
  }
  CoreData out;
  out.core = partition_unchecked(std::move(rows));
  out.weight = weight;
  out.c = residue_counts(p, e);
  out.x = x_from_counts(out.c);
  return out;
}

/// True when every CoreData identity holds for (p, e).
inline bool core_invariants_hold(const Partition& p, std::int64_t e, const CoreData& d) {
  if (static_cast<std::int64_t>(d.c.size()) != e || static_cast<std::int64_t>(d.x.size()) != e) return false;
  if (std::accumulate(d.c.begin(), d.c.end(), std::int64_t{0}) != p.size()) return false;
  if (std::accumulate(d.x.begin(), d.x.end(), std::int64_t{0}) != 0) return false;
  if (p.size() != d.core.size() + e * d.weight) return false;
  return d.core.size() == core_size_from_x(d.x);
}

}  // namespace ecore
