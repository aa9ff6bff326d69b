#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ecore/error.hpp"

namespace ecore {

/// Integer partition: weakly decreasing positive parts.
///
/// Instances are only produced through make_partition() or the library's own
/// algorithms, so the invariants parts[a] >= parts[a+1] >= 1 always hold.
class Partition {
 public:
  Partition() = default;

  std::span<const std::int64_t> parts() const noexcept { return parts_; }
  std::int64_t size() const noexcept { return size_; }
  /// Number of nonzero parts, h(lambda).
  std::int64_t length() const noexcept { return static_cast<std::int64_t>(parts_.size()); }
  bool empty() const noexcept { return parts_.empty(); }
  /// 0-based row access; rows past the end read as 0.
  std::int64_t row(std::int64_t a) const noexcept {
    return a < length() ? parts_[static_cast<std::size_t>(a)] : 0;
  }
  std::int64_t first_part() const noexcept { return parts_.empty() ? 0 : parts_.front(); }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) { return a.parts_ <=> b.parts_; }

 private:
  friend Partition make_partition(std::span<const std::int64_t> parts);
  friend Partition partition_unchecked(std::vector<std::int64_t> parts);

  std::vector<std::int64_t> parts_;
  std::int64_t size_ = 0;
};

/// Trusted constructor for algorithm outputs that are decreasing by construction.
inline Partition partition_unchecked(std::vector<std::int64_t> parts) {
  while (!parts.empty() && parts.back() == 0) parts.pop_back();
  Partition p;
  p.size_ = 0;
  for (auto v : parts) p.size_ += v;
  p.parts_ = std::move(parts);
  return p;
}

inline Partition make_partition(std::span<const std::int64_t> parts) {
  std::size_t len = parts.size();
  while (len > 0 && parts[len - 1] == 0) --len;
  for (std::size_t a = 0; a < len; ++a) {
    if (parts[a] <= 0)
      throw Error(ErrorCode::NonPositive, "part " + std::to_string(a) + " is " + std::to_string(parts[a]));
    if (a + 1 < len && parts[a + 1] > parts[a])
      throw Error(ErrorCode::NonMonotone, "parts increase at index " + std::to_string(a + 1));
  }
  return partition_unchecked({parts.begin(), parts.begin() + static_cast<std::ptrdiff_t>(len)});
}

inline Partition make_partition(std::initializer_list<std::int64_t> parts) {
  return make_partition(std::span<const std::int64_t>(parts.begin(), parts.size()));
}

/// lambda'_a = #{b : lambda_b >= a}.
inline Partition conjugate(const Partition& p) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(p.first_part()), 0);
  for (auto part : p.parts())
    for (std::int64_t a = 0; a < part; ++a) ++out[static_cast<std::size_t>(a)];
  return partition_unchecked(std::move(out));
}

/// Finite encoding of a beta-set: members_above holds every element >= -threshold
/// (sorted decreasing); every integer < -threshold belongs to the set.
class DescentSet {
 public:
  DescentSet() = default;

  /// Validates that the set is the descent set of some partition, i.e. has
  /// exactly `threshold` members at or above -threshold.
  static DescentSet from_members(std::int64_t threshold, std::vector<std::int64_t> members) {
    if (threshold < 0) throw Error(ErrorCode::BadParameter, "descent-set threshold must be >= 0");
    std::sort(members.begin(), members.end(), std::greater<>());
    if (std::adjacent_find(members.begin(), members.end()) != members.end())
      throw Error(ErrorCode::BadParameter, "descent-set members must be distinct");
    if (!members.empty() && members.back() < -threshold)
      throw Error(ErrorCode::BadParameter, "descent-set member below -threshold");
    if (static_cast<std::int64_t>(members.size()) != threshold)
      throw Error(ErrorCode::BadParameter, "descent set has nonzero charge");
    DescentSet d;
    d.threshold_ = threshold;
    d.members_ = std::move(members);
    return d;
  }

  std::int64_t threshold() const noexcept { return threshold_; }
  std::span<const std::int64_t> members_above() const noexcept { return members_; }

  bool contains(std::int64_t k) const noexcept {
    if (k < -threshold_) return true;
    return std::binary_search(members_.begin(), members_.end(), k, std::greater<>());
  }

  /// Re-encode with the smallest threshold, N = h(lambda).
  DescentSet canonical() const {
    // Drop the maximal run -N, -N+1, ... that is contiguous with Z_{<-N}.
    std::int64_t n = threshold_;
    std::vector<std::int64_t> m = members_;
    while (n > 0 && !m.empty() && m.back() == -n) {
      m.pop_back();
      --n;
    }
    DescentSet d;
    d.threshold_ = n;
    d.members_ = std::move(m);
    return d;
  }

  friend bool operator==(const DescentSet& a, const DescentSet& b) {
    auto ca = a.canonical();
    auto cb = b.canonical();
    return ca.threshold_ == cb.threshold_ && ca.members_ == cb.members_;
  }

 private:
  std::int64_t threshold_ = 0;
  std::vector<std::int64_t> members_;
};

/// D(lambda) = {lambda_a - a : a >= 1}, canonical threshold h(lambda).
inline DescentSet descent_set(const Partition& p) {
  std::vector<std::int64_t> members;
  members.reserve(static_cast<std::size_t>(p.length()));
  for (std::int64_t a = 1; a <= p.length(); ++a) members.push_back(p.row(a - 1) - a);
  return DescentSet::from_members(p.length(), std::move(members));
}

inline Partition from_descent_set(const DescentSet& d) {
  auto m = d.members_above();
  std::vector<std::int64_t> parts;
  parts.reserve(m.size());
  for (std::size_t a = 0; a < m.size(); ++a) parts.push_back(m[a] + static_cast<std::int64_t>(a) + 1);
  return partition_unchecked(std::move(parts));
}

/// Number of nodes (a,b) with content b - a == m.
inline std::int64_t diagonal_count(const Partition& p, std::int64_t m) {
  std::int64_t count = 0;
  for (std::int64_t a = 1; a <= p.length(); ++a) {
    if (p.row(a - 1) - a < m) break;
    if (a + m >= 1) ++count;
  }
  return count;
}

/// Russian-convention profile omega_lambda at an integer abscissa.
inline std::int64_t profile(const Partition& p, std::int64_t m) {
  return (m < 0 ? -m : m) + 2 * diagonal_count(p, m);
}

/// Profile at a real abscissa; omega_lambda is linear between integers.
inline double profile(const Partition& p, double x) {
  const double fl = std::floor(x);
  const auto m = static_cast<std::int64_t>(fl);
  const double w = x - fl;
  const auto lo = static_cast<double>(profile(p, m));
  if (w == 0.0) return lo;
  return lo + w * (static_cast<double>(profile(p, m + 1)) - lo);
}

/// Number of standard Young tableaux by the hook-length formula.
inline boost::multiprecision::cpp_int std_count(const Partition& p) {
  using boost::multiprecision::cpp_int;
  const Partition conj = conjugate(p);
  cpp_int num = 1;
  for (std::int64_t k = 2; k <= p.size(); ++k) num *= k;
  cpp_int den = 1;
  for (std::int64_t a = 0; a < p.length(); ++a)
    for (std::int64_t b = 0; b < p.row(a); ++b) den *= (p.row(a) - b - 1) + (conj.row(b) - a - 1) + 1;
  return num / den;
}

/// Calls fn(partition) for every partition of n, in reverse lexicographic order.
template <class Fn>
void for_each_partition(std::int64_t n, Fn&& fn) {
  if (n < 0) return;
  if (n == 0) {
    fn(Partition{});
    return;
  }
  std::vector<std::int64_t> a{n};
  for (;;) {
    fn(partition_unchecked(a));
    // Next partition: find rightmost part > 1.
    std::int64_t rem = 0;
    while (!a.empty() && a.back() == 1) {
      a.pop_back();
      ++rem;
    }
    if (a.empty()) return;
    const std::int64_t v = --a.back();
    ++rem;
    while (rem > v) {
      a.push_back(v);
      rem -= v;
    }
    if (rem > 0) a.push_back(rem);
  }
}

inline std::vector<Partition> partitions_of(std::int64_t n) {
  std::vector<Partition> out;
  for_each_partition(n, [&](const Partition& p) { out.push_back(p); });
  return out;
}

/// Text form "[5,5,5,4,2]"; "[]" is the empty partition.
inline std::string to_string(const Partition& p) {
  std::string s = "[";
  for (std::int64_t a = 0; a < p.length(); ++a) {
    if (a) s += ',';
    s += std::to_string(p.row(a));
  }
  s += ']';
  return s;
}

inline Partition parse_partition(std::string_view text) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    return v;
  };
  text = trim(text);
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    throw Error(ErrorCode::BadParameter, "partition text must look like [a,b,...]: " + std::string(text));
  text = trim(text.substr(1, text.size() - 2));
  std::vector<std::int64_t> parts;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto tok = trim(text.substr(0, comma));
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      throw Error(ErrorCode::BadParameter, "bad partition part '" + std::string(tok) + "'");
    parts.push_back(v);
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return make_partition(parts);
}

}  // namespace ecore
