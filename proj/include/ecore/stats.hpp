#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ecore/error.hpp"

namespace ecore {

/// Kolmogorov-Smirnov distance sup|F_N - F| for a sorted sample.
inline double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  if (sorted.empty()) throw Error(ErrorCode::EmptySample, "KS distance needs a nonempty sample");
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Fixed-width histogram over [lo, hi) with explicit underflow and overflow buckets.
class Histogram {
 public:
  Histogram(std::int64_t bins, double lo, double hi) : lo_(lo), hi_(hi), counts_(static_cast<std::size_t>(bins), 0) {
    if (bins < 1) throw Error(ErrorCode::BadParameter, "histogram needs at least one bin");
    if (!(hi > lo)) throw Error(ErrorCode::BadParameter, "histogram range must be nonempty");
  }

  void add(double v) {
    if (v < lo_) {
      ++underflow_;
    } else if (v >= hi_) {
      ++overflow_;
    } else {
      auto k = static_cast<std::size_t>((v - lo_) / width());
      counts_[std::min(k, counts_.size() - 1)] += 1;
    }
  }

  std::int64_t bins() const noexcept { return static_cast<std::int64_t>(counts_.size()); }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double width() const noexcept { return (hi_ - lo_) / static_cast<double>(counts_.size()); }
  double edge(std::int64_t k) const noexcept { return lo_ + static_cast<double>(k) * width(); }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }
  std::int64_t underflow() const noexcept { return underflow_; }
  std::int64_t overflow() const noexcept { return overflow_; }

  std::int64_t total() const noexcept {
    std::int64_t s = underflow_ + overflow_;
    for (auto c : counts_) s += c;
    return s;
  }

  /// Density per bin; sum(density) * width + (underflow + overflow) / total == 1.
  std::vector<double> density() const {
    const auto n = static_cast<double>(total());
    std::vector<double> out(counts_.size(), 0.0);
    if (n == 0) return out;
    for (std::size_t k = 0; k < counts_.size(); ++k) out[k] = static_cast<double>(counts_[k]) / (n * width());
    return out;
  }

 private:
  double lo_;
  double hi_;
  std::vector<std::int64_t> counts_;
  std::int64_t underflow_ = 0;
  std::int64_t overflow_ = 0;
};

inline double mean(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorCode::EmptySample, "mean of an empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Unbiased sample covariance.
inline double covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::BadParameter, "covariance needs equal-length samples");
  if (a.size() < 2) throw Error(ErrorCode::EmptySample, "covariance needs at least two samples");
  const double ma = mean(a);
  const double mb = mean(b);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - ma) * (b[k] - mb);
  return s / static_cast<double>(a.size() - 1);
}

inline double variance(std::span<const double> v) { return covariance(v, v); }

/// Standard error of the sample covariance of (a, b): sd of the centred products / sqrt N.
inline double covariance_standard_error(std::span<const double> a, std::span<const double> b) {
  const double ma = mean(a);
  const double mb = mean(b);
  std::vector<double> prod(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) prod[k] = (a[k] - ma) * (b[k] - mb);
  return std::sqrt(variance(prod) / static_cast<double>(a.size()));
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorCode::EmptySample, "median of an empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace ecore
