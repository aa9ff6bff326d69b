#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "ecore/error.hpp"

namespace ecore {

/// J_n(2 sqrt t) for n in [0, n_max] at a fixed Poisson parameter t.
///
/// Orders beyond n_max are treated as zero; tail_bound bounds |J_n| for every
/// n > n_max via |J_n(x)| <= (x/2)^n / n!.
class BesselTable {
 public:
  double t() const noexcept { return t_; }
  double argument() const noexcept { return x_; }
  std::int64_t n_max() const noexcept { return static_cast<std::int64_t>(values_.size()) - 1; }
  std::span<const double> values() const noexcept { return values_; }
  double tail_bound() const noexcept { return tail_bound_; }

  /// J_n for any integer n; J_{-n} = (-1)^n J_n.
  double operator()(std::int64_t n) const noexcept {
    const std::int64_t a = n < 0 ? -n : n;
    if (a > n_max()) return 0.0;
    const double v = values_[static_cast<std::size_t>(a)];
    return (n < 0 && (a & 1)) ? -v : v;
  }

 private:
  friend BesselTable bessel_table(double t, double eps_tail);

  double t_ = 0.0;
  double x_ = 0.0;
  std::vector<double> values_;
  double tail_bound_ = 0.0;
};

namespace detail {

/// log of the bound (x/2)^n / n!.
inline double log_power_bound(double x, std::int64_t n) {
  return static_cast<double>(n) * std::log(x / 2.0) - std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace detail

inline constexpr double kDefaultBesselTail = 1e-17;

/// Miller's downward recurrence, normalised by J_0 + 2 sum_s J_{2s} = 1.
inline BesselTable bessel_table(double t, double eps_tail = kDefaultBesselTail) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::BadParameter, "bessel_table needs t > 0");
  if (!(eps_tail > 0.0 && eps_tail < 1e-6)) throw Error(ErrorCode::BadParameter, "eps_tail must be in (0, 1e-6)");

  const double x = 2.0 * std::sqrt(t);
  const double log_eps = std::log(eps_tail);
  std::int64_t n_max = 0;
  while (detail::log_power_bound(x, n_max + 1) >= log_eps) ++n_max;

  const std::int64_t n_start = n_max + static_cast<std::int64_t>(std::ceil(10.0 + 2.0 * std::sqrt(x)));
  std::vector<double> j(static_cast<std::size_t>(n_start) + 2, 0.0);
  j[static_cast<std::size_t>(n_start)] = 1.0;
  constexpr double kBig = 1e250;
  for (std::int64_t n = n_start; n >= 1; --n) {
    const auto un = static_cast<std::size_t>(n);
    double next = (2.0 * static_cast<double>(n) / x) * j[un] - j[un + 1];
    if (std::abs(next) > kBig) {
      for (std::size_t k = un; k < j.size(); ++k) j[k] /= kBig;
      next /= kBig;
    }
    j[un - 1] = next;
  }
  double norm = j[0];
  for (std::size_t s = 2; s < j.size(); s += 2) norm += 2.0 * j[s];

  BesselTable table;
  table.t_ = t;
  table.x_ = x;
  table.values_.resize(static_cast<std::size_t>(n_max) + 1);
  for (std::size_t n = 0; n < table.values_.size(); ++n) table.values_[n] = j[n] / norm;
  table.tail_bound_ = std::exp(detail::log_power_bound(x, n_max + 1));
  return table;
}

/// J_n(2 sqrt t) from a table; zero (within tail_bound) past n_max.
inline double bessel_j(std::int64_t n, const BesselTable& table) noexcept { return table(n); }

/// Discrete Bessel kernel by the difference quotient
/// sqrt(t) (J_x J_{y+1} - J_{x+1} J_y) / (x - y); requires x != y.
inline double kernel_difference_quotient(std::int64_t x, std::int64_t y, const BesselTable& j) {
  if (x == y) throw Error(ErrorCode::BadParameter, "difference-quotient kernel needs x != y");
  return std::sqrt(j.t()) * (j(x) * j(y + 1) - j(x + 1) * j(y)) / static_cast<double>(x - y);
}

/// Discrete Bessel kernel by the series sum_{s>=1} J_{x+s} J_{y+s}.
///
/// The diagonal at x <= -n_max uses the complement 1 - sum_{m<=x} J_m^2.
inline double kernel(std::int64_t x, std::int64_t y, const BesselTable& j) {
  const std::int64_t n_max = j.n_max();
  if (x == y) {
    double s = 0.0;
    if (x <= -n_max) {
      for (std::int64_t m = -x; m <= n_max; ++m) s += j(m) * j(m);
      return std::clamp(1.0 - s, 0.0, 1.0);
    }
    for (std::int64_t m = n_max; m > x; --m) s += j(m) * j(m);
    return std::clamp(s, 0.0, 1.0);
  }
  const std::int64_t lo = std::max<std::int64_t>(1, -n_max - std::min(x, y));
  const std::int64_t hi = n_max - std::max(x, y);
  double s = 0.0;
  for (std::int64_t k = hi; k >= lo; --k) s += j(x + k) * j(y + k);
  return s;
}

/// Correlation function rho(X) = det[K(x_a, x_b)] for distinct points, |X| <= 12.
inline double correlation(std::span<const std::int64_t> points, const BesselTable& j) {
  std::vector<std::int64_t> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end());
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
    throw Error(ErrorCode::DuplicatePoints, "correlation points must be distinct");
  if (pts.size() > 12) throw Error(ErrorCode::BadParameter, "correlation supports at most 12 points");
  const std::size_t s = pts.size();
  if (s == 0) return 1.0;
  std::vector<double> m(s * s);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = a; b < s; ++b) m[a * s + b] = m[b * s + a] = kernel(pts[a], pts[b], j);

  double det = 1.0;
  for (std::size_t col = 0; col < s; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < s; ++r)
      if (std::abs(m[r * s + col]) > std::abs(m[piv * s + col])) piv = r;
    if (m[piv * s + col] == 0.0) return 0.0;
    if (piv != col) {
      for (std::size_t c = 0; c < s; ++c) std::swap(m[piv * s + c], m[col * s + c]);
      det = -det;
    }
    const double d = m[col * s + col];
    det *= d;
    for (std::size_t r = col + 1; r < s; ++r) {
      const double f = m[r * s + col] / d;
      for (std::size_t c = col; c < s; ++c) m[r * s + c] -= f * m[col * s + c];
    }
  }
  return det;
}

/// sum_{m in eps Z + k} J_m(x) exp(i m tau), truncated to the table's orders.
inline std::complex<double> residue_class_bessel_sum(const BesselTable& j, std::int64_t eps, std::int64_t k,
                                                     double tau) {
  std::complex<double> s{0.0, 0.0};
  const std::int64_t n_max = j.n_max();
  std::int64_t start = -n_max + (((k + n_max) % eps) + eps) % eps;  // smallest m >= -n_max, m == k
  for (std::int64_t m = start; m <= n_max; m += eps)
    s += j(m) * std::polar(1.0, static_cast<double>(m) * tau);
  return s;
}

/// (1/eps) sum_{omega in Omega_eps} exp i(-k omega + x sin(omega + tau)),
/// Omega_eps = {2 l pi / eps : -ceil(eps/2) < l <= floor(eps/2)}.
inline std::complex<double> residue_class_root_sum(double x, std::int64_t eps, std::int64_t k, double tau) {
  std::complex<double> s{0.0, 0.0};
  const std::int64_t lo = -((eps + 1) / 2) + 1;
  const std::int64_t hi = eps / 2;
  for (std::int64_t l = lo; l <= hi; ++l) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(eps);
    s += std::polar(1.0, -static_cast<double>(k) * w + x * std::sin(w + tau));
  }
  return s / static_cast<double>(eps);
}

}  // namespace ecore
