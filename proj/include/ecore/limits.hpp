#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "ecore/bessel.hpp"
#include "ecore/error.hpp"
#include "ecore/random.hpp"

namespace ecore {

namespace detail {

/// cot(theta) with theta reduced to (0, pi) first.
inline double cot_reduced(double theta) {
  constexpr double pi = std::numbers::pi;
  double r = std::fmod(theta, pi);
  if (r <= 0.0) r += pi;
  return std::cos(r) / std::sin(r);
}

inline std::int64_t positive_mod(std::int64_t a, std::int64_t e) {
  const std::int64_t r = a % e;
  return r < 0 ? r + e : r;
}

}  // namespace detail

/// Limiting covariance entry b_ij of e sqrt(pi/2) x / t^{1/4}.
inline double covariance_entry(std::int64_t i, std::int64_t j, std::int64_t e) {
  require_modulus(e);
  constexpr double pi = std::numbers::pi;
  const auto ed = static_cast<double>(e);
  const std::int64_t k = detail::positive_mod(j - i, e);
  if (k == 0) return 2.0 * detail::cot_reduced(pi / (2.0 * ed));
  const auto kd = static_cast<double>(k);
  return detail::cot_reduced((kd + 0.5) * pi / ed) - detail::cot_reduced((kd - 0.5) * pi / ed);
}

/// Closed-form eigenvalue 2e sin(k pi / e) of B.
inline double covariance_eigenvalue(std::int64_t k, std::int64_t e) {
  return 2.0 * static_cast<double>(e) * std::sin(static_cast<double>(k) * std::numbers::pi / static_cast<double>(e));
}

/// Eigenvalue of the circulant B from its first row: sum_j b_j cos(2 pi k j / e).
inline double covariance_eigenvalue_cosine_sum(std::int64_t k, std::int64_t e) {
  double s = 0.0;
  for (std::int64_t j = 0; j < e; ++j)
    s += covariance_entry(0, j, e) *
         std::cos(2.0 * std::numbers::pi * static_cast<double>(k * j) / static_cast<double>(e));
  return s;
}

struct LimitModel {
  std::int64_t e = 2;
  std::vector<double> b;            // row-major e x e
  std::vector<double> eigenvalues;  // lambda_k, k = 0..e-1
  std::vector<double> scales;       // sin(k pi / e), k = 1..e-1

  double operator()(std::int64_t i, std::int64_t j) const { return b[static_cast<std::size_t>(i * e + j)]; }
};

inline LimitModel limit_model(std::int64_t e) {
  require_modulus(e);
  LimitModel m;
  m.e = e;
  m.b.resize(static_cast<std::size_t>(e * e));
  for (std::int64_t i = 0; i < e; ++i)
    for (std::int64_t j = 0; j < e; ++j) m.b[static_cast<std::size_t>(i * e + j)] = covariance_entry(i, j, e);
  for (std::int64_t k = 0; k < e; ++k) {
    const double closed = covariance_eigenvalue(k, e);
    if (std::abs(closed - covariance_eigenvalue_cosine_sum(k, e)) > 1e-10 * std::max(1.0, std::abs(closed)))
      throw std::logic_error("eigenvalue closed form disagrees with the cosine sum");
    m.eigenvalues.push_back(closed);
  }
  for (std::int64_t k = 1; k < e; ++k)
    m.scales.push_back(std::sin(static_cast<double>(k) * std::numbers::pi / static_cast<double>(e)));
  return m;
}

/// L_k from its lattice-sum definition over Omega_{2e} = {l pi / e : -e < l <= e}.
inline std::complex<double> limd(std::int64_t k, std::int64_t e) {
  require_modulus(e);
  if (detail::positive_mod(k, e) == 0) throw Error(ErrorCode::BadResidue, "L_k needs k not divisible by e");
  constexpr double pi = std::numbers::pi;
  const auto ed = static_cast<double>(e);
  const auto kd = static_cast<double>(k);
  std::complex<double> s{0.0, 0.0};
  for (std::int64_t l = -e + 1; l <= e; ++l) {
    const double w = static_cast<double>(l) * pi / ed;
    s += w * std::polar(1.0, 2.0 * kd * w);
  }
  const std::int64_t e_half = (e + 1) / 2;
  for (std::int64_t n = 1; n <= e_half - 1; ++n) {
    const double w = static_cast<double>(n) * pi / ed;
    s += 2.0 * pi * (1.0 - std::sin(w)) * std::polar(1.0, 2.0 * kd * w);
  }
  const double pre = 2.0 / (ed * pi);
  return pre * pre * s;
}

/// Re L_k = (2 / (pi e^2)) [cot((k - 1/2) pi / e) - cot((k + 1/2) pi / e)].
inline double re_limd(std::int64_t k, std::int64_t e) {
  require_modulus(e);
  if (detail::positive_mod(k, e) == 0) throw Error(ErrorCode::BadResidue, "L_k needs k not divisible by e");
  constexpr double pi = std::numbers::pi;
  const auto ed = static_cast<double>(e);
  const auto kd = static_cast<double>(k);
  return 2.0 / (pi * ed * ed) * (detail::cot_reduced((kd - 0.5) * pi / ed) - detail::cot_reduced((kd + 0.5) * pi / ed));
}

/// First-order asymptotic Cov_t(x_i, x_j) ~ (2 sqrt t / (pi e^2)) b_ij; valid for i == j too.
inline double cov_asymptotic(std::int64_t i, std::int64_t j, std::int64_t e, double t) {
  const auto ed = static_cast<double>(e);
  return 2.0 * std::sqrt(t) / (std::numbers::pi * ed * ed) * covariance_entry(i, j, e);
}

/// E_t x_i = sum_{s >= i+1} J_s^2 - sum_{s=-i}^{i} sum_{k >= 1} J_{ek+s}^2.
inline double et_xi_bessel(std::int64_t i, std::int64_t e, const BesselTable& j) {
  require_modulus(e);
  if (i < 0 || i >= e) throw Error(ErrorCode::BadParameter, "residue index must be in [0, e)");
  const std::int64_t n_max = j.n_max();
  double first = 0.0;
  for (std::int64_t s = n_max; s >= i + 1; --s) first += j(s) * j(s);
  double second = 0.0;
  for (std::int64_t s = -i; s <= i; ++s)
    for (std::int64_t m = e + s; m <= n_max; m += e) second += j(m) * j(m);
  return first - second;
}

namespace detail {

inline double cov_offdiag_truncated(std::int64_t i, std::int64_t j, std::int64_t e, const BesselTable& bt,
                                    std::int64_t range) {
  // Collect J on [-range, range+1] once.
  std::vector<double> jv(static_cast<std::size_t>(2 * range + 2));
  for (std::int64_t m = -range; m <= range + 1; ++m) jv[static_cast<std::size_t>(m + range)] = bt(m);
  auto at = [&](std::int64_t m) { return jv[static_cast<std::size_t>(m + range)]; };
  const double st = std::sqrt(bt.t());
  const std::int64_t m0 = -range + positive_mod(i + range, e);
  const std::int64_t n0 = -range + positive_mod(j + range, e);
  double s = 0.0;
  for (std::int64_t m = m0; m <= range; m += e) {
    const double jm = at(m);
    const double jm1 = at(m + 1);
    for (std::int64_t n = n0; n <= range; n += e) {
      const double k = st * (jm * at(n + 1) - jm1 * at(n)) / static_cast<double>(m - n);
      s += k * k;
    }
  }
  return -s;
}

}  // namespace detail

/// Cov_t(x_i, x_j) = -sum_{m in eZ+i} sum_{n in eZ+j} K(m,n)^2 for i != j; the
/// diagonal is -sum_{j != i} Cov_t(x_i, x_j). The window [-M, M] starts at
/// M = ceil(2 sqrt t) + 40 and doubles until the value moves by < 1e-8 sqrt t.
inline double cov_xi_kernel(std::int64_t i, std::int64_t j, std::int64_t e, const BesselTable& bt) {
  require_modulus(e);
  i = detail::positive_mod(i, e);
  j = detail::positive_mod(j, e);
  if (i == j) {
    double s = 0.0;
    for (std::int64_t k = 0; k < e; ++k)
      if (k != i) s -= cov_xi_kernel(i, k, e, bt);
    return s;
  }
  const double tol = 1e-8 * std::sqrt(bt.t());
  std::int64_t range = static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(bt.t()))) + 40;
  double prev = detail::cov_offdiag_truncated(i, j, e, bt, range);
  for (;;) {
    range *= 2;
    const double cur = detail::cov_offdiag_truncated(i, j, e, bt, range);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
}

/// Law of sum_{k=1}^{e-1} Gamma(1/2, sin(k pi / e)) (shape, scale).
struct GammaSumLaw {
  std::int64_t e = 2;
  std::vector<double> scales;

  double mean() const {
    double s = 0.0;
    for (double v : scales) s += 0.5 * v;
    return s;
  }
  double variance() const {
    double s = 0.0;
    for (double v : scales) s += 0.5 * v * v;
    return s;
  }
};

inline GammaSumLaw gamma_sum_law(std::int64_t e) {
  require_modulus(e);
  GammaSumLaw law;
  law.e = e;
  for (std::int64_t k = 1; k < e; ++k)
    law.scales.push_back(std::sin(static_cast<double>(k) * std::numbers::pi / static_cast<double>(e)));
  return law;
}

/// Gamma(1/2, theta) = (theta / 2) Z^2 for each summand.
inline double gamma_sum_sample(const GammaSumLaw& law, Substream& rng) {
  double s = 0.0;
  for (double theta : law.scales) {
    const double z = rng.normal();
    s += 0.5 * theta * z * z;
  }
  return s;
}

inline constexpr std::int64_t kGammaReferenceDraws = 10'000'000;
inline constexpr std::uint64_t kGammaReferenceSeed = 0x67616d6d61737566ULL;

/// Reference CDF of a GammaSumLaw built from a sorted exact sample.
///
/// Uniform error against the true CDF is at most the DKW radius at
/// confidence 1 - 1e-6 plus 1/N for the linear interpolation.
class GammaSumReference {
 public:
  GammaSumReference(GammaSumLaw law, std::int64_t draws = kGammaReferenceDraws,
                    std::uint64_t seed = kGammaReferenceSeed)
      : law_(std::move(law)) {
    if (draws < 1) throw Error(ErrorCode::BadParameter, "reference needs at least one draw");
    sorted_.resize(static_cast<std::size_t>(draws));
    Substream rng = substream(seed, static_cast<std::uint64_t>(law_.e));
    for (auto& v : sorted_) v = gamma_sum_sample(law_, rng);
    std::sort(sorted_.begin(), sorted_.end());
  }

  const GammaSumLaw& law() const noexcept { return law_; }
  std::int64_t draws() const noexcept { return static_cast<std::int64_t>(sorted_.size()); }

  double certified_error() const noexcept {
    const auto n = static_cast<double>(sorted_.size());
    return std::sqrt(std::log(2.0 / 1e-6) / (2.0 * n)) + 1.0 / n;
  }

  /// Piecewise-linear through (0,0) and (s_(k), k/N).
  double cdf(double x) const noexcept {
    if (!(x > 0.0)) return 0.0;
    const auto n = static_cast<double>(sorted_.size());
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    const auto k = static_cast<std::size_t>(it - sorted_.begin());
    if (k == sorted_.size()) return 1.0;
    const double hi = sorted_[k];
    const double lo = k == 0 ? 0.0 : sorted_[k - 1];
    const double frac = hi > lo ? (x - lo) / (hi - lo) : 0.0;
    return (static_cast<double>(k) + frac) / n;
  }

 private:
  GammaSumLaw law_;
  std::vector<double> sorted_;
};

/// Shared reference for the most recently requested e (one 10^7 table at a time).
inline std::shared_ptr<const GammaSumReference> gamma_sum_reference(const GammaSumLaw& law) {
  static std::mutex mu;
  static std::shared_ptr<const GammaSumReference> cached;
  std::lock_guard<std::mutex> lock(mu);
  if (!cached || cached->law().e != law.e) cached = std::make_shared<const GammaSumReference>(law);
  return cached;
}

inline double gamma_sum_cdf(const GammaSumLaw& law, double x) { return gamma_sum_reference(law)->cdf(x); }

/// E_t |core| ~ (2 sqrt t / pi) cot(pi / 2e).
inline double expected_core_size(double t, std::int64_t e) {
  require_modulus(e);
  return 2.0 * std::sqrt(t) / std::numbers::pi * detail::cot_reduced(std::numbers::pi / (2.0 * static_cast<double>(e)));
}

/// Var_t |core| ~ 4 e t / pi^2.
inline double variance_core_size(double t, std::int64_t e) {
  require_modulus(e);
  return 4.0 * static_cast<double>(e) * t / (std::numbers::pi * std::numbers::pi);
}

/// Closed form of sum_{n in eZ+k} exp(2inx)/n on (-pi, pi) off the lattice pi Z / e:
/// (i/e) sum_{omega} exp(2ik omega)(omega - sgn(omega - x) pi).
inline std::complex<double> sumexp_closed(std::int64_t k, std::int64_t e, double x) {
  require_modulus(e);
  if (detail::positive_mod(k, e) == 0) throw Error(ErrorCode::BadResidue, "sumexp needs k not divisible by e");
  constexpr double pi = std::numbers::pi;
  if (!(x > -pi && x < pi)) throw Error(ErrorCode::BadParameter, "sumexp needs x in (-pi, pi)");
  const auto ed = static_cast<double>(e);
  for (std::int64_t l = -e; l <= e; ++l)
    if (std::abs(x - static_cast<double>(l) * pi / ed) < 1e-9)
      throw Error(ErrorCode::OnLattice, "x is within 1e-9 of a lattice point");
  std::complex<double> s{0.0, 0.0};
  for (std::int64_t l = -e + 1; l <= e; ++l) {
    const double w = static_cast<double>(l) * pi / ed;
    const double sgn = w > x ? 1.0 : -1.0;
    s += std::polar(1.0, 2.0 * static_cast<double>(k) * w) * (w - sgn * pi);
  }
  return std::complex<double>(0.0, 1.0 / ed) * s;
}

/// Limit shape Omega(s) = (2/pi)(s arcsin(s/2) + sqrt(4 - s^2)) on |s| <= 2, |s| outside.
inline double limit_shape_omega(double s) {
  const double a = std::abs(s);
  if (a >= 2.0) return a;
  return 2.0 / std::numbers::pi * (s * std::asin(s / 2.0) + std::sqrt(4.0 - s * s));
}

}  // namespace ecore
