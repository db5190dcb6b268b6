#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinbound/compensated_sum.hpp"

namespace steinbound {

/// Probability mass function on {0, ..., K}.
///
/// Supports infinite laws by truncation: `mass_deficit()` holds the tail mass
/// that was cut off and is never renormalized away, so that downstream bounds
/// can account for it. Trailing zero entries are stripped on construction.
class FinitePmf {
 public:
  static constexpr double kMassTolerance = 1e-12;

  /// Point mass at 0.
  FinitePmf() : probs_{1.0} {}

  explicit FinitePmf(std::vector<double> probs, double mass_deficit = 0.0)
      : probs_(std::move(probs)), deficit_(mass_deficit) {
    if (probs_.empty()) throw std::invalid_argument("FinitePmf: empty probability vector");
    if (!(deficit_ >= 0.0) || !std::isfinite(deficit_)) {
      throw std::invalid_argument("FinitePmf: mass deficit must be finite and non-negative");
    }
    for (double& p : probs_) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0 + kMassTolerance) {
        throw std::invalid_argument("FinitePmf: entry outside [0, 1]: " + std::to_string(p));
      }
      p = std::min(p, 1.0);
    }
    while (probs_.size() > 1 && probs_.back() == 0.0) probs_.pop_back();
    const double total = compensated_sum(probs_) + deficit_;
    if (std::abs(total - 1.0) > kMassTolerance) {
      throw std::invalid_argument("FinitePmf: total mass " + std::to_string(total) +
                                  " differs from 1");
    }
  }

  static FinitePmf point_mass(std::size_t at) {
    std::vector<double> v(at + 1, 0.0);
    v[at] = 1.0;
    return FinitePmf(std::move(v));
  }

  /// P(X = k); zero beyond the stored support.
  double operator[](std::size_t k) const { return k < probs_.size() ? probs_[k] : 0.0; }

  std::span<const double> probs() const { return probs_; }
  /// Largest stored support point K.
  std::size_t max_support() const { return probs_.size() - 1; }
  std::size_t size() const { return probs_.size(); }
  double mass_deficit() const { return deficit_; }

  friend bool operator==(const FinitePmf&, const FinitePmf&) = default;

 private:
  std::vector<double> probs_;
  double deficit_ = 0.0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  /// Raw third moment E[X^3].
  double third_moment = 0.0;
};

/// Law of X + Y for independent X ~ a, Y ~ b.
inline FinitePmf convolve(const FinitePmf& a, const FinitePmf& b) {
  const std::size_t n = a.size() + b.size() - 1;
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    CompensatedSum s;
    const std::size_t lo = k >= b.size() ? k - (b.size() - 1) : 0;
    const std::size_t hi = std::min(k, a.size() - 1);
    for (std::size_t j = lo; j <= hi; ++j) s += a[j] * b[k - j];
    out[k] = s.value();
  }
  // Mass outside the product of retained supports.
  const double da = a.mass_deficit();
  const double db = b.mass_deficit();
  return FinitePmf(std::move(out), da + db - da * db);
}

/// Law of w * X.
inline FinitePmf dilate(const FinitePmf& a, std::size_t w) {
  if (w == 0) throw std::invalid_argument("dilate: weight must be at least 1");
  if (w == 1) return a;
  std::vector<double> out(w * a.max_support() + 1, 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) out[w * k] = a[k];
  return FinitePmf(std::move(out), a.mass_deficit());
}

/// Law of X + s.
inline FinitePmf shift(const FinitePmf& a, std::size_t s) {
  std::vector<double> out(a.size() + s, 0.0);
  std::copy(a.probs().begin(), a.probs().end(), out.begin() + static_cast<std::ptrdiff_t>(s));
  return FinitePmf(std::move(out), a.mass_deficit());
}

/// sup_A |P_a(A) - P_b(A)| = 1/2 sum_k |a[k] - b[k]| over the stored supports.
inline double tv_distance(const FinitePmf& a, const FinitePmf& b) {
  const std::size_t n = std::max(a.size(), b.size());
  CompensatedSum s;
  for (std::size_t k = 0; k < n; ++k) s += std::abs(a[k] - b[k]);
  return 0.5 * s.value();
}

/// D(X) = 2 d_TV(L(X), L(X + 1)) = sum_k |a[k-1] - a[k]| with a[-1] = 0.
inline double smoothness_d(const FinitePmf& a) {
  CompensatedSum s;
  for (std::size_t k = 0; k <= a.size(); ++k) {
    const double prev = k == 0 ? 0.0 : a[k - 1];
    s += std::abs(a[k] - prev);
  }
  // Same summation order as tv_distance(a, shift(a, 1)), so the two agree bitwise.
  return s.value();
}

inline Moments moments(const FinitePmf& a) {
  CompensatedSum m1;
  CompensatedSum m3;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double x = static_cast<double>(k);
    m1 += x * a[k];
    m3 += x * x * x * a[k];
  }
  const double mean = m1.value();
  CompensatedSum var;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(k) - mean;
    var += d * d * a[k];
  }
  return {mean, var.value(), m3.value()};
}

/// E[(X - z)^+].
inline double expect_positive_part(const FinitePmf& a, double z) {
  if (!(z >= 0.0)) throw std::invalid_argument("expect_positive_part: z must be >= 0");
  CompensatedSum s;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double excess = static_cast<double>(k) - z;
    if (excess > 0.0) s += excess * a[k];
  }
  return s.value();
}

/// Cuts the support at the smallest K' whose removed tail mass is at most eps.
/// Removed mass is added to the deficit.
inline FinitePmf truncate(const FinitePmf& a, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("truncate: eps must lie in (0, 1)");
  // tails[k] = mass strictly above k.
  std::vector<double> tails(a.size(), 0.0);
  CompensatedSum tail;
  for (std::size_t k = a.size(); k-- > 0;) {
    tails[k] = tail.value();
    tail += a[k];
  }
  std::size_t cut = a.max_support();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (tails[k] <= eps) {
      cut = k;
      break;
    }
  }
  std::vector<double> kept(a.probs().begin(), a.probs().begin() + static_cast<std::ptrdiff_t>(cut + 1));
  return FinitePmf(std::move(kept), a.mass_deficit() + tails[cut]);
}

}  // namespace steinbound
