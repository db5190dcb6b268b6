#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinbound/compensated_sum.hpp"
#include "steinbound/pmf.hpp"

namespace steinbound {

/// Truncation level used for infinite-support laws unless a caller says otherwise.
inline constexpr double kDefaultTruncationEps = 1e-12;

/// Relative distance below which a real parameter counts as the nearest integer.
inline constexpr double kIntegerSnap = 1e-9;

inline bool is_near_integer(double x) {
  return std::abs(x - std::round(x)) <= kIntegerSnap * std::max(1.0, std::abs(x));
}

inline double tolerant_floor(double x) { return is_near_integer(x) ? std::round(x) : std::floor(x); }
inline double tolerant_ceil(double x) { return is_near_integer(x) ? std::round(x) : std::ceil(x); }

/// Pseudo-binomial PB(N, p): mass proportional to C(N, k) p^k q^(N-k) on
/// {0, ..., floor(N)}, with C(N, k) = N (N-1) ... (N-k+1) / k! and real N > 1.
class PseudoBinomialParams {
 public:
  PseudoBinomialParams(double n, double p) : n_(n), p_(p), q_(1.0 - p) {
    if (!(n > 1.0) || !std::isfinite(n)) {
      throw std::invalid_argument("PseudoBinomialParams: N must be > 1, got " + std::to_string(n));
    }
    if (!(p > 0.0 && p < 1.0)) {
      throw std::invalid_argument("PseudoBinomialParams: p must lie in (0, 1), got " + std::to_string(p));
    }
    floor_n_ = static_cast<std::size_t>(tolerant_floor(n));
    const auto logs = log_terms();
    const double top = *std::max_element(logs.begin(), logs.end());
    std::vector<double> scaled;
    scaled.reserve(logs.size());
    for (double l : logs) scaled.push_back(std::exp(l - top));
    // Largest term first.
    std::sort(scaled.begin(), scaled.end(), [](double a, double b) { return a > b; });
    log_delta_ = top + std::log(compensated_sum(scaled));
    delta_ = std::exp(log_delta_);
  }

  double n() const { return n_; }
  double p() const { return p_; }
  double q() const { return q_; }
  /// Normalizer sum_{k <= floor(N)} C(N, k) p^k q^(N-k); 1 for integer N.
  double delta() const { return delta_; }
  double log_delta() const { return log_delta_; }
  std::size_t floor_n() const { return floor_n_; }
  std::size_t ceil_n() const { return static_cast<std::size_t>(tolerant_ceil(n_)); }
  bool integer_n() const { return is_near_integer(n_); }

  /// log(C(N, k) p^k q^(N-k)) for k = 0, ..., floor(N).
  std::vector<double> log_terms() const {
    std::vector<double> out;
    out.reserve(floor_n_ + 1);
    const double lg_n1 = std::lgamma(n_ + 1.0);
    for (std::size_t k = 0; k <= floor_n_; ++k) {
      const double kd = static_cast<double>(k);
      // Every factor N - j + 1 with j <= k is positive here.
      if (!(n_ - kd + 1.0 > 0.0)) throw std::logic_error("PseudoBinomialParams: non-positive factor");
      out.push_back(lg_n1 - std::lgamma(n_ - kd + 1.0) - std::lgamma(kd + 1.0) + kd * std::log(p_) +
                    (n_ - kd) * std::log(q_));
    }
    return out;
  }

 private:
  double n_;
  double p_;
  double q_;
  std::size_t floor_n_ = 0;
  double delta_ = 1.0;
  double log_delta_ = 0.0;
};

/// Negative binomial NB(r, pbar): C(r+k-1, k) pbar^r qbar^k on {0, 1, ...}.
class NegBinomialParams {
 public:
  NegBinomialParams(double r, double pbar) : r_(r), pbar_(pbar), qbar_(1.0 - pbar) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("NegBinomialParams: r must be > 0, got " + std::to_string(r));
    }
    if (!(pbar > 0.0 && pbar < 1.0)) {
      throw std::invalid_argument("NegBinomialParams: pbar must lie in (0, 1), got " +
                                  std::to_string(pbar));
    }
  }

  double r() const { return r_; }
  double pbar() const { return pbar_; }
  double qbar() const { return qbar_; }
  double mean() const { return r_ * qbar_ / pbar_; }
  double variance() const { return r_ * qbar_ / (pbar_ * pbar_); }

 private:
  double r_;
  double pbar_;
  double qbar_;
};

namespace detail {

inline void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("truncation eps must lie in (0, 1)");
}

/// Builds a truncated pmf from log P(0) and a ratio r(k) = P(k+1) / P(k).
/// `ratio_limit` must bound r(k) from above for all large k (and be < 1), so
/// that the unseen tail after the last generated term is at most
/// P(k) rho / (1 - rho) with rho = max(r(k), ratio_limit).
template <class Ratio>
FinitePmf truncated_from_ratio(double log_p0, Ratio ratio, double ratio_limit, double eps) {
  check_eps(eps);
  constexpr double kNegligible = 1e-20;
  constexpr std::size_t kMaxTerms = 50'000'000;
  std::vector<double> probs;
  double log_p = log_p0;
  double rest = 0.0;
  for (std::size_t k = 0;; ++k) {
    if (k >= kMaxTerms) throw std::runtime_error("truncated pmf: support exceeds term limit");
    const double pk = std::exp(log_p);
    probs.push_back(pk);
    const double r = ratio(k);
    const double rho = std::max(r, ratio_limit);
    if (rho < 1.0) {
      rest = pk * rho / (1.0 - rho);
      if (rest < kNegligible && r < 1.0) break;
    }
    if (r <= 0.0) break;
    log_p += std::log(r);
  }
  // tail_after[k] = mass strictly above k, including the unseen remainder.
  std::vector<double> tail_after(probs.size());
  CompensatedSum tail(rest);
  for (std::size_t k = probs.size(); k-- > 0;) {
    tail_after[k] = tail.value();
    tail += probs[k];
  }
  std::size_t cut = probs.size() - 1;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (tail_after[k] <= eps) {
      cut = k;
      break;
    }
  }
  probs.resize(cut + 1);
  return FinitePmf(std::move(probs), tail_after[cut]);
}

}  // namespace detail

/// PB(N, p) as an exact pmf on {0, ..., floor(N)}.
inline FinitePmf pb_pmf(const PseudoBinomialParams& params) {
  const auto logs = params.log_terms();
  std::vector<double> probs;
  probs.reserve(logs.size());
  for (double l : logs) probs.push_back(std::exp(l - params.log_delta()));
  return FinitePmf(std::move(probs));
}

/// NB(r, pbar) truncated where the remaining tail mass drops to eps; the tail
/// is kept as the mass deficit.
inline FinitePmf nb_pmf(const NegBinomialParams& params, double eps = kDefaultTruncationEps) {
  const double r = params.r();
  const double qbar = params.qbar();
  return detail::truncated_from_ratio(
      r * std::log(params.pbar()),
      [=](std::size_t k) {
        const double kd = static_cast<double>(k);
        return qbar * (r + kd) / (kd + 1.0);
      },
      qbar, eps);
}

inline FinitePmf bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: p must lie in [0, 1]");
  return FinitePmf({1.0 - p, p});
}

/// Geometric law on {0, 1, ...}: P(k) = pbar qbar^k, tail after K is qbar^(K+1).
inline FinitePmf geometric(double pbar, double eps = kDefaultTruncationEps) {
  if (!(pbar > 0.0 && pbar <= 1.0)) throw std::invalid_argument("geometric: pbar must lie in (0, 1]");
  detail::check_eps(eps);
  if (pbar == 1.0) return FinitePmf();
  const double qbar = 1.0 - pbar;
  std::size_t cut = 0;
  while (std::pow(qbar, static_cast<double>(cut + 1)) > eps) ++cut;
  std::vector<double> probs(cut + 1);
  for (std::size_t k = 0; k <= cut; ++k) probs[k] = pbar * std::pow(qbar, static_cast<double>(k));
  return FinitePmf(std::move(probs), std::pow(qbar, static_cast<double>(cut + 1)));
}

inline FinitePmf poisson(double lambda, double eps = kDefaultTruncationEps) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("poisson: lambda must be finite and >= 0");
  }
  detail::check_eps(eps);
  if (lambda == 0.0) return FinitePmf();
  return detail::truncated_from_ratio(
      -lambda, [=](std::size_t k) { return lambda / (static_cast<double>(k) + 1.0); }, 0.0, eps);
}

}  // namespace steinbound
