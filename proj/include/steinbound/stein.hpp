#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "steinbound/compensated_sum.hpp"
#include "steinbound/distributions.hpp"
#include "steinbound/error.hpp"
#include "steinbound/pmf.hpp"

namespace steinbound {

enum class TargetKind { PseudoBinomial, NegBinomial, Generic };

inline const char* to_string(TargetKind k) {
  switch (k) {
    case TargetKind::PseudoBinomial: return "pseudo-binomial";
    case TargetKind::NegBinomial: return "negative-binomial";
    case TargetKind::Generic: return "generic";
  }
  return "?";
}

/// Coefficients of the operator (Ag)(k) = (alpha + beta k) g(k+1) - k g(k).
class SteinCoeffs {
 public:
  explicit SteinCoeffs(const PseudoBinomialParams& pb)
      : alpha_(pb.n() * pb.p() / pb.q()), beta_(-pb.p() / pb.q()), target_(pb) {}

  explicit SteinCoeffs(const NegBinomialParams& nb)
      : alpha_(nb.r() * nb.qbar()), beta_(nb.qbar()), target_(nb) {}

  static SteinCoeffs generic(double alpha, double beta) { return SteinCoeffs(alpha, beta); }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  TargetKind kind() const {
    if (std::holds_alternative<PseudoBinomialParams>(target_)) return TargetKind::PseudoBinomial;
    if (std::holds_alternative<NegBinomialParams>(target_)) return TargetKind::NegBinomial;
    return TargetKind::Generic;
  }

  const PseudoBinomialParams& pb() const {
    if (const auto* p = std::get_if<PseudoBinomialParams>(&target_)) return *p;
    throw std::logic_error("SteinCoeffs: not a pseudo-binomial target");
  }
  const NegBinomialParams& nb() const {
    if (const auto* p = std::get_if<NegBinomialParams>(&target_)) return *p;
    throw std::logic_error("SteinCoeffs: not a negative binomial target");
  }

  /// alpha / (1 - beta).
  double mean() const { return alpha_ / (1.0 - beta_); }
  /// alpha / (1 - beta)^2.
  double variance() const { return alpha_ / ((1.0 - beta_) * (1.0 - beta_)); }

  /// alpha + beta k.
  double coefficient(std::size_t k) const { return alpha_ + beta_ * static_cast<double>(k); }

 private:
  SteinCoeffs(double alpha, double beta) : alpha_(alpha), beta_(beta) {}

  double alpha_;
  double beta_;
  std::variant<std::monostate, PseudoBinomialParams, NegBinomialParams> target_;
};

/// Matches the first two moments: pseudo-binomial when m > v, negative
/// binomial when v > m.
inline SteinCoeffs fit_coeffs(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0) || !std::isfinite(mean) || !std::isfinite(variance)) {
    throw std::invalid_argument("fit_coeffs: mean and variance must be finite and positive");
  }
  if (mean == variance) {
    throw InfeasibleModel("fit_coeffs: mean equals variance, neither family matches");
  }
  if (mean > variance) {
    const double n = mean * mean / (mean - variance);
    if (!(n > 1.0)) {
      throw InfeasibleModel("fit_coeffs: fitted pseudo-binomial N = " + std::to_string(n) + " is not > 1");
    }
    return SteinCoeffs(PseudoBinomialParams(n, (mean - variance) / mean));
  }
  return SteinCoeffs(NegBinomialParams(mean * mean / (variance - mean), mean / variance));
}

/// The pmf the coefficients characterize.
inline FinitePmf target_pmf(const SteinCoeffs& c, double eps = kDefaultTruncationEps) {
  switch (c.kind()) {
    case TargetKind::PseudoBinomial: return pb_pmf(c.pb());
    case TargetKind::NegBinomial: return nb_pmf(c.nb(), eps);
    case TargetKind::Generic: break;
  }
  throw std::invalid_argument("target_pmf: generic coefficients carry no target law");
}

/// (Ag)(k) for a callable g on the non-negative integers.
template <class G>
double stein_apply(const SteinCoeffs& c, G&& g, std::size_t k) {
  return c.coefficient(k) * g(k + 1) - static_cast<double>(k) * g(k);
}

struct SteinSolution {
  /// g(0), ..., g(K+1) with g(0) = 0.
  std::vector<double> g;
  double expected_f = 0.0;
  /// g(K+1) was set to g(K) because the coefficient at K vanishes.
  bool top_by_continuation = false;

  /// g(k), zero outside the stored range.
  double operator()(std::size_t k) const { return k < g.size() ? g[k] : 0.0; }

  /// max_k |g(k+1) - g(k)| over the stored range.
  double max_abs_delta() const {
    double best = 0.0;
    for (std::size_t k = 0; k + 1 < g.size(); ++k) best = std::max(best, std::abs(g[k + 1] - g[k]));
    return best;
  }
};

namespace detail {
inline constexpr double kTinyDivisor = 1e-300;

inline double checked_divide(double num, double den, const char* what) {
  if (!(den > kTinyDivisor)) {
    throw std::domain_error(std::string("solve_stein: ") + what + " divisor " + std::to_string(den) +
                            " too small");
  }
  return num / den;
}
}  // namespace detail

/// Solves Ag = f - Ef(X) for X ~ target, g(0) = 0, f given on {0, ..., K}.
///
/// For the two named families g(k) k P(k) equals the head sum
/// sum_{i<k} (f(i) - Ef) P(i), or equivalently minus the tail sum from k on
/// (the truncated tail contributing -Ef times the mass deficit). Head sums are
/// used up to the mode and tail sums above it. Generic coefficients use the
/// forward recurrence g(k+1) = (k g(k) + f(k) - Ef) / (alpha + beta k).
inline SteinSolution solve_stein(const SteinCoeffs& c, const FinitePmf& target, std::span<const double> f) {
  const std::size_t size = target.size();
  if (f.size() != size) throw std::invalid_argument("solve_stein: f must be given on the target support");
  const std::size_t top = size - 1;

  CompensatedSum ef;
  for (std::size_t i = 0; i < size; ++i) ef += f[i] * target[i];
  SteinSolution sol;
  sol.expected_f = ef.value();
  sol.g.assign(size + 1, 0.0);
  std::vector<double> centered(size);
  for (std::size_t i = 0; i < size; ++i) centered[i] = (f[i] - sol.expected_f) * target[i];

  if (c.kind() == TargetKind::Generic) {
    for (std::size_t k = 0; k < size; ++k) {
      const double coef = c.coefficient(k);
      if (k == top && !(coef > detail::kTinyDivisor)) {
        sol.g[k + 1] = sol.g[k];
        sol.top_by_continuation = true;
        break;
      }
      sol.g[k + 1] = detail::checked_divide(static_cast<double>(k) * sol.g[k] + f[k] - sol.expected_f, coef,
                                            "coefficient");
    }
    return sol;
  }

  // head[k] = sum_{i<k} centered[i]; tail[k] = -sum_{i>=k} centered[i] + Ef * deficit.
  std::vector<double> head(size + 1, 0.0);
  CompensatedSum h;
  for (std::size_t k = 0; k < size; ++k) {
    h += centered[k];
    head[k + 1] = h.value();
  }
  std::vector<double> tail(size + 1, 0.0);
  CompensatedSum t(sol.expected_f * target.mass_deficit());
  tail[size] = t.value();
  for (std::size_t k = size; k-- > 0;) {
    t -= centered[k];
    tail[k] = t.value();
  }

  const auto probs = target.probs();
  const std::size_t mode =
      static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  for (std::size_t k = 1; k <= top; ++k) {
    const double s = k <= mode ? head[k] : tail[k];
    sol.g[k] = detail::checked_divide(s, static_cast<double>(k) * target[k], "k P(k)");
  }

  if (c.kind() == TargetKind::PseudoBinomial) {
    if (c.pb().integer_n()) {
      sol.g[size] = sol.g[top];
      sol.top_by_continuation = true;
    } else {
      sol.g[size] = 0.0;
    }
  } else {
    sol.g[size] = detail::checked_divide(tail[size], c.coefficient(top) * target[top], "(alpha + beta K) P(K)");
  }
  return sol;
}

/// Solution for f = indicator of {j}.
inline SteinSolution solve_stein_indicator(const SteinCoeffs& c, const FinitePmf& target, std::size_t j) {
  std::vector<double> f(target.size(), 0.0);
  if (j < f.size()) f[j] = 1.0;
  return solve_stein(c, target, f);
}

struct EmpiricalDeltaG {
  double sup = 0.0;
  /// Number of test functions solved.
  std::size_t functions_scanned = 0;
};

/// Largest |g(k+1) - g(k)| over solutions for indicator test functions: all
/// points, all half-lines {0, ..., j}, and every subset when the support has at
/// most `exhaustive_limit` points.
inline EmpiricalDeltaG empirical_delta_g_sup(const SteinCoeffs& c, const FinitePmf& target,
                                             std::size_t exhaustive_limit = 12) {
  EmpiricalDeltaG out;
  const std::size_t size = target.size();
  auto scan = [&](const std::vector<double>& f) {
    out.sup = std::max(out.sup, solve_stein(c, target, f).max_abs_delta());
    ++out.functions_scanned;
  };
  std::vector<double> f(size, 0.0);
  for (std::size_t j = 0; j < size; ++j) {
    std::fill(f.begin(), f.end(), 0.0);
    f[j] = 1.0;
    scan(f);
    std::fill(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(j + 1), 1.0);
    scan(f);
  }
  if (size <= exhaustive_limit) {
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << size); ++mask) {
      for (std::size_t j = 0; j < size; ++j) f[j] = (mask >> j) & 1U ? 1.0 : 0.0;
      scan(f);
    }
  }
  return out;
}

/// sup |Delta g| bound: 1 / (floor(N) p) for pseudo-binomial, 1 / (r qbar) for
/// negative binomial targets.
inline double delta_g_analytic_bound(const SteinCoeffs& c) {
  switch (c.kind()) {
    case TargetKind::PseudoBinomial:
      return 1.0 / (static_cast<double>(c.pb().floor_n()) * c.pb().p());
    case TargetKind::NegBinomial:
      return 1.0 / (c.nb().r() * c.nb().qbar());
    case TargetKind::Generic: break;
  }
  throw std::invalid_argument("delta_g_analytic_bound: no constant for generic coefficients");
}

/// 1 / (floor(N) p q), the pseudo-binomial constant with the 1/q of (1 - beta) folded in.
inline double pb_corollary_prefactor(const PseudoBinomialParams& pb) {
  return 1.0 / (static_cast<double>(pb.floor_n()) * pb.p() * pb.q());
}

/// (1 + q) q^(-ceil(N)): sup |Delta g| for the tranche-loss test function.
inline double cdo_delta_g_bound(const PseudoBinomialParams& pb) {
  return (1.0 + pb.q()) * std::pow(pb.q(), -static_cast<double>(pb.ceil_n()));
}

/// E[(X - z)^+] for X ~ PB(N, p); never exceeds Np.
inline double cdo_expected_pb_loss(const PseudoBinomialParams& pb, double z) {
  const double value = expect_positive_part(pb_pmf(pb), z);
  const double cap = pb.n() * pb.p();
  if (value > cap * (1.0 + 1e-12)) {
    throw std::logic_error("cdo_expected_pb_loss: E[(X - z)^+] = " + std::to_string(value) + " exceeds Np = " +
                           std::to_string(cap));
  }
  return value;
}

}  // namespace steinbound
