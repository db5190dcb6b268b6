#pragma once

// Brute-force reference computations. Deliberately shares nothing with the
// bound engine beyond the pmf primitives and the spec types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/negative_binomial.hpp>

#include "steinbound/compensated_sum.hpp"
#include "steinbound/error.hpp"
#include "steinbound/pmf.hpp"
#include "steinbound/sum_specs.hpp"

namespace steinbound::oracle {

inline constexpr std::size_t kMaxOutcomes = 10'000'000;

/// Law of sum_i w_i eta_i by enumerating every outcome tuple.
inline FinitePmf enumerate_law(const IndependentSumSpec& spec) {
  std::size_t outcomes = 1;
  std::size_t top = 0;
  for (const auto& it : spec.items()) {
    if (outcomes > kMaxOutcomes / it.marginal.size()) throw std::length_error("oracle: too many outcomes");
    outcomes *= it.marginal.size();
    top += it.weight * it.marginal.max_support();
  }
  std::vector<CompensatedSum> acc(top + 1);
  std::vector<std::size_t> digit(spec.size(), 0);
  for (std::size_t o = 0; o < outcomes; ++o) {
    double pr = 1.0;
    std::size_t w = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      pr *= spec[i].marginal[digit[i]];
      w += spec[i].weight * digit[i];
    }
    acc[w] += pr;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (++digit[i] < spec[i].marginal.size()) break;
      digit[i] = 0;
    }
  }
  std::vector<double> law(acc.size());
  CompensatedSum kept;
  for (std::size_t k = 0; k < acc.size(); ++k) {
    law[k] = acc[k].value();
    kept += law[k];
  }
  return FinitePmf(std::move(law), std::max(0.0, 1.0 - kept.value()));
}

/// Law of sum_v w_v eta_v read off an explicit joint, decoding each state digit by digit.
inline FinitePmf enumerate_law(const DependentJointSpec& spec) {
  std::size_t top = 0;
  for (std::size_t v = 0; v < spec.size(); ++v) top += spec.weights()[v] * (spec.support_sizes()[v] - 1);
  std::vector<CompensatedSum> acc(top + 1);
  std::vector<std::size_t> digit(spec.size(), 0);
  for (std::size_t s = 0; s < spec.state_count(); ++s) {
    std::size_t w = 0;
    for (std::size_t v = 0; v < spec.size(); ++v) w += spec.weights()[v] * digit[v];
    acc[w] += spec.joint()[s];
    for (std::size_t v = 0; v < spec.size(); ++v) {
      if (++digit[v] < spec.support_sizes()[v]) break;
      digit[v] = 0;
    }
  }
  std::vector<double> law(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) law[k] = acc[k].value();
  return FinitePmf(std::move(law));
}

/// Pseudo-binomial pmf by the ratio C(N,k+1)/C(N,k) = (N-k)/(k+1), normalized at the end.
inline FinitePmf pseudo_binomial_reference(double n, double p) {
  if (!(n > 1.0) || !(p > 0.0 && p < 1.0)) throw std::invalid_argument("oracle: bad pseudo-binomial parameters");
  const auto top = static_cast<std::size_t>(std::floor(n * (1.0 + 1e-9)));
  const double ratio = p / (1.0 - p);
  std::vector<double> t(top + 1);
  t[0] = 1.0;
  for (std::size_t k = 0; k < top; ++k) {
    t[k + 1] = t[k] * (n - static_cast<double>(k)) / static_cast<double>(k + 1) * ratio;
    if (t[k + 1] > 1e250) {
      for (std::size_t j = 0; j <= k + 1; ++j) t[j] *= 1e-250;
    }
  }
  CompensatedSum total;
  for (double x : t) total += x;
  for (double& x : t) x /= total.value();
  return FinitePmf(std::move(t));
}

/// Negative binomial pmf from Boost.Math, evaluated term by term until the
/// upper tail is at most eps.
inline FinitePmf negative_binomial_reference(double r, double pbar, double eps = 1e-13) {
  if (!(r > 0.0) || !(pbar > 0.0 && pbar < 1.0)) throw std::invalid_argument("oracle: bad negative binomial parameters");
  const boost::math::negative_binomial_distribution<double> nb(r, pbar);
  std::vector<double> probs;
  double tail = 1.0;
  for (std::size_t k = 0; k < kMaxOutcomes; ++k) {
    const double kd = static_cast<double>(k);
    probs.push_back(boost::math::pdf(nb, kd));
    tail = boost::math::cdf(boost::math::complement(nb, kd));
    if (tail <= eps) break;
  }
  return FinitePmf(std::move(probs), std::max(0.0, tail));
}

enum class Family { PseudoBinomial, NegBinomial };

inline const char* to_string(Family f) { return f == Family::PseudoBinomial ? "pb" : "nb"; }

struct OracleFit {
  double exact_tv = 0.0;
  Family family = Family::PseudoBinomial;
  double alpha = 0.0;
  double beta = 0.0;
  /// N for pseudo-binomial, r for negative binomial.
  double size = 0.0;
  /// p for pseudo-binomial, pbar for negative binomial.
  double prob = 0.0;
  FinitePmf law;
  FinitePmf target;
  /// P(W > floor(N)) for pseudo-binomial fits, else 0.
  double support_overflow = 0.0;
};

/// Moment-matched fit of an exact law and its total variation distance to the fit.
inline OracleFit fit_and_compare(const FinitePmf& law) {
  const auto mo = moments(law);
  const double m = mo.mean;
  const double v = mo.variance;
  if (!(m > 0.0) || !(v > 0.0)) throw InfeasibleModel("oracle: degenerate law");
  if (m == v) throw InfeasibleModel("oracle: mean equals variance");
  OracleFit out;
  out.alpha = m * m / v;
  out.beta = (v - m) / v;
  if (m > v) {
    out.family = Family::PseudoBinomial;
    out.size = m * m / (m - v);
    out.prob = (m - v) / m;
    if (!(out.size > 1.0)) throw InfeasibleModel("oracle: fitted N is not > 1");
    out.target = pseudo_binomial_reference(out.size, out.prob);
    CompensatedSum over;
    for (std::size_t k = out.target.size(); k < law.size(); ++k) over += law[k];
    out.support_overflow = over.value();
  } else {
    out.family = Family::NegBinomial;
    out.size = m * m / (v - m);
    out.prob = m / v;
    out.target = negative_binomial_reference(out.size, out.prob);
  }
  out.exact_tv = tv_distance(law, out.target);
  out.law = law;
  return out;
}

inline OracleFit exact_tv_to_fit(const IndependentSumSpec& spec) { return fit_and_compare(enumerate_law(spec)); }
inline OracleFit exact_tv_to_fit(const DependentJointSpec& spec) { return fit_and_compare(enumerate_law(spec)); }

/// max over indicator g = 1{j}, j = 1..K, of |E[(alpha + beta X) g(X+1) - X g(X)]|.
inline double stein_identity_residual(double alpha, double beta, const FinitePmf& pmf) {
  double worst = 0.0;
  for (std::size_t j = 1; j < pmf.size(); ++j) {
    const double jd = static_cast<double>(j);
    CompensatedSum e;
    e += pmf[j - 1] * (alpha + beta * (jd - 1.0));
    e -= jd * pmf[j];
    worst = std::max(worst, std::abs(e.value()));
  }
  return worst;
}

enum class Status { Dominates, Violates, Inconclusive };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Dominates: return "dominates";
    case Status::Violates: return "violates";
    case Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct Verdict {
  std::string descriptor;
  double exact_tv = 0.0;
  double bound_value = 0.0;
  /// Truncation mass of the fitted target, credited to the bound side.
  double slack = 0.0;
  /// bound_value + slack - exact_tv.
  double margin = 0.0;
  Status status = Status::Dominates;
  Family family = Family::PseudoBinomial;
  double floor_n = 0.0;
  double support_overflow = 0.0;
};

inline constexpr double kDominanceTolerance = 1e-12;

/// Dominates iff bound + slack >= exact TV (to 1e-12). A shortfall no larger
/// than the law's own truncated mass is Inconclusive.
inline Verdict make_verdict(std::string descriptor, const OracleFit& fit, double bound_value) {
  Verdict v;
  v.descriptor = std::move(descriptor);
  v.exact_tv = fit.exact_tv;
  v.bound_value = bound_value;
  v.slack = fit.target.mass_deficit();
  v.margin = bound_value + v.slack - fit.exact_tv;
  v.family = fit.family;
  v.floor_n = fit.family == Family::PseudoBinomial ? static_cast<double>(fit.target.max_support()) : 0.0;
  v.support_overflow = fit.support_overflow;
  if (v.margin >= -kDominanceTolerance) {
    v.status = Status::Dominates;
  } else if (v.margin + fit.law.mass_deficit() >= -kDominanceTolerance) {
    v.status = Status::Inconclusive;
  } else {
    v.status = Status::Violates;
  }
  return v;
}

}  // namespace steinbound::oracle
