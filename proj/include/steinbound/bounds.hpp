#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "steinbound/compensated_sum.hpp"
#include "steinbound/distributions.hpp"
#include "steinbound/error.hpp"
#include "steinbound/pmf.hpp"
#include "steinbound/stein.hpp"
#include "steinbound/sum_specs.hpp"
#include "steinbound/weighted_sum.hpp"

namespace steinbound {

struct ReportTerm {
  std::string label;
  double value = 0.0;
};

/// A bound value with its breakdown. The value is always
/// smoothness * delta_g_constant * (sum of terms).
struct BoundReport {
  std::string name;
  double value = 0.0;
  std::vector<ReportTerm> terms;
  double delta_g_constant = 1.0;
  std::string smoothness_label = "none";
  double smoothness = 1.0;
  /// Fitted parameters and other diagnostics; not part of the value.
  std::vector<ReportTerm> details;
  std::optional<SteinCoeffs> target;
  std::vector<std::string> notes;

  double term_sum() const {
    CompensatedSum s;
    for (const auto& t : terms) s += t.value;
    return s.value();
  }

  double recombined() const { return smoothness * delta_g_constant * term_sum(); }

  double detail(std::string_view label) const {
    for (const auto& d : details) {
      if (d.label == label) return d.value;
    }
    throw std::out_of_range("BoundReport: no detail named " + std::string(label));
  }

  double term(std::string_view label) const {
    for (const auto& t : terms) {
      if (t.label == label) return t.value;
    }
    throw std::out_of_range("BoundReport: no term named " + std::string(label));
  }
};

enum class GammaStrategy { Exact, Analytic, Trivial };

inline const char* to_string(GammaStrategy g) {
  switch (g) {
    case GammaStrategy::Exact: return "gamma-exact";
    case GammaStrategy::Analytic: return "gamma-analytic";
    case GammaStrategy::Trivial: return "gamma-trivial";
  }
  return "?";
}

inline double gamma_value(const IndependentSumSpec& spec, GammaStrategy g) {
  switch (g) {
    case GammaStrategy::Exact: return gamma_exact(spec);
    case GammaStrategy::Analytic: return gamma_analytic(spec);
    case GammaStrategy::Trivial: return 2.0;
  }
  return 2.0;
}

/// How conditional smoothness D(W | ...) enters the locally dependent bounds.
struct SmoothnessStrategy {
  enum class Kind { Trivial2, ExactConditional, UserConstant };
  Kind kind = Kind::ExactConditional;
  double constant = 2.0;

  static SmoothnessStrategy trivial() { return {Kind::Trivial2, 2.0}; }
  static SmoothnessStrategy exact_conditional() { return {Kind::ExactConditional, 1.0}; }
  static SmoothnessStrategy user_constant(double v) {
    if (!(v > 0.0 && v <= 2.0)) throw std::invalid_argument("SmoothnessStrategy: constant must lie in (0, 2]");
    return {Kind::UserConstant, v};
  }

  std::string label() const {
    switch (kind) {
      case Kind::Trivial2: return "D<=2";
      case Kind::ExactConditional: return "exact-conditional";
      case Kind::UserConstant: return "D<=constant";
    }
    return "?";
  }
};

namespace detail {

inline void finish(BoundReport& r) {
  r.value = r.recombined();
  if (!(r.value >= 0.0)) throw std::logic_error("bound " + r.name + " is negative or NaN");
}

inline void check_moments(double mean, double variance, const SteinCoeffs& c) {
  constexpr double kRel = 1e-8;
  const bool ok = std::abs(mean - c.mean()) <= kRel * std::abs(mean) &&
                  std::abs(variance - c.variance()) <= kRel * std::abs(variance);
  if (!ok) {
    throw std::invalid_argument("coefficients do not match the sum's moments: mean " + std::to_string(mean) +
                                " vs " + std::to_string(c.mean()) + ", variance " + std::to_string(variance) +
                                " vs " + std::to_string(c.variance()));
  }
}

struct SumMoments {
  double mean = 0.0;
  double variance = 0.0;
};

inline SumMoments spec_moments(const IndependentSumSpec& spec) {
  CompensatedSum m;
  CompensatedSum v;
  for (const auto& it : spec.items()) {
    const auto mo = moments(it.marginal);
    const double w = static_cast<double>(it.weight);
    m += w * mo.mean;
    v += w * w * mo.variance;
  }
  return {m.value(), v.value()};
}

/// Per-item h and d for the linear form
///   w = 1:  h(k) = k(k-1)/2 |a E(eta) p(k) + b k p(k) - c (k+1) p(k+1)|
///   w >= 2: h(k) = sum_{l=1}^{wk-1} |a l E(eta) + b l k - c (l-1) k| p(k)
///   d = E(w eta) |a ((E eta)^2 - E eta(eta-1)) + b E(eta)|
/// The slack term covers the mass deficit of a truncated marginal.
struct ItemTerms {
  double h = 0.0;
  double d = 0.0;
  double slack = 0.0;
};

inline ItemTerms item_terms(const WeightedMarginal& item, double a, double b, double c) {
  const FinitePmf& pm = item.marginal;
  const auto mo = moments(pm);
  const double e = mo.mean;
  const std::size_t w = item.weight;
  ItemTerms out;
  CompensatedSum h;
  double worst = 0.0;
  for (std::size_t k = 1; k < pm.size(); ++k) {
    const double kd = static_cast<double>(k);
    const double pk = pm[k];
    if (w == 1) {
      CompensatedSum inner;
      inner += a * e * pk;
      inner += b * kd * pk;
      inner -= c * (kd + 1.0) * pm[k + 1];
      h += 0.5 * kd * (kd - 1.0) * std::abs(inner.value());
      if (pk > 0.0) {
        CompensatedSum unit;
        unit += a * e;
        unit += b * kd;
        unit -= c * (kd + 1.0) * pm[k + 1] / pk;
        worst = std::max(worst, 0.5 * kd * (kd - 1.0) * std::abs(unit.value()));
      }
    } else {
      CompensatedSum per_unit;
      for (std::size_t l = 1; l < w * k; ++l) {
        const double ld = static_cast<double>(l);
        CompensatedSum inner;
        inner += a * ld * e;
        inner += b * ld * kd;
        inner -= c * (ld - 1.0) * kd;
        per_unit += std::abs(inner.value());
      }
      h += per_unit.value() * pk;
      worst = std::max(worst, per_unit.value());
    }
  }
  out.h = h.value();
  // (E eta)^2 - E eta(eta-1) = E eta - Var eta.
  CompensatedSum inner;
  inner += a * e;
  inner -= a * mo.variance;
  inner += b * e;
  out.d = static_cast<double>(w) * e * std::abs(inner.value());
  out.slack = pm.mass_deficit() * worst;
  return out;
}

inline void add_item_terms(BoundReport& r, const IndependentSumSpec& spec, double a, double b, double c) {
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto t = item_terms(spec[i], a, b, c);
    const double w = static_cast<double>(spec[i].weight);
    const std::string idx = std::to_string(i);
    r.terms.push_back({"w*h[" + idx + "]", w * t.h});
    r.terms.push_back({"w*d[" + idx + "]", w * t.d});
    if (t.slack > 0.0) r.terms.push_back({"w*slack[" + idx + "]", w * t.slack});
  }
  if (std::any_of(spec.items().begin(), spec.items().end(),
                  [](const WeightedMarginal& it) { return it.marginal.mass_deficit() > 0.0; })) {
    r.notes.push_back("truncated marginals: slack terms added for the cut-off tail mass");
  }
}

}  // namespace detail

/// gamma * delta_g * sum_i w_i (sum_k h_i(k) + d_i) for independent sums.
inline BoundReport thm2_bound(const IndependentSumSpec& spec, const SteinCoeffs& c, double gamma, double delta_g) {
  const auto mo = detail::spec_moments(spec);
  detail::check_moments(mo.mean, mo.variance, c);
  BoundReport r;
  r.name = "theorem2";
  r.smoothness_label = "gamma";
  r.smoothness = gamma;
  r.delta_g_constant = delta_g;
  r.target = c;
  r.details = {{"mean", mo.mean}, {"variance", mo.variance}, {"alpha", c.alpha()}, {"beta", c.beta()}};
  detail::add_item_terms(r, spec, 1.0 - c.beta(), c.beta(), 1.0);
  detail::finish(r);
  return r;
}

/// Pseudo-binomial bound gamma / (floor(N) p q) * sum_i w_i (sum_k h_i(k) + d_i)
/// for under-dispersed independent sums.
inline BoundReport cor1_pb_bound(const IndependentSumSpec& spec, GammaStrategy g = GammaStrategy::Analytic) {
  const auto mo = detail::spec_moments(spec);
  if (!(mo.mean > mo.variance)) {
    throw InfeasibleModel("cor1_pb_bound: pseudo-binomial fit needs mean > variance");
  }
  const SteinCoeffs c = fit_coeffs(mo.mean, mo.variance);
  const auto& pb = c.pb();
  BoundReport r;
  r.name = "corollary1-pb";
  r.smoothness_label = to_string(g);
  r.smoothness = gamma_value(spec, g);
  r.delta_g_constant = pb_corollary_prefactor(pb);
  r.target = c;
  r.details = {{"mean", mo.mean},
               {"variance", mo.variance},
               {"N", pb.n()},
               {"p", pb.p()},
               {"floor_N", static_cast<double>(pb.floor_n())}};
  detail::add_item_terms(r, spec, 1.0, -pb.p(), pb.q());
  detail::finish(r);
  return r;
}

/// Negative binomial bound gamma / (r qbar) * sum_i w_i (sum_k h_i(k) + d_i)
/// for over-dispersed independent sums.
inline BoundReport cor2_nb_bound(const IndependentSumSpec& spec, GammaStrategy g = GammaStrategy::Analytic) {
  const auto mo = detail::spec_moments(spec);
  if (!(mo.variance > mo.mean)) {
    throw InfeasibleModel("cor2_nb_bound: negative binomial fit needs variance > mean");
  }
  const SteinCoeffs c = fit_coeffs(mo.mean, mo.variance);
  const auto& nb = c.nb();
  BoundReport r;
  r.name = "corollary2-nb";
  r.smoothness_label = to_string(g);
  r.smoothness = gamma_value(spec, g);
  r.delta_g_constant = 1.0 / (nb.r() * nb.qbar());
  r.target = c;
  r.details = {{"mean", mo.mean}, {"variance", mo.variance}, {"r", nb.r()}, {"pbar", nb.pbar()}};
  detail::add_item_terms(r, spec, nb.pbar(), nb.qbar(), 1.0);
  detail::finish(r);
  return r;
}

/// Corollary 1 or 2, whichever family the moments select.
inline BoundReport corollary_bound(const IndependentSumSpec& spec, GammaStrategy g = GammaStrategy::Analytic) {
  const auto mo = detail::spec_moments(spec);
  if (mo.mean == mo.variance) throw InfeasibleModel("corollary_bound: mean equals variance");
  return mo.mean > mo.variance ? cor1_pb_bound(spec, g) : cor2_nb_bound(spec, g);
}

namespace detail {

/// Raw locally dependent sums, with D taken from the conditional tables or set to 1.
struct LocalSums {
  double t1 = 0.0;  // sum_i w_i E(eta_i) E[a (2b - a - 1) D]
  double t2 = 0.0;  // sum_i w_i E[eta_i (a - 1)(2b - a - 2) D]
  double t4 = 0.0;  // sum_i w_i E[eta_i (b - 1) D]
  std::vector<double> e_eta;       // E eta_i
  std::vector<double> e_a;         // E a*
  std::vector<double> e_eta_a1;    // E[eta_i (a* - 1)]
  std::vector<double> e_b_d;       // E[b* D]
  double mean = 0.0;
  double variance = 0.0;
};

inline LocalSums local_sums(const DependentJointSpec& spec, const SmoothnessStrategy& s) {
  const auto dl = dependent_law_and_conditionals(spec);
  const bool exact = s.kind == SmoothnessStrategy::Kind::ExactConditional;
  LocalSums out;
  const auto mo = moments(dl.law);
  out.mean = mo.mean;
  out.variance = mo.variance;
  CompensatedSum t1;
  CompensatedSum t2;
  CompensatedSum t4;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& hood = spec.neighborhoods()[i];
    const auto& w = spec.weights();
    CompensatedSum e_eta;
    CompensatedSum e_a;
    CompensatedSum e_eta_a1;
    CompensatedSum s1;
    CompensatedSum s2;
    CompensatedSum s3;
    CompensatedSum s4;
    for (const auto& e : dl.conditionals[i].entries) {
      double a = 0.0;
      double b = 0.0;
      double eta = 0.0;
      for (std::size_t k = 0; k < hood.b.size(); ++k) {
        const std::size_t v = hood.b[k];
        const double x = static_cast<double>(w[v] * e.values[k]);
        b += x;
        if (std::binary_search(hood.a.begin(), hood.a.end(), v)) a += x;
        if (v == i) eta = static_cast<double>(e.values[k]);
      }
      const double pd = e.weight * (exact ? e.smoothness : 1.0);
      e_eta += e.weight * eta;
      e_a += e.weight * a;
      e_eta_a1 += e.weight * eta * (a - 1.0);
      s1 += pd * a * (2.0 * b - a - 1.0);
      s2 += pd * eta * (a - 1.0) * (2.0 * b - a - 2.0);
      s3 += pd * b;
      s4 += pd * eta * (b - 1.0);
    }
    const double wi = static_cast<double>(w[i]);
    out.e_eta.push_back(e_eta.value());
    out.e_a.push_back(e_a.value());
    out.e_eta_a1.push_back(e_eta_a1.value());
    out.e_b_d.push_back(s3.value());
    t1 += wi * e_eta.value() * s1.value();
    t2 += wi * s2.value();
    t4 += wi * s4.value();
  }
  out.t1 = t1.value();
  out.t2 = t2.value();
  out.t4 = t4.value();
  return out;
}

inline void apply_smoothness(BoundReport& r, const SmoothnessStrategy& s) {
  r.smoothness_label = s.label();
  r.smoothness = s.kind == SmoothnessStrategy::Kind::ExactConditional ? 1.0 : s.constant;
}

}  // namespace detail

/// Locally dependent bound
///   delta_g { (1-beta)/2 [T1 + T2] + T3 + |beta| T4 }
/// with every D(W | ...) read as the smoothness of the law of W given eta_{B_i}.
/// delta_g defaults to the analytic constant of the target family.
inline BoundReport thm1_bound(const DependentJointSpec& spec, const SteinCoeffs& c, const SmoothnessStrategy& s,
                              std::optional<double> delta_g = std::nullopt) {
  const auto ls = detail::local_sums(spec, s);
  detail::check_moments(ls.mean, ls.variance, c);
  const double beta = c.beta();
  CompensatedSum t3;
  CompensatedSum centered;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double wi = static_cast<double>(spec.weights()[i]);
    CompensatedSum ci;
    ci += (1.0 - beta) * ls.e_eta[i] * ls.e_a[i];
    ci -= (1.0 - beta) * ls.e_eta_a1[i];
    ci += beta * ls.e_eta[i];
    t3 += wi * std::abs(ci.value()) * ls.e_b_d[i];
    centered += wi * ci.value();
  }
  BoundReport r;
  r.name = "theorem1";
  detail::apply_smoothness(r, s);
  r.delta_g_constant = delta_g ? *delta_g : delta_g_analytic_bound(c);
  r.target = c;
  r.terms = {{"(1-beta)/2*T1", 0.5 * (1.0 - beta) * ls.t1},
             {"(1-beta)/2*T2", 0.5 * (1.0 - beta) * ls.t2},
             {"T3", t3.value()},
             {"|beta|*T4", std::abs(beta) * ls.t4}};
  r.details = {{"mean", ls.mean},
               {"variance", ls.variance},
               {"alpha", c.alpha()},
               {"beta", beta},
               {"sum_w_c", centered.value()}};
  detail::finish(r);
  return r;
}

/// Prefactor (1 + q) / q^(ceil(N) + 1) of the tranche-loss bounds.
inline double cdo_prefactor(const PseudoBinomialParams& pb) {
  return cdo_delta_g_bound(pb) / pb.q();
}

/// Tranche-loss bound for locally dependent default indicators with
/// q = Var/E and N = E^2 / (E - Var) of the pool.
inline BoundReport cdo_bound_dependent(const DependentJointSpec& spec,
                                       const SmoothnessStrategy& s = SmoothnessStrategy::exact_conditional()) {
  for (auto sz : spec.support_sizes()) {
    if (sz > 2) throw std::invalid_argument("cdo_bound_dependent: marginals must be indicators");
  }
  const auto ls = detail::local_sums(spec, s);
  if (!(ls.mean > ls.variance)) throw InfeasibleModel("cdo_bound_dependent: needs mean > variance");
  const double q = ls.variance / ls.mean;
  const double n = ls.mean * ls.mean / (ls.mean - ls.variance);
  if (!(n > 1.0)) throw InfeasibleModel("cdo_bound_dependent: fitted N is not > 1");
  const PseudoBinomialParams pb(n, 1.0 - q);
  CompensatedSum t3;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double wi = static_cast<double>(spec.weights()[i]);
    CompensatedSum ci;
    ci += ls.e_eta[i] * ls.e_a[i];
    ci -= ls.e_eta_a1[i];
    ci -= pb.p() * ls.e_eta[i];
    t3 += wi * std::abs(ci.value()) * ls.e_b_d[i];
  }
  BoundReport r;
  r.name = "cdo-dependent";
  detail::apply_smoothness(r, s);
  r.delta_g_constant = cdo_prefactor(pb);
  r.target = SteinCoeffs(pb);
  r.terms = {{"T1/2", 0.5 * ls.t1}, {"T2/2", 0.5 * ls.t2}, {"T3", t3.value()}, {"p*T4", pb.p() * ls.t4}};
  r.details = {{"mean", ls.mean}, {"variance", ls.variance}, {"N", n}, {"q", q}};
  detail::finish(r);
  return r;
}

namespace detail {

struct RunsSums {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
};

/// Window sums of the runs bound, each expectation taken by enumerating the
/// underlying trials that the indicators in B_i depend on.
inline RunsSums runs_window_sums(const RunsModel& model, double p) {
  const std::size_t n = model.n();
  CompensatedSum s1;
  CompensatedSum s2;
  CompensatedSum s3;
  for (std::size_t i = 2; i <= n; ++i) {
    const std::size_t a_lo = std::max<std::size_t>(2, i - 1);
    const std::size_t a_hi = std::min(n, i + 1);
    const std::size_t b_lo = i >= 4 ? i - 2 : 2;
    const std::size_t b_hi = std::min(n, i + 2);
    const std::size_t lo = b_lo - 1;
    const std::size_t span = b_hi - lo + 1;
    CompensatedSum ea;
    CompensatedSum eab;
    CompensatedSum ezab;
    CompensatedSum eza;
    CompensatedSum eb;
    CompensatedSum ezb;
    for (std::size_t z = 0; z < (std::size_t{1} << span); ++z) {
      auto zeta = [&](std::size_t pos) { return (z >> (pos - lo)) & 1U; };
      double pr = 1.0;
      for (std::size_t pos = lo; pos <= b_hi; ++pos) pr *= zeta(pos) ? model.at(pos) : 1.0 - model.at(pos);
      auto bar = [&](std::size_t j) { return zeta(j - 1) == 0 && zeta(j) == 1 ? 1.0 : 0.0; };
      double a = 0.0;
      double b = 0.0;
      for (std::size_t j = b_lo; j <= b_hi; ++j) {
        b += bar(j);
        if (j >= a_lo && j <= a_hi) a += bar(j);
      }
      const double zi = bar(i);
      ea += pr * a;
      eab += pr * a * (2.0 * b - a - 1.0);
      ezab += pr * zi * (a - 1.0) * (2.0 * b - a - 2.0);
      eza += pr * zi * (a - 1.0);
      eb += pr * b;
      ezb += pr * zi * (b - 1.0);
    }
    const double mu = model.mu(i);
    s1 += mu * eab.value() + ezab.value();
    CompensatedSum centered;
    centered += mu * ea.value();
    centered -= eza.value();
    centered -= p * mu;
    s2 += 2.0 * std::abs(centered.value()) * eb.value();
    s3 += 2.0 * p * ezb.value();
  }
  return {s1.value(), s2.value(), s3.value()};
}

}  // namespace detail

/// Pseudo-binomial bound for the (1,1)-runs count:
/// 1 / (floor(n^) p^ q^) {S1 + S2 + S3} times the runs smoothness factor.
inline BoundReport runs_bound(const RunsModel& model) {
  if (model.n() < 4) throw std::invalid_argument("runs_bound: need n >= 4");
  const double m = runs_mean(model);
  const double v = runs_variance(model);
  const double cov = m - v;
  if (!(cov > 0.0)) throw InfeasibleModel("runs_bound: mean does not exceed variance");
  const double n_hat = m * m / cov;
  if (!(n_hat > 1.0)) throw InfeasibleModel("runs_bound: fitted N is not > 1");
  const PseudoBinomialParams pb(n_hat, cov / m);
  const auto sums = detail::runs_window_sums(model, pb.p());
  BoundReport r;
  r.name = "runs";
  r.smoothness_label = "runs-factor";
  r.smoothness = runs_smoothness_factor(model);
  r.delta_g_constant = pb_corollary_prefactor(pb);
  r.target = SteinCoeffs(pb);
  r.terms = {{"S1", sums.s1}, {"S2", sums.s2}, {"S3", sums.s3}};
  r.details = {{"mean", m}, {"variance", v}, {"n_hat", n_hat}, {"p_hat", pb.p()}};
  detail::finish(r);
  return r;
}

/// (1/2 sum_{j in F} min{1, 3 (1 - E I_{j-1}) E I_j})^(-1/2) over the runs
/// indicators I_1, ..., I_{n-1} with E I_0 = 0 and F the smaller parity class.
inline double cdo_runs_smoothness_factor(const RunsModel& model) {
  if (model.n() < 4) throw std::invalid_argument("cdo_runs_smoothness_factor: need n >= 4");
  CompensatedSum even;
  CompensatedSum odd;
  for (std::size_t j = 1; j + 1 <= model.n(); ++j) {
    const double prev = j == 1 ? 0.0 : model.mu(j);
    const double term = std::min(1.0, 3.0 * (1.0 - prev) * model.mu(j + 1));
    if (j % 2 == 0) {
      even += term;
    } else {
      odd += term;
    }
  }
  const double v = 0.5 * std::min(even.value(), odd.value());
  if (!(v > 0.0)) throw std::domain_error("cdo_runs_smoothness_factor: empty index set");
  return 1.0 / std::sqrt(v);
}

/// Tranche-loss bound for runs-type default indicators with unit weights.
inline BoundReport cdo_bound_runs_display(const RunsModel& model) {
  const double m = runs_mean(model);
  const double v = runs_variance(model);
  if (!(m > v)) throw InfeasibleModel("cdo_bound_runs_display: needs mean > variance");
  const double q = v / m;
  const double n = m * m / (m - v);
  if (!(n > 1.0)) throw InfeasibleModel("cdo_bound_runs_display: fitted N is not > 1");
  const PseudoBinomialParams pb(n, 1.0 - q);
  const auto sums = detail::runs_window_sums(model, pb.p());
  BoundReport r;
  r.name = "cdo-runs";
  r.smoothness_label = "runs-factor";
  r.smoothness = cdo_runs_smoothness_factor(model);
  r.delta_g_constant = cdo_prefactor(pb);
  r.target = SteinCoeffs(pb);
  r.terms = {{"S1", sums.s1}, {"S2", sums.s2}, {"S3", sums.s3}};
  r.details = {{"mean", m}, {"variance", v}, {"N", n}, {"q", q}};
  detail::finish(r);
  return r;
}

namespace detail {

struct IndicatorPool {
  double n = 0.0;
  double p = 0.0;
};

inline IndicatorPool indicator_pool(const std::vector<double>& probs, const char* who) {
  if (probs.empty()) throw std::invalid_argument(std::string(who) + ": no probabilities");
  CompensatedSum s;
  CompensatedSum s2;
  for (double x : probs) {
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument(std::string(who) + ": probabilities must lie in (0, 1)");
    s += x;
    s2 += x * x;
  }
  const double n = s.value() * s.value() / s2.value();
  if (!(n > 1.0)) throw InfeasibleModel(std::string(who) + ": fitted N is not > 1");
  return {n, s2.value() / s.value()};
}

}  // namespace detail

/// ((1 + q) / q^(ceil(N) + 1)) sum_i p_i |p - p_i| for independent indicators.
inline BoundReport cdo_bound_independent(const std::vector<double>& probs) {
  const auto pool = detail::indicator_pool(probs, "cdo_bound_independent");
  const PseudoBinomialParams pb(pool.n, pool.p);
  BoundReport r;
  r.name = "cdo-independent";
  r.delta_g_constant = cdo_prefactor(pb);
  r.target = SteinCoeffs(pb);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    r.terms.push_back({"p[" + std::to_string(i) + "]*|p-p_i|", probs[i] * std::abs(pb.p() - probs[i])});
  }
  r.details = {{"N", pool.n}, {"p", pool.p}, {"q", pb.q()}, {"ceil_N", static_cast<double>(pb.ceil_n())}};
  detail::finish(r);
  return r;
}

/// (1/2) min{1, 1 + p - |1 - 2p|}.
inline double bernoulli_gamma_bar(double p) { return 0.5 * std::min(1.0, 1.0 + p - std::abs(1.0 - 2.0 * p)); }

/// sqrt(2/pi)(1/4 + sum g_i - max g_i)^(-1/2) ((1 + q) / q^(ceil(N) + 1)) sum_i p_i^2 |p - p_i|.
inline BoundReport cdo_bound_independent_gamma(const std::vector<double>& probs) {
  const auto pool = detail::indicator_pool(probs, "cdo_bound_independent_gamma");
  const PseudoBinomialParams pb(pool.n, pool.p);
  std::vector<double> g;
  g.reserve(probs.size());
  for (double x : probs) g.push_back(bernoulli_gamma_bar(x));
  BoundReport r;
  r.name = "cdo-independent-gamma";
  r.smoothness_label = "gamma-bernoulli";
  r.smoothness = gamma_from_terms(g);
  r.delta_g_constant = cdo_prefactor(pb);
  r.target = SteinCoeffs(pb);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    r.terms.push_back(
        {"p[" + std::to_string(i) + "]^2*|p-p_i|", probs[i] * probs[i] * std::abs(pb.p() - probs[i])});
  }
  r.details = {{"N", pool.n}, {"p", pool.p}, {"q", pb.q()}, {"ceil_N", static_cast<double>(pb.ceil_n())}};
  detail::finish(r);
  return r;
}

/// Poisson comparison bound (2 exp(sum p_i) - 1) sum p_i^2.
inline double poisson_existing_bound(const std::vector<double>& probs) {
  CompensatedSum s;
  CompensatedSum s2;
  for (double x : probs) {
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("poisson_existing_bound: probabilities must lie in (0, 1)");
    s += x;
    s2 += x * x;
  }
  return (2.0 * std::exp(s.value()) - 1.0) * s2.value();
}

/// Default probabilities of the comparison pool: 0.05 for i = 1..10, 0.10 for
/// 11..20, and so on.
inline std::vector<double> cdo_table_probabilities(std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = 0.05 * static_cast<double>(1 + i / 10);
  return p;
}

/// Negative binomial bound for S_n = sum_i i eta_i with eta_i ~ Po(lambda_i).
/// lambdas[0] is lambda_1.
inline BoundReport compound_poisson_bound(const std::vector<double>& lambdas, double eps = kDefaultTruncationEps) {
  if (lambdas.size() < 2) throw std::invalid_argument("compound_poisson_bound: need n >= 2");
  CompensatedSum s1;
  CompensatedSum s2;
  CompensatedSum sf;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double lam = lambdas[k];
    if (!(lam >= 0.0) || !std::isfinite(lam)) throw std::invalid_argument("compound_poisson_bound: lambda must be >= 0");
    const double i = static_cast<double>(k + 1);
    s1 += i * lam;
    s2 += i * i * lam;
    sf += i * (i - 1.0) * lam;
  }
  if (!(s1.value() > 0.0)) throw std::invalid_argument("compound_poisson_bound: all lambdas are zero");
  if (!(sf.value() > 0.0)) throw InfeasibleModel("compound_poisson_bound: no mass at i >= 2, mean equals variance");
  const double qbar = sf.value() / s2.value();
  const double pbar = 1.0 - qbar;
  const double r = s1.value() * s1.value() / sf.value();
  const NegBinomialParams nb(r, pbar);

  BoundReport out;
  out.name = "compound-poisson";
  out.smoothness_label = "sqrt(2/pi)";
  out.smoothness = std::sqrt(2.0 / std::numbers::pi);
  out.delta_g_constant = 2.0 / (r * qbar);
  out.target = SteinCoeffs(nb);
  bool decreasing = true;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double lam = lambdas[k];
    const double i = static_cast<double>(k + 1);
    double e = 0.0;
    if (k == 0) {
      e = qbar * lam * lam * (lam + 1.0) + qbar * lam * lam;
    } else {
      const FinitePmf pm = poisson(lam, eps);
      CompensatedSum acc;
      for (std::size_t j = 0; j < pm.size(); ++j) {
        const double x = i * static_cast<double>(j);
        acc += pm[j] * x * (x - 1.0) * (pbar * (x + i * lam) + 2.0);
      }
      e = 0.5 * acc.value() + qbar * (i * lam) * (i * lam);
    }
    out.terms.push_back({"E[" + std::to_string(k + 1) + "]", e});
    if (k > 0 && i * lam > static_cast<double>(k) * lambdas[k - 1]) decreasing = false;
  }
  out.details = {{"mean", s1.value()},  {"variance", s2.value()},
                 {"r", r},              {"qbar", qbar},
                 {"i_lambda_decreasing", decreasing ? 1.0 : 0.0}};
  if (!decreasing) out.notes.push_back("i*lambda_i is not decreasing in i");
  detail::finish(out);
  return out;
}

struct NbComponent {
  double n = 1.0;
  double p = 0.5;
};

/// Negative binomial bound for a sum of independent NB(n_i, p_i) variables.
inline BoundReport nb_of_nb_bound(const std::vector<NbComponent>& comps, double eps = kDefaultTruncationEps) {
  if (comps.empty()) throw std::invalid_argument("nb_of_nb_bound: no components");
  CompensatedSum m;
  CompensatedSum v;
  for (const auto& c : comps) {
    const NegBinomialParams check(c.n, c.p);
    m += check.mean();
    v += check.variance();
  }
  const double pbar = m.value() / v.value();
  const double qbar = 1.0 - pbar;
  const double r = m.value() * m.value() / (v.value() - m.value());
  const NegBinomialParams fit(r, pbar);

  std::vector<double> mode_probs;
  BoundReport out;
  out.name = "nb-of-nb";
  out.delta_g_constant = 1.0 / (r * qbar);
  out.target = SteinCoeffs(fit);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto& c = comps[i];
    const double qi = 1.0 - c.p;
    const double mode = std::max(0.0, std::floor((c.n - 1.0) * qi / c.p));
    const FinitePmf pm = nb_pmf(NegBinomialParams(c.n, c.p), eps);
    mode_probs.push_back(pm[static_cast<std::size_t>(mode)]);
    const double ratio = pbar * (c.n * qi + 1.0) * std::abs(qi / c.p - qbar / pbar) * c.n * (c.n + 1.0) * qi * qi /
                         (c.p * c.p);
    const double e = c.n * qi / c.p;
    const double var = c.n * qi / (c.p * c.p);
    CompensatedSum inner;
    inner += pbar * e;
    inner -= pbar * var;
    inner += qbar * e;
    out.terms.push_back({"ratio[" + std::to_string(i) + "]", ratio});
    out.terms.push_back({"d[" + std::to_string(i) + "]", e * std::abs(inner.value())});
  }
  out.smoothness_label = "gamma-mode";
  out.smoothness = gamma_from_terms(mode_probs);
  out.details = {{"mean", m.value()}, {"variance", v.value()}, {"r", r}, {"pbar", pbar}};
  detail::finish(out);
  return out;
}

}  // namespace steinbound
