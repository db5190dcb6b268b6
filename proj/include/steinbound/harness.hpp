#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "steinbound/bounds.hpp"
#include "steinbound/distributions.hpp"
#include "steinbound/oracle.hpp"
#include "steinbound/stein.hpp"
#include "steinbound/sum_specs.hpp"

namespace steinbound {

struct GeneratorConfig {
  enum class Kind { Mixed, HomogeneousBernoulli, Dependent };
  Kind kind = Kind::Mixed;
  std::size_t max_items = 8;
  std::size_t max_weight = 3;
  std::size_t max_support = 4;
  /// Specs with |mean - variance| below this are redrawn.
  double min_dispersion_gap = 1e-3;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// mt19937_64 output is fixed by the standard; the mappings below avoid the
/// implementation-defined std distributions.
class InstanceRng {
 public:
  explicit InstanceRng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::size_t uniform_int(std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(eng_() % (hi - lo + 1)); }

 private:
  std::mt19937_64 eng_;
};

struct GeneratedIndependent {
  IndependentSumSpec spec;
  std::string descriptor;
};

struct GeneratedDependent {
  DependentJointSpec spec;
  std::string descriptor;
};

namespace detail {

inline std::string list_string(const std::vector<std::size_t>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s + "]";
}

inline bool fit_usable(double m, double v, double gap) {
  if (!(std::abs(m - v) >= gap)) return false;
  if (m > v && !(m * m / (m - v) > 1.0)) return false;
  return true;
}

inline FinitePmf random_marginal(InstanceRng& rng, std::size_t support) {
  std::vector<double> u(support);
  double total = 0.0;
  for (auto& x : u) {
    x = rng.uniform01();
    total += x;
  }
  for (auto& x : u) x /= total;
  return FinitePmf(std::move(u));
}

}  // namespace detail

/// Random independent spec for instance `index`; redraws until the moment fit is usable.
inline GeneratedIndependent generate_independent(std::uint64_t seed, std::size_t index, const GeneratorConfig& cfg) {
  InstanceRng rng(splitmix64(splitmix64(seed) + index));
  for (;;) {
    std::vector<WeightedMarginal> items;
    std::vector<std::size_t> weights;
    std::vector<std::size_t> supports;
    if (cfg.kind == GeneratorConfig::Kind::HomogeneousBernoulli) {
      const std::size_t n = rng.uniform_int(2, cfg.max_items);
      const double p = rng.uniform(0.05, 0.95);
      for (std::size_t i = 0; i < n; ++i) items.push_back({1, bernoulli(p)});
      weights.assign(n, 1);
      supports.assign(n, 2);
    } else {
      const std::size_t n = rng.uniform_int(1, cfg.max_items);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t w = rng.uniform_int(1, cfg.max_weight);
        const std::size_t s = rng.uniform_int(2, cfg.max_support);
        items.push_back({w, detail::random_marginal(rng, s)});
      }
      if (std::none_of(items.begin(), items.end(), [](const WeightedMarginal& it) { return it.weight == 1; })) {
        items[0].weight = 1;
      }
      for (const auto& it : items) {
        weights.push_back(it.weight);
        supports.push_back(it.marginal.size());
      }
    }
    IndependentSumSpec spec(std::move(items));
    const auto mo = moments(independent_law(spec));
    if (!detail::fit_usable(mo.mean, mo.variance, cfg.min_dispersion_gap)) continue;
    return {std::move(spec), "independent#" + std::to_string(index) + " w=" + detail::list_string(weights) +
                                 " s=" + detail::list_string(supports)};
  }
}

/// Random locally dependent spec: eta_i = T_i(xi_i, xi_{i+1}) on {0, 1, 2} for
/// independent latent xi_1..xi_{n+1} on {0, 1, 2}, with A_i = {|j - i| <= 1}
/// and B_i = {|j - i| <= 2}.
inline GeneratedDependent generate_dependent(std::uint64_t seed, std::size_t index, const GeneratorConfig& cfg) {
  InstanceRng rng(splitmix64(splitmix64(seed) + index));
  const std::size_t max_n = std::min<std::size_t>(cfg.max_items, 6);
  for (;;) {
    const std::size_t n = rng.uniform_int(2, max_n);
    std::vector<std::size_t> weights(n);
    for (auto& w : weights) w = rng.uniform_int(1, cfg.max_weight);
    weights[rng.uniform_int(0, n - 1)] = 1;
    std::vector<std::vector<double>> latent(n + 1);
    for (auto& x : latent) {
      x = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
      const double t = x[0] + x[1] + x[2];
      for (auto& y : x) y /= t;
    }
    std::vector<std::vector<std::size_t>> table(n, std::vector<std::size_t>(9));
    for (auto& t : table) {
      for (auto& c : t) c = rng.uniform_int(0, 2);
    }
    std::size_t states = 1;
    for (std::size_t i = 0; i < n; ++i) states *= 3;
    std::vector<double> joint(states, 0.0);
    std::size_t latent_states = states * 3;
    for (std::size_t xi = 0; xi < latent_states; ++xi) {
      double pr = 1.0;
      std::size_t rest = xi;
      std::vector<std::size_t> x(n + 1);
      for (std::size_t k = 0; k <= n; ++k) {
        x[k] = rest % 3;
        rest /= 3;
        pr *= latent[k][x[k]];
      }
      std::size_t state = 0;
      std::size_t mult = 1;
      for (std::size_t i = 0; i < n; ++i) {
        state += table[i][3 * x[i] + x[i + 1]] * mult;
        mult *= 3;
      }
      joint[state] += pr;
    }
    std::vector<Neighborhood> hoods(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t d = i > j ? i - j : j - i;
        if (d <= 1) hoods[i].a.push_back(j);
        if (d <= 2) hoods[i].b.push_back(j);
      }
    }
    DependentJointSpec spec(weights, std::vector<std::size_t>(n, 3), std::move(joint), std::move(hoods));
    const auto mo = moments(dependent_law(spec));
    if (!detail::fit_usable(mo.mean, mo.variance, cfg.min_dispersion_gap)) continue;
    return {std::move(spec), "dependent#" + std::to_string(index) + " w=" + detail::list_string(weights)};
  }
}

/// Pairs a bound with the oracle's exact distance for `count` seeded
/// instances. Independent kinds use Corollary 1 or 2 with exact gamma;
/// the dependent kind uses Theorem 1 with exact conditional smoothness.
inline std::vector<oracle::Verdict> dominance_harness(std::uint64_t seed, std::size_t count,
                                                      const GeneratorConfig& cfg = {}) {
  std::vector<oracle::Verdict> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (cfg.kind == GeneratorConfig::Kind::Dependent) {
      const auto g = generate_dependent(seed, i, cfg);
      const auto fit = oracle::exact_tv_to_fit(g.spec);
      const auto law_moments = moments(dependent_law(g.spec));
      const auto c = fit_coeffs(law_moments.mean, law_moments.variance);
      const auto bound = thm1_bound(g.spec, c, SmoothnessStrategy::exact_conditional());
      out.push_back(oracle::make_verdict(g.descriptor, fit, bound.value));
    } else {
      const auto g = generate_independent(seed, i, cfg);
      const auto fit = oracle::exact_tv_to_fit(g.spec);
      const auto bound = corollary_bound(g.spec, GammaStrategy::Exact);
      out.push_back(oracle::make_verdict(g.descriptor, fit, bound.value));
    }
  }
  return out;
}

struct HarnessSummary {
  std::size_t count = 0;
  std::size_t dominates = 0;
  std::size_t violates = 0;
  std::size_t inconclusive = 0;
  /// Smallest bound / exact TV over instances with exact TV > 1e-9.
  double min_ratio = 0.0;
};

inline HarnessSummary summarize(const std::vector<oracle::Verdict>& verdicts) {
  HarnessSummary s;
  s.count = verdicts.size();
  double ratio = INFINITY;
  for (const auto& v : verdicts) {
    switch (v.status) {
      case oracle::Status::Dominates: ++s.dominates; break;
      case oracle::Status::Violates: ++s.violates; break;
      case oracle::Status::Inconclusive: ++s.inconclusive; break;
    }
    if (v.exact_tv > 1e-9) ratio = std::min(ratio, v.bound_value / v.exact_tv);
  }
  s.min_ratio = std::isinf(ratio) ? 0.0 : ratio;
  return s;
}

}  // namespace steinbound
