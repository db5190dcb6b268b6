#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinbound/compensated_sum.hpp"
#include "steinbound/pmf.hpp"
#include "steinbound/sum_specs.hpp"

namespace steinbound {

/// Law of sum_i w_i eta_i for independent items.
inline FinitePmf independent_law(const IndependentSumSpec& spec) {
  FinitePmf law;
  for (const auto& it : spec.items()) law = convolve(law, dilate(it.marginal, it.weight));
  return law;
}

/// Law of W* - w_i eta_i.
inline FinitePmf leave_one_out(const IndependentSumSpec& spec, std::size_t i) {
  if (i >= spec.size()) throw std::out_of_range("leave_one_out: index " + std::to_string(i) + " out of range");
  FinitePmf law;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (j == i) continue;
    law = convolve(law, dilate(spec[j].marginal, spec[j].weight));
  }
  return law;
}

/// gamma = max_i D(W* - w_i eta_i).
inline double gamma_exact(const IndependentSumSpec& spec) {
  double g = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) g = std::max(g, smoothness_d(leave_one_out(spec, i)));
  return g;
}

/// sqrt(2/pi) (1/4 + sum_j g_j - max_j g_j)^(-1/2).
inline double gamma_from_terms(const std::vector<double>& terms) {
  CompensatedSum s(0.25);
  double top = 0.0;
  for (double g : terms) {
    s += g;
    top = std::max(top, g);
  }
  s -= top;
  return std::sqrt(2.0 / std::numbers::pi) / std::sqrt(s.value());
}

/// gamma_j = min(1/2, 1 - d_TV(w_j eta_j, w_j eta_j + 1)).
inline std::vector<double> gamma_analytic_terms(const IndependentSumSpec& spec) {
  std::vector<double> out;
  out.reserve(spec.size());
  for (const auto& it : spec.items()) {
    out.push_back(std::min(0.5, 1.0 - 0.5 * smoothness_d(dilate(it.marginal, it.weight))));
  }
  return out;
}

inline double gamma_analytic(const IndependentSumSpec& spec) { return gamma_from_terms(gamma_analytic_terms(spec)); }

/// Exact law of the (1,1)-runs count.
inline FinitePmf runs_law(const RunsModel& model) {
  const std::size_t n = model.n();
  // dp[z][c]: P(zeta_i = z, count = c) after trial i.
  std::vector<std::vector<double>> dp(2, std::vector<double>(n / 2 + 2, 0.0));
  dp[0][0] = 1.0 - model.at(1);
  dp[1][0] = model.at(1);
  for (std::size_t i = 2; i <= n; ++i) {
    const double pi = model.at(i);
    std::vector<std::vector<double>> next(2, std::vector<double>(n / 2 + 2, 0.0));
    for (std::size_t c = 0; c + 1 < dp[0].size(); ++c) {
      next[0][c] += dp[0][c] * (1.0 - pi) + dp[1][c] * (1.0 - pi);
      next[1][c + 1] += dp[0][c] * pi;
      next[1][c] += dp[1][c] * pi;
    }
    dp = std::move(next);
  }
  std::vector<double> law(dp[0].size());
  for (std::size_t c = 0; c < law.size(); ++c) law[c] = dp[0][c] + dp[1][c];
  return FinitePmf(std::move(law));
}

inline double runs_mean(const RunsModel& model) {
  CompensatedSum s;
  for (std::size_t i = 2; i <= model.n(); ++i) s += model.mu(i);
  return s.value();
}

/// sum_i mu_i - sum_i sum_{j in A_i} mu_i mu_j with A_i = {i-1, i, i+1} within {2, ..., n}.
inline double runs_variance(const RunsModel& model) {
  CompensatedSum s;
  const std::size_t n = model.n();
  for (std::size_t i = 2; i <= n; ++i) {
    s += model.mu(i);
    for (std::size_t j = std::max<std::size_t>(2, i - 1); j <= std::min(n, i + 1); ++j) s -= model.mu(i) * model.mu(j);
  }
  return s.value();
}

/// The runs model as an explicit joint of the indicators (1 - zeta_{i-1}) zeta_i,
/// i = 2..n, with A = {|j - i| <= 1} and B = {|j - i| <= 2}.
inline DependentJointSpec runs_joint_spec(const RunsModel& model) {
  const std::size_t n = model.n();
  if (n > 21) throw std::length_error("runs_joint_spec: n too large for explicit enumeration");
  const std::size_t m = n - 1;
  std::vector<double> joint(std::size_t{1} << m, 0.0);
  for (std::size_t z = 0; z < (std::size_t{1} << n); ++z) {
    double pr = 1.0;
    for (std::size_t i = 0; i < n; ++i) pr *= (z >> i) & 1U ? model.p[i] : 1.0 - model.p[i];
    std::size_t state = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (((z >> (i - 1)) & 1U) == 0 && ((z >> i) & 1U) == 1) state |= std::size_t{1} << (i - 1);
    }
    joint[state] += pr;
  }
  std::vector<Neighborhood> hoods(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t dist = i > j ? i - j : j - i;
      if (dist <= 1) hoods[i].a.push_back(j);
      if (dist <= 2) hoods[i].b.push_back(j);
    }
  }
  return DependentJointSpec(std::vector<std::size_t>(m, 1), std::vector<std::size_t>(m, 2), std::move(joint),
                            std::move(hoods));
}

/// Law of sum_v w_v eta_v under an explicit joint.
inline FinitePmf dependent_law(const DependentJointSpec& spec) {
  std::vector<CompensatedSum> acc(spec.max_weighted_sum() + 1);
  for (std::size_t s = 0; s < spec.state_count(); ++s) {
    const double p = spec.joint()[s];
    if (p != 0.0) acc[spec.weighted_sum(s)] += p;
  }
  std::vector<double> law(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) law[k] = acc[k].value();
  return FinitePmf(std::move(law));
}

/// Conditional law of W given one realization of eta_{B_i}.
struct ConditionalEntry {
  /// Realized values of eta_j, j in B_i, in the order of B_i.
  std::vector<std::size_t> values;
  double weight = 0.0;
  FinitePmf law;
  double smoothness = 2.0;
};

struct ConditionalTable {
  std::size_t index = 0;
  std::vector<ConditionalEntry> entries;
};

struct DependentLaw {
  FinitePmf law;
  std::vector<ConditionalTable> conditionals;
};

/// Law of W and, for every i, the conditional laws of W given each realized
/// eta_{B_i} together with their smoothness D. Conditioning on eta_{B_i}
/// already fixes eta_i and eta_{A_i}.
inline DependentLaw dependent_law_and_conditionals(const DependentJointSpec& spec) {
  DependentLaw out{dependent_law(spec), {}};
  const std::size_t top = spec.max_weighted_sum();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& b = spec.neighborhoods()[i].b;
    std::map<std::size_t, std::vector<CompensatedSum>> groups;
    std::map<std::size_t, std::size_t> representative;
    for (std::size_t s = 0; s < spec.state_count(); ++s) {
      const double p = spec.joint()[s];
      if (p == 0.0) continue;
      const std::size_t key = spec.sub_index(s, b);
      auto [it, fresh] = groups.try_emplace(key, top + 1);
      if (fresh) representative[key] = s;
      it->second[spec.weighted_sum(s)] += p;
    }
    ConditionalTable table;
    table.index = i;
    for (auto& [key, acc] : groups) {
      CompensatedSum total;
      std::vector<double> mass(acc.size());
      for (std::size_t k = 0; k < acc.size(); ++k) {
        mass[k] = acc[k].value();
        total += mass[k];
      }
      ConditionalEntry e;
      e.weight = total.value();
      for (double& x : mass) x /= e.weight;
      e.law = FinitePmf(std::move(mass));
      e.smoothness = smoothness_d(e.law);
      for (auto v : b) e.values.push_back(spec.value(representative[key], v));
      table.entries.push_back(std::move(e));
    }
    out.conditionals.push_back(std::move(table));
  }
  return out;
}

/// (1/2 sum_{j in F} min{1, 3 mu_j})^(-1/2), with F the parity class of
/// {2, ..., n} giving the smaller sum.
inline double runs_smoothness_factor(const RunsModel& model) {
  if (model.n() < 4) throw std::invalid_argument("runs_smoothness_factor: need n >= 4");
  CompensatedSum even;
  CompensatedSum odd;
  for (std::size_t j = 2; j <= model.n(); ++j) {
    const double term = std::min(1.0, 3.0 * model.mu(j));
    if (j % 2 == 0) {
      even += term;
    } else {
      odd += term;
    }
  }
  const double v = 0.5 * std::min(even.value(), odd.value());
  if (!(v > 0.0)) throw std::domain_error("runs_smoothness_factor: empty index set");
  return 1.0 / std::sqrt(v);
}

}  // namespace steinbound
