#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinbound/compensated_sum.hpp"
#include "steinbound/pmf.hpp"

namespace steinbound {

struct WeightedMarginal {
  std::size_t weight = 1;
  FinitePmf marginal;
};

/// W* = sum_i w_i eta_i with independent eta_i.
class IndependentSumSpec {
 public:
  explicit IndependentSumSpec(std::vector<WeightedMarginal> items) : items_(std::move(items)) {
    if (items_.empty()) throw std::invalid_argument("IndependentSumSpec: no items");
    bool unit = false;
    for (const auto& it : items_) {
      if (it.weight == 0) throw std::invalid_argument("IndependentSumSpec: weights must be >= 1");
      unit = unit || it.weight == 1;
    }
    if (!unit) throw std::invalid_argument("IndependentSumSpec: at least one weight must equal 1");
  }

  const std::vector<WeightedMarginal>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  const WeightedMarginal& operator[](std::size_t i) const { return items_.at(i); }

 private:
  std::vector<WeightedMarginal> items_;
};

/// Neighborhoods A_i and B_i of variable i, as sorted index lists.
struct Neighborhood {
  std::vector<std::size_t> a;
  std::vector<std::size_t> b;
};

/// Explicit joint law of (eta_0, ..., eta_{n-1}) on a product of supports
/// {0, ..., s_v - 1}, stored densely in mixed radix with variable 0 least
/// significant, plus the local dependence neighborhoods.
class DependentJointSpec {
 public:
  static constexpr std::size_t kMaxStates = 10'000'000;
  static constexpr double kJointTolerance = 1e-12;
  static constexpr double kIndependenceTolerance = 1e-10;

  DependentJointSpec(std::vector<std::size_t> weights, std::vector<std::size_t> support_sizes,
                     std::vector<double> joint, std::vector<Neighborhood> neighborhoods)
      : weights_(std::move(weights)),
        sizes_(std::move(support_sizes)),
        joint_(std::move(joint)),
        hoods_(std::move(neighborhoods)) {
    const std::size_t n = weights_.size();
    if (n == 0) throw std::invalid_argument("DependentJointSpec: no variables");
    if (sizes_.size() != n || hoods_.size() != n) {
      throw std::invalid_argument("DependentJointSpec: weights, supports and neighborhoods differ in length");
    }
    strides_.resize(n);
    std::size_t states = 1;
    for (std::size_t v = 0; v < n; ++v) {
      if (weights_[v] == 0) throw std::invalid_argument("DependentJointSpec: weights must be >= 1");
      if (sizes_[v] == 0) throw std::invalid_argument("DependentJointSpec: empty support");
      strides_[v] = states;
      if (states > kMaxStates / sizes_[v]) {
        throw std::length_error("DependentJointSpec: state space exceeds " + std::to_string(kMaxStates));
      }
      states *= sizes_[v];
    }
    if (joint_.size() != states) {
      throw std::invalid_argument("DependentJointSpec: joint has " + std::to_string(joint_.size()) +
                                  " entries, expected " + std::to_string(states));
    }
    CompensatedSum total;
    for (double p : joint_) {
      if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("DependentJointSpec: negative joint entry");
      total += p;
    }
    if (std::abs(total.value() - 1.0) > kJointTolerance) {
      throw std::invalid_argument("DependentJointSpec: joint sums to " + std::to_string(total.value()));
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto& h = hoods_[i];
      normalize_set(h.a, n);
      normalize_set(h.b, n);
      if (!std::binary_search(h.a.begin(), h.a.end(), i)) {
        throw std::invalid_argument("DependentJointSpec: variable " + std::to_string(i) + " not in its A");
      }
      if (!std::includes(h.b.begin(), h.b.end(), h.a.begin(), h.a.end())) {
        throw std::invalid_argument("DependentJointSpec: A not contained in B for variable " + std::to_string(i));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto& h = hoods_[i];
      const double d1 = dependence_tv({i}, complement(h.a));
      if (d1 > kIndependenceTolerance) {
        throw std::invalid_argument("DependentJointSpec: eta_" + std::to_string(i) +
                                    " depends on variables outside A (TV " + std::to_string(d1) + ")");
      }
      const double d2 = dependence_tv(h.a, complement(h.b));
      if (d2 > kIndependenceTolerance) {
        throw std::invalid_argument("DependentJointSpec: eta_A of variable " + std::to_string(i) +
                                    " depends on variables outside B (TV " + std::to_string(d2) + ")");
      }
    }
  }

  std::size_t size() const { return weights_.size(); }
  std::size_t state_count() const { return joint_.size(); }
  const std::vector<std::size_t>& weights() const { return weights_; }
  const std::vector<std::size_t>& support_sizes() const { return sizes_; }
  const std::vector<double>& joint() const { return joint_; }
  const std::vector<Neighborhood>& neighborhoods() const { return hoods_; }

  /// Value of variable v in joint state s.
  std::size_t value(std::size_t state, std::size_t v) const { return (state / strides_[v]) % sizes_[v]; }

  /// Largest attainable value of sum_v w_v eta_v.
  std::size_t max_weighted_sum() const {
    std::size_t m = 0;
    for (std::size_t v = 0; v < size(); ++v) m += weights_[v] * (sizes_[v] - 1);
    return m;
  }

  std::size_t weighted_sum(std::size_t state) const {
    std::size_t w = 0;
    for (std::size_t v = 0; v < size(); ++v) w += weights_[v] * value(state, v);
    return w;
  }

  /// Total variation distance between the joint law of (eta_X, eta_Y) and the
  /// product of the two marginals; X and Y must be disjoint.
  double dependence_tv(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) const {
    if (x.empty() || y.empty()) return 0.0;
    std::size_t nx = 1;
    std::size_t ny = 1;
    for (auto v : x) nx *= sizes_[v];
    for (auto v : y) ny *= sizes_[v];
    std::vector<double> pxy(nx * ny, 0.0);
    std::vector<double> px(nx, 0.0);
    std::vector<double> py(ny, 0.0);
    for (std::size_t s = 0; s < joint_.size(); ++s) {
      const double p = joint_[s];
      if (p == 0.0) continue;
      const std::size_t ix = sub_index(s, x);
      const std::size_t iy = sub_index(s, y);
      pxy[ix + nx * iy] += p;
      px[ix] += p;
      py[iy] += p;
    }
    CompensatedSum d;
    for (std::size_t iy = 0; iy < ny; ++iy) {
      for (std::size_t ix = 0; ix < nx; ++ix) d += std::abs(pxy[ix + nx * iy] - px[ix] * py[iy]);
    }
    return 0.5 * d.value();
  }

  /// Mixed-radix index of the values of `vars` in state s (first listed variable least significant).
  std::size_t sub_index(std::size_t state, const std::vector<std::size_t>& vars) const {
    std::size_t idx = 0;
    std::size_t mult = 1;
    for (auto v : vars) {
      idx += value(state, v) * mult;
      mult *= sizes_[v];
    }
    return idx;
  }

 private:
  static void normalize_set(std::vector<std::size_t>& s, std::size_t n) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (!s.empty() && s.back() >= n) throw std::invalid_argument("DependentJointSpec: neighborhood index out of range");
  }

  std::vector<std::size_t> complement(const std::vector<std::size_t>& s) const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < size(); ++v) {
      if (!std::binary_search(s.begin(), s.end(), v)) out.push_back(v);
    }
    return out;
  }

  std::vector<std::size_t> weights_;
  std::vector<std::size_t> sizes_;
  std::vector<double> joint_;
  std::vector<Neighborhood> hoods_;
  std::vector<std::size_t> strides_;
};

/// (1,1)-runs: W_n = sum_{i=2}^n (1 - zeta_{i-1}) zeta_i with independent
/// zeta_i ~ Ber(p_i). p[0] holds p_1.
struct RunsModel {
  std::vector<double> p;

  explicit RunsModel(std::vector<double> probs) : p(std::move(probs)) {
    if (p.size() < 2) throw std::invalid_argument("RunsModel: need at least two trials");
    for (double x : p) {
      if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("RunsModel: probabilities must lie in (0, 1)");
    }
  }

  static RunsModel iid(std::size_t n, double prob) { return RunsModel(std::vector<double>(n, prob)); }

  std::size_t n() const { return p.size(); }
  /// p_i for 1-based i.
  double at(std::size_t i) const { return p.at(i - 1); }
  /// E[(1 - zeta_{i-1}) zeta_i] for 2 <= i <= n.
  double mu(std::size_t i) const { return (1.0 - at(i - 1)) * at(i); }
};

}  // namespace steinbound
