#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "steinbound/distributions.hpp"
#include "steinbound/error.hpp"
#include "steinbound/stein.hpp"
#include "test_support.hpp"

using namespace steinbound;

namespace {

// g(k+1) = (k g(k) + f(k) - Ef) / (alpha + beta k), straight from the definition.
std::vector<double> forward_recurrence(const SteinCoeffs& c, const FinitePmf& target, const std::vector<double>& f) {
  double ef = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) ef += f[i] * target[i];
  std::vector<double> g(f.size() + 1, 0.0);
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    g[k + 1] = (static_cast<double>(k) * g[k] + f[k] - ef) / c.coefficient(k);
  }
  return g;
}

double max_residual(const SteinCoeffs& c, const FinitePmf& target, const std::vector<double>& f,
                    const SteinSolution& sol) {
  double worst = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (!(c.coefficient(k) > 0.0) && k + 1 < target.size()) continue;
    const double lhs = stein_apply(c, sol, k);
    worst = std::max(worst, std::abs(lhs - (f[k] - sol.expected_f)));
  }
  return worst;
}

std::vector<SteinCoeffs> coefficient_grid() {
  std::vector<SteinCoeffs> out;
  for (double n : {2.0, 3.7, 5.0, 8.25, 12.0}) {
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) out.emplace_back(PseudoBinomialParams(n, p));
  }
  for (double r : {0.5, 1.0, 2.5, 4.0, 8.0}) {
    for (double pbar : {0.2, 0.4, 0.5, 0.7, 0.9}) out.emplace_back(NegBinomialParams(r, pbar));
  }
  return out;
}

}  // namespace

TEST(SteinCoeffsTest, FamilyCoefficients) {
  const SteinCoeffs pb(PseudoBinomialParams(4.0, 0.25));
  EXPECT_NEAR(pb.alpha(), 4.0 * 0.25 / 0.75, 1e-15);
  EXPECT_NEAR(pb.beta(), -0.25 / 0.75, 1e-15);
  EXPECT_EQ(pb.kind(), TargetKind::PseudoBinomial);
  EXPECT_NEAR(pb.mean(), 1.0, 1e-15);
  EXPECT_NEAR(pb.variance(), 0.75, 1e-15);
  EXPECT_THROW(pb.nb(), std::logic_error);

  const SteinCoeffs nb(NegBinomialParams(4.0, 0.5));
  EXPECT_NEAR(nb.alpha(), 2.0, 1e-15);
  EXPECT_NEAR(nb.beta(), 0.5, 1e-15);
  EXPECT_NEAR(nb.mean(), 4.0, 1e-15);
  EXPECT_NEAR(nb.variance(), 8.0, 1e-15);
  EXPECT_THROW(nb.pb(), std::logic_error);

  const auto g = SteinCoeffs::generic(1.0, 0.0);
  EXPECT_EQ(g.kind(), TargetKind::Generic);
  EXPECT_THROW(target_pmf(g), std::invalid_argument);
}

TEST(FitCoeffsTest, Examples) {
  const auto a = fit_coeffs(1.5, 1.05);
  ASSERT_EQ(a.kind(), TargetKind::PseudoBinomial);
  EXPECT_NEAR(a.pb().n(), 5.0, 1e-12);
  EXPECT_NEAR(a.pb().p(), 0.3, 1e-12);

  const auto b = fit_coeffs(1.0, 2.0);
  ASSERT_EQ(b.kind(), TargetKind::NegBinomial);
  EXPECT_NEAR(b.nb().pbar(), 0.5, 1e-15);
  EXPECT_NEAR(b.nb().r(), 1.0, 1e-15);

  const auto c = fit_coeffs(0.5, 0.475);
  ASSERT_EQ(c.kind(), TargetKind::PseudoBinomial);
  EXPECT_NEAR(c.pb().n(), 10.0, 1e-10);
  EXPECT_NEAR(c.pb().p(), 0.05, 1e-12);
  EXPECT_NEAR(c.pb().n() * c.pb().p(), 0.5, 1e-12);
  EXPECT_NEAR(c.pb().n() * c.pb().p() * c.pb().q(), 0.475, 1e-12);
  EXPECT_NEAR(c.alpha(), 0.5 * 0.5 / 0.475, 1e-15);
  EXPECT_NEAR(c.beta(), -0.025 / 0.475, 1e-15);
}

TEST(FitCoeffsTest, Errors) {
  EXPECT_THROW(fit_coeffs(1.0, 1.0), InfeasibleModel);
  EXPECT_NO_THROW(fit_coeffs(1.0, 0.1));
}

TEST(FitCoeffsTest, RejectsNAtMostOne) {
  // m^2 / (m - v) <= 1 iff m^2 <= m - v.
  EXPECT_THROW(fit_coeffs(0.5, 0.2), InfeasibleModel);
  EXPECT_THROW(fit_coeffs(0.5, 0.25), InfeasibleModel);
  EXPECT_NO_THROW(fit_coeffs(0.5, 0.26));
  EXPECT_THROW(fit_coeffs(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(fit_coeffs(1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(fit_coeffs(NAN, 1.0), std::invalid_argument);
}

TEST(SteinApplyTest, Examples) {
  const SteinCoeffs c(PseudoBinomialParams(2.0, 0.5));
  EXPECT_NEAR(c.alpha(), 2.0, 1e-15);
  EXPECT_NEAR(c.beta(), -1.0, 1e-15);
  auto ind1 = [](std::size_t k) { return k == 1 ? 1.0 : 0.0; };
  EXPECT_NEAR(stein_apply(c, ind1, 1), -1.0, 1e-15);
  EXPECT_NEAR(stein_apply(c, ind1, 0), c.alpha(), 1e-15);
  EXPECT_EQ(stein_apply(c, [](std::size_t) { return 0.0; }, 3), 0.0);
}

TEST(SolveSteinTest, ConstantFGivesZero) {
  const SteinCoeffs c(PseudoBinomialParams(6.0, 0.4));
  const auto t = target_pmf(c);
  const auto sol = solve_stein(c, t, std::vector<double>(t.size(), 0.7));
  for (double g : sol.g) EXPECT_NEAR(g, 0.0, 1e-15);
}

TEST(SolveSteinTest, OneStep) {
  const SteinCoeffs c(PseudoBinomialParams(2.0, 0.5));
  const auto sol = solve_stein_indicator(c, target_pmf(c), 0);
  EXPECT_NEAR(sol.expected_f, 0.25, 1e-15);
  EXPECT_EQ(sol.g[0], 0.0);
  EXPECT_NEAR(sol.g[1], 0.375, 1e-15);
  EXPECT_TRUE(sol.top_by_continuation);
  EXPECT_EQ(sol.g[3], sol.g[2]);
}

TEST(SolveSteinTest, NonIntegerTopIsZero) {
  const SteinCoeffs c(PseudoBinomialParams(3.5, 0.4));
  const auto t = target_pmf(c);
  const auto sol = solve_stein_indicator(c, t, 1);
  EXPECT_FALSE(sol.top_by_continuation);
  EXPECT_EQ(sol.g.size(), t.size() + 1);
  EXPECT_EQ(sol.g.back(), 0.0);
}

TEST(SolveSteinTest, RejectsMismatchedF) {
  const SteinCoeffs c(PseudoBinomialParams(4.0, 0.3));
  EXPECT_THROW(solve_stein(c, target_pmf(c), std::vector<double>(2, 0.0)), std::invalid_argument);
}

TEST(SolveSteinTest, TinyGenericCoefficientThrows) {
  const auto c = SteinCoeffs::generic(1e-320, 0.0);
  EXPECT_THROW(solve_stein_indicator(c, FinitePmf({0.5, 0.5}), 0), std::domain_error);
}

TEST(SolveSteinTest, GenericMatchesRecurrence) {
  const auto c = SteinCoeffs::generic(1.3, 0.2);
  const FinitePmf t({0.3, 0.4, 0.2, 0.1});
  const std::vector<double> f{0.0, 1.0, 0.0, 1.0};
  const auto sol = solve_stein(c, t, f);
  const auto want = forward_recurrence(c, t, f);
  for (std::size_t k = 0; k + 1 < want.size(); ++k) EXPECT_NEAR(sol.g[k], want[k], 1e-15);
}

TEST(SteinProperties, TwoSidedMatchesForwardRecurrence) {
  // Small supports, where the forward recurrence is still well conditioned.
  for (double n : {2.0, 3.0, 4.5, 6.0}) {
    for (double p : {0.2, 0.5, 0.8}) {
      const SteinCoeffs c(PseudoBinomialParams(n, p));
      const auto t = target_pmf(c);
      for (std::size_t j = 0; j < t.size(); ++j) {
        std::vector<double> f(t.size(), 0.0);
        f[j] = 1.0;
        const auto sol = solve_stein(c, t, f);
        const auto want = forward_recurrence(c, t, f);
        for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(sol.g[k], want[k], 1e-12) << n << " " << p;
      }
    }
  }
}

TEST(SteinProperties, ResidualOnIndicators) {
  for (const auto& c : coefficient_grid()) {
    const auto t = target_pmf(c);
    for (std::size_t j = 0; j < t.size(); ++j) {
      std::vector<double> f(t.size(), 0.0);
      f[j] = 1.0;
      const auto sol = solve_stein(c, t, f);
      EXPECT_LE(max_residual(c, t, f, sol), 1e-10) << to_string(c.kind()) << " " << c.alpha() << " " << j;
    }
  }
}

TEST(SteinProperties, SolutionIsLinear) {
  testsupport::Rng rng(31);
  for (const auto& c : coefficient_grid()) {
    const auto t = target_pmf(c);
    std::vector<double> f(t.size());
    std::vector<double> h(t.size());
    std::vector<double> mix(t.size());
    const double a = rng.uniform(-2.0, 2.0);
    const double b = rng.uniform(-2.0, 2.0);
    for (std::size_t k = 0; k < t.size(); ++k) {
      f[k] = rng.uniform();
      h[k] = rng.uniform();
      mix[k] = a * f[k] + b * h[k];
    }
    const auto gf = solve_stein(c, t, f);
    const auto gh = solve_stein(c, t, h);
    const auto gm = solve_stein(c, t, mix);
    for (std::size_t k = 0; k < gm.g.size(); ++k) EXPECT_NEAR(gm.g[k], a * gf.g[k] + b * gh.g[k], 1e-12);
  }
}

TEST(SteinProperties, ExpectationIdentityOnPseudoBinomial) {
  testsupport::Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const SteinCoeffs c(PseudoBinomialParams(rng.uniform(1.5, 15.0), rng.uniform(0.05, 0.95)));
    const auto t = target_pmf(c);
    const auto w = testsupport::random_pmf(rng, t.size());
    std::vector<double> f(t.size());
    for (auto& x : f) x = rng.uniform();
    const auto sol = solve_stein(c, t, f);
    double lhs = 0.0;
    double ew = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      lhs += w[k] * stein_apply(c, sol, k);
      ew += w[k] * f[k];
    }
    EXPECT_NEAR(lhs, ew - sol.expected_f, 1e-10);
  }
}

TEST(SteinProperties, ExpectationIdentityOnNegBinomial) {
  testsupport::Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const SteinCoeffs c(NegBinomialParams(rng.uniform(0.3, 10.0), rng.uniform(0.2, 0.9)));
    const auto t = target_pmf(c);
    const auto w = testsupport::random_pmf(rng, std::min<std::size_t>(t.size(), 8));
    std::vector<double> f(t.size(), 0.0);
    for (std::size_t k = 0; k < std::min<std::size_t>(t.size(), 10); ++k) f[k] = rng.uniform();
    const auto sol = solve_stein(c, t, f);
    double lhs = 0.0;
    double ew = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      lhs += w[k] * stein_apply(c, sol, k);
      ew += w[k] * f[k];
    }
    EXPECT_NEAR(lhs, ew - sol.expected_f, 1e-10);
  }
}

TEST(SteinProperties, FitRoundTripIntegerGrid) {
  for (int n = 2; n <= 30; ++n) {
    for (int j = 1; j <= 9; ++j) {
      const double p = 0.1 * j;
      const auto mo = moments(pb_pmf(PseudoBinomialParams(n, p)));
      const auto c = fit_coeffs(mo.mean, mo.variance);
      ASSERT_EQ(c.kind(), TargetKind::PseudoBinomial);
      EXPECT_NEAR(c.pb().n(), n, 1e-10 * n) << n << " " << p;
      EXPECT_NEAR(c.pb().p(), p, 1e-10) << n << " " << p;
    }
  }
}

TEST(DeltaGTest, AnalyticConstants) {
  EXPECT_NEAR(delta_g_analytic_bound(SteinCoeffs(PseudoBinomialParams(10.0, 0.05))), 2.0, 1e-14);
  EXPECT_NEAR(delta_g_analytic_bound(SteinCoeffs(NegBinomialParams(4.0, 0.5))), 0.5, 1e-15);
  EXPECT_NEAR(pb_corollary_prefactor(PseudoBinomialParams(10.0, 0.05)), 2.0 / 0.95, 1e-14);
  EXPECT_THROW(delta_g_analytic_bound(SteinCoeffs::generic(1.0, 0.1)), std::invalid_argument);
}

TEST(DeltaGTest, EmpiricalWithinAnalyticForPb5) {
  const SteinCoeffs c(PseudoBinomialParams(5.0, 0.3));
  const auto emp = empirical_delta_g_sup(c, target_pmf(c));
  EXPECT_GT(emp.sup, 0.0);
  EXPECT_LE(emp.sup, delta_g_analytic_bound(c));
  // 6 points, 6 half-lines, 62 proper non-empty subsets.
  EXPECT_EQ(emp.functions_scanned, 6u + 6u + 62u);
}

TEST(CdoSteinTest, DeltaGBound) {
  EXPECT_NEAR(cdo_delta_g_bound(PseudoBinomialParams(10.0, 0.05)), 1.95 / std::pow(0.95, 10), 1e-13);
  EXPECT_NEAR(cdo_delta_g_bound(PseudoBinomialParams(10.0, 0.05)), 3.2575, 1e-3);
  EXPECT_NEAR(cdo_delta_g_bound(PseudoBinomialParams(18.0, 1.0 / 12.0)), 9.177, 1e-3);
  EXPECT_NEAR(cdo_delta_g_bound(PseudoBinomialParams(5.0, 1e-9)), 2.0, 1e-7);
  double prev = INFINITY;
  for (double p : {0.5, 0.1, 0.01, 0.001}) {
    const double v = cdo_delta_g_bound(PseudoBinomialParams(7.0, p));
    EXPECT_LT(v, prev);
    EXPECT_GT(v, 2.0);
    prev = v;
  }
}

TEST(CdoSteinTest, ExpectedLoss) {
  const PseudoBinomialParams pb(10.0, 0.05);
  EXPECT_NEAR(cdo_expected_pb_loss(pb, 0.0), 0.5, 1e-14);
  EXPECT_EQ(cdo_expected_pb_loss(pb, 10.0), 0.0);
  EXPECT_EQ(cdo_expected_pb_loss(pb, 12.5), 0.0);
}

TEST(CdoSteinProperties, ExpectedLossBelowNp) {
  for (double n : {1.5, 2.0, 4.3, 10.0, 17.8, 30.0}) {
    for (double p : {0.02, 0.1, 0.3, 0.6, 0.9}) {
      const PseudoBinomialParams pb(n, p);
      for (double z = 0.0; z <= 12.0; z += 0.5) EXPECT_LE(cdo_expected_pb_loss(pb, z), n * p * (1 + 1e-12));
    }
  }
}
