// One PASS/FAIL line per acceptance criterion; detail lines are indented.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "steinbound/steinbound.hpp"

using namespace steinbound;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void require(bool ok, std::string what) {
    if (!ok) pass = false;
    lines.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", what));
  }
  void note(std::string what) { lines.push_back("     " + std::move(what)); }
};

int failures = 0;

void report(const char* id, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.lines.push_back(std::string("FAIL exception: ") + e.what());
  }
  std::printf("%s %s: %s\n", id, o.pass ? "PASS" : "FAIL", title);
  for (const auto& l : o.lines) std::printf("  %s\n", l.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

const std::vector<double> kPbSizes{2.0, 3.5, 7.0, 12.25, 30.0};
const std::vector<double> kPbProbs{0.05, 0.2, 0.5, 0.7, 0.95};
const std::vector<double> kNbShapes{0.5, 1.0, 3.0, 8.0, 20.0};
const std::vector<double> kNbProbs{0.1, 0.3, 0.5, 0.7, 0.9};

Outcome ac1() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto ours = cli::computed_table();
  const double elapsed = seconds_since(t0);
  const auto& paper = cli::published_table();
  for (std::size_t i = 0; i < ours.size(); ++i) {
    const auto& a = ours[i];
    const auto& b = paper[i];
    const double rel = std::abs(a.poisson - b.poisson) / b.poisson;
    o.require(rel <= 0.005, fmt::format("n={} poisson {:.6g} vs published {:.6g} (rel err {:.2e}, tol 5e-3)", a.n,
                                        a.poisson, b.poisson, rel));
    if (a.n == 10) {
      // The published entries in this row are rounding noise around an exact zero.
      o.require(a.cdo <= 1e-12 && a.cdo_gamma <= 1e-12,
                fmt::format("n=10 homogeneous row: {:.3g}, {:.3g} <= 1e-12", a.cdo, a.cdo_gamma));
      continue;
    }
    const double r1 = a.cdo / b.cdo;
    const double r2 = a.cdo_gamma / b.cdo_gamma;
    o.require(r1 >= 0.5 && r1 <= 2.0,
              fmt::format("n={} pb bound {:.6g} vs published {:.6g} (ratio {:.3f}, need [0.5, 2])", a.n, a.cdo, b.cdo, r1));
    o.require(r2 >= 0.5 && r2 <= 2.0, fmt::format("n={} smoothed pb bound {:.6g} vs published {:.6g} (ratio {:.3f}, need [0.5, 2])",
                                                  a.n, a.cdo_gamma, b.cdo_gamma, r2));
    o.require(a.cdo_gamma <= a.cdo && a.cdo <= a.poisson, fmt::format("n={} ordering smoothed <= pb <= poisson", a.n));
  }
  o.require(elapsed < 1.0, fmt::format("runtime {:.3f}s < 1s", elapsed));
  return o;
}

Outcome ac2() {
  Outcome o;
  for (const auto& [n, p] : std::vector<std::pair<std::size_t, double>>{{8, 0.35}, {12, 0.1}, {5, 0.8}}) {
    const auto t0 = Clock::now();
    const IndependentSumSpec spec(std::vector<WeightedMarginal>(n, {1, bernoulli(p)}));
    const auto bound = cor1_pb_bound(spec, GammaStrategy::Exact);
    const auto fit = oracle::exact_tv_to_fit(spec);
    const double elapsed = seconds_since(t0);
    o.require(bound.value <= 1e-12 && fit.exact_tv <= 1e-12 && elapsed < 1.0,
              fmt::format("{} x Ber({}): bound {:.3g}, exact TV {:.3g} (tol 1e-12), {:.3f}s", n, p, bound.value,
                          fit.exact_tv, elapsed));
  }
  // Geometric marginals are cut at 1e-14 of tail mass; the bound's slack terms carry the cut.
  for (const auto& [n, pbar] : std::vector<std::pair<std::size_t, double>>{{3, 0.4}, {4, 0.6}, {2, 0.25}}) {
    const auto t0 = Clock::now();
    const IndependentSumSpec spec(std::vector<WeightedMarginal>(n, {1, geometric(pbar, 1e-14)}));
    const auto bound = cor2_nb_bound(spec, GammaStrategy::Exact);
    const auto fit = oracle::exact_tv_to_fit(spec);
    const double elapsed = seconds_since(t0);
    o.require(bound.value <= 1e-7 && fit.exact_tv <= 1e-7 && elapsed < 1.0,
              fmt::format("{} x Geom({}): bound {:.3g}, exact TV {:.3g} (tol 1e-7), {:.3f}s", n, pbar, bound.value,
                          fit.exact_tv, elapsed));
  }
  return o;
}

Outcome ac3() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto mixed = summarize(dominance_harness(42, 200));
  GeneratorConfig dep;
  dep.kind = GeneratorConfig::Kind::Dependent;
  const auto dependent = summarize(dominance_harness(42, 50, dep));
  const double elapsed = seconds_since(t0);
  o.require(mixed.count == 200 && mixed.violates == 0,
            fmt::format("independent seed 42: {} dominate, {} violate, {} inconclusive, min bound/TV {:.3f}",
                        mixed.dominates, mixed.violates, mixed.inconclusive, mixed.min_ratio));
  o.require(dependent.count == 50 && dependent.violates == 0,
            fmt::format("dependent seed 42: {} dominate, {} violate, {} inconclusive, min bound/TV {:.3f}",
                        dependent.dominates, dependent.violates, dependent.inconclusive, dependent.min_ratio));
  o.require(elapsed < 120.0, fmt::format("runtime {:.2f}s < 120s", elapsed));
  return o;
}

Outcome ac4() {
  Outcome o;
  double pb_worst = 0.0;
  double nb_worst = 0.0;
  for (double n : kPbSizes) {
    for (double p : kPbProbs) {
      const SteinCoeffs c(PseudoBinomialParams(n, p));
      pb_worst = std::max(pb_worst, oracle::stein_identity_residual(c.alpha(), c.beta(), target_pmf(c)));
    }
  }
  for (double r : kNbShapes) {
    for (double pbar : kNbProbs) {
      const SteinCoeffs c(NegBinomialParams(r, pbar));
      nb_worst = std::max(nb_worst, oracle::stein_identity_residual(c.alpha(), c.beta(), target_pmf(c, 1e-12)));
    }
  }
  o.require(pb_worst <= 1e-12, fmt::format("PB 5x5 grid worst residual {:.3g} <= 1e-12", pb_worst));
  o.require(nb_worst <= 1e-7, fmt::format("NB 5x5 grid worst residual {:.3g} <= 1e-7", nb_worst));
  return o;
}

Outcome ac5() {
  Outcome o;
  std::size_t violations = 0;
  std::size_t cases = 0;
  auto check = [&](const SteinCoeffs& c, const FinitePmf& target, const std::string& label) {
    const auto emp = empirical_delta_g_sup(c, target);
    const double analytic = delta_g_analytic_bound(c);
    ++cases;
    if (emp.sup > analytic * (1.0 + 1e-9)) {
      ++violations;
      o.note(fmt::format("{}: empirical sup|dg| {:.6g} exceeds {:.6g} (ratio {:.4f}, {} functions)", label, emp.sup,
                         analytic, emp.sup / analytic, emp.functions_scanned));
    }
  };
  for (double n : kPbSizes) {
    for (double p : kPbProbs) {
      const SteinCoeffs c(PseudoBinomialParams(n, p));
      check(c, target_pmf(c), fmt::format("PB({}, {})", n, p));
    }
  }
  for (double r : kNbShapes) {
    for (double pbar : kNbProbs) {
      const SteinCoeffs c(NegBinomialParams(r, pbar));
      check(c, target_pmf(c, 1e-12), fmt::format("NB({}, {})", r, pbar));
    }
  }
  o.require(violations == 0, fmt::format("{} of {} grid points within the analytic constant", cases - violations, cases));
  return o;
}

Outcome ac6() {
  Outcome o;
  const auto t0 = Clock::now();
  for (std::size_t n : {100, 400}) {
    const double a = runs_bound(RunsModel::iid(n, 0.2)).value;
    const double b = runs_bound(RunsModel::iid(4 * n, 0.2)).value;
    const double ratio = b / a;
    o.require(ratio >= 0.35 && ratio <= 0.65,
              fmt::format("bound({}) / bound({}) = {:.4f} in [0.35, 0.65]", 4 * n, n, ratio));
  }
  for (std::size_t n : {10, 14}) {
    const RunsModel model = RunsModel::iid(n, 0.2);
    const auto bound = runs_bound(model);
    const auto v = oracle::make_verdict("runs", oracle::exact_tv_to_fit(runs_joint_spec(model)), bound.value);
    o.require(v.status == oracle::Status::Dominates,
              fmt::format("n={}: exact TV {:.6g} <= bound {:.6g}", n, v.exact_tv, v.bound_value));
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 30.0, fmt::format("runtime {:.3f}s < 30s", elapsed));
  return o;
}

Outcome ac7() {
  Outcome o;
  std::size_t grid = 0;
  std::size_t grid_bad = 0;
  for (double n : {1.5, 2.0, 4.7, 10.0, 18.0, 33.3}) {
    for (double p : {0.02, 0.1, 0.4, 0.8}) {
      const PseudoBinomialParams pb(n, p);
      for (double z : {0.0, 0.5, 1.0, 2.0, 3.7, 10.0}) {
        ++grid;
        const double loss = expect_positive_part(pb_pmf(pb), z);
        if (loss > n * p * (1.0 + 1e-12)) ++grid_bad;
      }
    }
  }
  o.require(grid_bad == 0, fmt::format("E[(PB-z)+] <= Np at {} of {} grid points", grid - grid_bad, grid));

  std::size_t checked = 0;
  std::size_t bad = 0;
  double worst = INFINITY;
  for (std::size_t idx = 0; checked < 50; ++idx) {
    InstanceRng rng(splitmix64(splitmix64(7) + idx));
    const std::size_t n = rng.uniform_int(2, 8);
    std::vector<double> probs(n);
    for (auto& p : probs) p = rng.uniform(0.02, 0.6);
    std::vector<WeightedMarginal> items;
    for (double p : probs) items.push_back({1, bernoulli(p)});
    const IndependentSumSpec spec(std::move(items));
    const FinitePmf law = oracle::enumerate_law(spec);
    const auto mo = moments(law);
    const SteinCoeffs c = fit_coeffs(mo.mean, mo.variance);
    const auto& pb = c.pb();
    const auto t2 = thm2_bound(spec, c, gamma_exact(spec), cdo_delta_g_bound(pb));
    ++checked;
    for (double z : {0.0, 0.5, 1.0, 2.0, 3.0}) {
      const double lhs = std::abs(expect_positive_part(law, z) - expect_positive_part(pb_pmf(pb), z));
      const double margin = t2.value - lhs;
      worst = std::min(worst, margin);
      if (margin < -1e-12) {
        ++bad;
        o.note(fmt::format("spec #{} n={} N={:.4f} z={}: |diff| {:.6g} > bound {:.6g}", idx, n, pb.n(), z, lhs, t2.value));
      }
    }
  }
  o.require(bad == 0, fmt::format("{} indicator specs x 5 attachments, {} violations, worst margin {:.3g}", checked,
                                  bad, worst));
  return o;
}

Outcome ac8() {
  Outcome o;
  double pb_err = 0.0;
  for (int n : {2, 3, 5, 10, 25, 60}) {
    for (double p : kPbProbs) {
      const auto mo = moments(pb_pmf(PseudoBinomialParams(n, p)));
      const auto c = fit_coeffs(mo.mean, mo.variance);
      pb_err = std::max({pb_err, std::abs(c.pb().n() - n), std::abs(c.pb().p() - p)});
    }
  }
  double nb_err = 0.0;
  for (double r : kNbShapes) {
    for (double pbar : kNbProbs) {
      const NegBinomialParams nb(r, pbar);
      const auto c = fit_coeffs(nb.mean(), nb.variance());
      nb_err = std::max({nb_err, std::abs(c.nb().r() - r), std::abs(c.nb().pbar() - pbar)});
    }
  }
  o.require(pb_err <= 1e-10, fmt::format("binomial grid worst parameter error {:.3g} <= 1e-10", pb_err));
  o.require(nb_err <= 1e-10, fmt::format("negative binomial grid worst parameter error {:.3g} <= 1e-10", nb_err));
  return o;
}

}  // namespace

int main() {
  report("AC1", "table reproduction", ac1);
  report("AC2", "homogeneity zeros", ac2);
  report("AC3", "dominance property suite", ac3);
  report("AC4", "Stein identity residuals", ac4);
  report("AC5", "delta g constants", ac5);
  report("AC6", "runs asymptotics", ac6);
  report("AC7", "tranche-loss inequality chain", ac7);
  report("AC8", "moment-match round trips", ac8);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
