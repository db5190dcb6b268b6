#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <fmt/format.h>

namespace steinbound::cli {

namespace {

constexpr double kLossTolerance = 1e-12;

Cell count_cell(std::size_t n) { return static_cast<std::int64_t>(n); }

bool is_loss_bound(const std::string& name) {
  return name == "cdo" || name == "cdo-gamma" || name == "cdo-dependent" || name == "cdo-runs";
}

DependentJointSpec product_joint(const IndependentSumSpec& spec) {
  std::vector<std::size_t> weights;
  std::vector<std::size_t> sizes;
  double states = 1.0;
  for (const auto& it : spec.items()) {
    weights.push_back(it.weight);
    sizes.push_back(it.marginal.size());
    states *= static_cast<double>(it.marginal.size());
  }
  if (states > static_cast<double>(DependentJointSpec::kMaxStates)) {
    throw std::length_error("product joint: too many states");
  }
  std::vector<double> joint(static_cast<std::size_t>(states));
  for (std::size_t s = 0; s < joint.size(); ++s) {
    double p = 1.0;
    std::size_t rest = s;
    for (std::size_t v = 0; v < sizes.size(); ++v) {
      p *= spec[v].marginal[rest % sizes[v]];
      rest /= sizes[v];
    }
    joint[s] = p;
  }
  std::vector<Neighborhood> hoods(sizes.size());
  for (std::size_t i = 0; i < hoods.size(); ++i) hoods[i] = {{i}, {i}};
  return DependentJointSpec(std::move(weights), std::move(sizes), std::move(joint), std::move(hoods));
}

IndependentSumSpec indicator_spec(const std::vector<double>& probs) {
  std::vector<WeightedMarginal> items;
  for (double p : probs) items.push_back({1, bernoulli(p)});
  return IndependentSumSpec(std::move(items));
}

/// The scenario in the forms the bounds and the oracle consume.
struct Materialized {
  std::optional<IndependentSumSpec> independent;
  std::optional<DependentJointSpec> joint;
  std::optional<RunsModel> runs;
  double mean = 0.0;
  double variance = 0.0;
  /// Joint states the oracle would enumerate.
  double states = 0.0;
};

double spec_states(const IndependentSumSpec& spec) {
  double s = 1.0;
  for (const auto& it : spec.items()) s *= static_cast<double>(it.marginal.size());
  return s;
}

Materialized materialize(const ScenarioConfig& cfg) {
  Materialized m;
  switch (cfg.model) {
    case ModelKind::Independent: {
      m.independent.emplace(cfg.items);
      const auto mo = moments(independent_law(*m.independent));
      m.mean = mo.mean;
      m.variance = mo.variance;
      m.states = spec_states(*m.independent);
      break;
    }
    case ModelKind::Runs:
      m.runs.emplace(cfg.probs);
      m.mean = runs_mean(*m.runs);
      m.variance = runs_variance(*m.runs);
      m.states = std::pow(2.0, static_cast<double>(cfg.probs.size()));
      break;
    case ModelKind::ExplicitJoint: {
      m.joint = cfg.joint;
      const auto mo = moments(dependent_law(*m.joint));
      m.mean = mo.mean;
      m.variance = mo.variance;
      m.states = static_cast<double>(m.joint->joint().size());
      break;
    }
    case ModelKind::Cdo: {
      m.independent.emplace(indicator_spec(cfg.probs));
      CompensatedSum s1;
      CompensatedSum s2;
      for (double p : cfg.probs) {
        s1 += p;
        s2 += p * (1.0 - p);
      }
      m.mean = s1.value();
      m.variance = s2.value();
      m.states = std::pow(2.0, static_cast<double>(cfg.probs.size()));
      break;
    }
    case ModelKind::CompoundPoisson: {
      std::vector<WeightedMarginal> items;
      CompensatedSum s1;
      CompensatedSum s2;
      for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
        const double w = static_cast<double>(i + 1);
        items.push_back({i + 1, poisson(cfg.lambdas[i], cfg.eps)});
        s1 += w * cfg.lambdas[i];
        s2 += w * w * cfg.lambdas[i];
      }
      m.independent.emplace(std::move(items));
      m.mean = s1.value();
      m.variance = s2.value();
      m.states = spec_states(*m.independent);
      break;
    }
    case ModelKind::NbOfNb: {
      std::vector<WeightedMarginal> items;
      CompensatedSum s1;
      CompensatedSum s2;
      for (const auto& c : cfg.components) {
        const NegBinomialParams nb(c.n, c.p);
        items.push_back({1, nb_pmf(nb, cfg.eps)});
        s1 += nb.mean();
        s2 += nb.variance();
      }
      m.independent.emplace(std::move(items));
      m.mean = s1.value();
      m.variance = s2.value();
      m.states = spec_states(*m.independent);
      break;
    }
  }
  return m;
}

SteinCoeffs checked_fit(const ScenarioConfig& cfg, const Materialized& m) {
  if (cfg.target == TargetChoice::Pb && !(m.mean > m.variance)) {
    throw InfeasibleModel("target pb needs mean > variance");
  }
  if (cfg.target == TargetChoice::Nb && !(m.variance > m.mean)) {
    throw InfeasibleModel("target nb needs variance > mean");
  }
  return fit_coeffs(m.mean, m.variance);
}

BoundReport poisson_report(const std::vector<double>& probs) {
  BoundReport r;
  r.name = "poisson-existing";
  r.value = poisson_existing_bound(probs);
  r.terms = {{"value", r.value}};
  return r;
}

BoundReport evaluate_bound(const std::string& name, const ScenarioConfig& cfg, Materialized& m, const SteinCoeffs& fit) {
  switch (cfg.model) {
    case ModelKind::Independent:
      if (name == "corollary") return corollary_bound(*m.independent, cfg.gamma);
      return thm1_bound(product_joint(*m.independent), fit, cfg.smoothness);
    case ModelKind::Runs:
      if (name == "runs") return runs_bound(*m.runs);
      if (name == "cdo-runs") return cdo_bound_runs_display(*m.runs);
      if (!m.joint) m.joint = runs_joint_spec(*m.runs);
      return thm1_bound(*m.joint, fit, cfg.smoothness);
    case ModelKind::ExplicitJoint:
      if (name == "cdo-dependent") return cdo_bound_dependent(*m.joint, cfg.smoothness);
      return thm1_bound(*m.joint, fit, cfg.smoothness);
    case ModelKind::Cdo:
      if (name == "cdo") return cdo_bound_independent(cfg.probs);
      if (name == "cdo-gamma") return cdo_bound_independent_gamma(cfg.probs);
      if (name == "poisson") return poisson_report(cfg.probs);
      return cdo_bound_dependent(product_joint(*m.independent), cfg.smoothness);
    case ModelKind::CompoundPoisson: return compound_poisson_bound(cfg.lambdas, cfg.eps);
    case ModelKind::NbOfNb: return nb_of_nb_bound(cfg.components, cfg.eps);
  }
  throw std::logic_error("unreachable");
}

void add_fit_fields(Report& rep, const SteinCoeffs& fit) {
  rep.fields.push_back({"fit", std::string(to_string(fit.kind()))});
  rep.fields.push_back({"alpha", fit.alpha()});
  rep.fields.push_back({"beta", fit.beta()});
  if (fit.kind() == TargetKind::PseudoBinomial) {
    rep.fields.push_back({"N", fit.pb().n()});
    rep.fields.push_back({"p", fit.pb().p()});
  } else if (fit.kind() == TargetKind::NegBinomial) {
    rep.fields.push_back({"r", fit.nb().r()});
    rep.fields.push_back({"pbar", fit.nb().pbar()});
  }
}

void add_bound_tables(Report& rep, const std::vector<std::pair<std::string, BoundReport>>& bounds) {
  Table summary{"bounds", {"bound", "report", "value", "delta_g_constant", "smoothness", "smoothness_value", "term_sum"}, {}};
  for (const auto& [name, b] : bounds) {
    summary.rows.push_back({name, b.name, b.value, b.delta_g_constant, b.smoothness_label, b.smoothness, b.term_sum()});
  }
  rep.tables.push_back(std::move(summary));
  for (const auto& [name, b] : bounds) {
    Table terms{"terms: " + name, {"term", "value"}, {}};
    for (const auto& t : b.terms) terms.rows.push_back({t.label, t.value});
    rep.tables.push_back(std::move(terms));
    if (!b.details.empty() || !b.notes.empty()) {
      Table details{"details: " + name, {"detail", "value"}, {}};
      for (const auto& d : b.details) details.rows.push_back({d.label, d.value});
      for (const auto& note : b.notes) details.rows.push_back({"note", note});
      rep.tables.push_back(std::move(details));
    }
  }
}

FinitePmf oracle_law(const Materialized& m, const ScenarioConfig& cfg) {
  if (cfg.model == ModelKind::Runs) return oracle::enumerate_law(runs_joint_spec(*m.runs));
  if (cfg.model == ModelKind::ExplicitJoint) return oracle::enumerate_law(*m.joint);
  return oracle::enumerate_law(*m.independent);
}

void add_oracle_fields(Report& rep, const Materialized& m, const oracle::OracleFit& fit) {
  rep.fields.push_back({"oracle_states", m.states < 9e15 ? Cell(static_cast<std::int64_t>(m.states)) : Cell(m.states)});
  rep.fields.push_back({"exact_tv", fit.exact_tv});
  rep.fields.push_back({"oracle_fit", std::string(oracle::to_string(fit.family))});
  rep.fields.push_back({"oracle_size", fit.size});
  rep.fields.push_back({"oracle_prob", fit.prob});
  rep.fields.push_back({"law_deficit", fit.law.mass_deficit()});
  rep.fields.push_back({"target_deficit", fit.target.mass_deficit()});
  if (fit.family == oracle::Family::PseudoBinomial) rep.fields.push_back({"support_overflow", fit.support_overflow});
}

Report scenario_header(const ScenarioConfig& cfg, const Materialized& m) {
  Report rep;
  rep.title = cfg.name;
  rep.fields = {{"model", std::string(to_string(cfg.model))},
                {"target", std::string(to_string(cfg.target))},
                {"eps", cfg.eps},
                {"mean", m.mean},
                {"variance", m.variance}};
  return rep;
}

}  // namespace

Report run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  Materialized m = materialize(cfg);
  const SteinCoeffs fit = checked_fit(cfg, m);
  Report rep = scenario_header(cfg, m);
  add_fit_fields(rep, fit);

  std::vector<std::pair<std::string, BoundReport>> bounds;
  for (const auto& name : cfg.bounds) bounds.emplace_back(name, evaluate_bound(name, cfg, m, fit));
  add_bound_tables(rep, bounds);

  const OracleMode mode = cfg.oracle.value_or(opts.oracle);
  const bool run = mode == OracleMode::On || (mode == OracleMode::Auto && m.states <= opts.auto_state_limit);
  rep.fields.push_back({"oracle", std::string(run ? "on" : "off")});
  if (!run) return rep;

  const FinitePmf law = oracle_law(m, cfg);
  const auto ofit = oracle::fit_and_compare(law);
  add_oracle_fields(rep, m, ofit);

  Table verdicts{"verdicts", {"bound", "bound_value", "exact_tv", "slack", "margin", "status"}, {}};
  for (const auto& [name, b] : bounds) {
    if (is_loss_bound(name) || name == "poisson") continue;
    const auto v = oracle::make_verdict(name, ofit, b.value);
    verdicts.rows.push_back({name, v.bound_value, v.exact_tv, v.slack, v.margin, std::string(oracle::to_string(v.status))});
  }
  if (!verdicts.rows.empty()) rep.tables.push_back(std::move(verdicts));

  Table losses{"expected loss", {"bound", "z", "exact_loss", "pb_loss", "abs_diff", "bound_value", "status"}, {}};
  for (const auto& [name, b] : bounds) {
    if (!is_loss_bound(name) || !b.target) continue;
    const auto& pb = b.target->pb();
    for (double z : cfg.attachments) {
      const double exact = expect_positive_part(law, z);
      const double approx = cdo_expected_pb_loss(pb, z);
      const double diff = std::abs(exact - approx);
      const bool holds = diff <= b.value + kLossTolerance;
      losses.rows.push_back({name, z, exact, approx, diff, b.value, std::string(holds ? "dominates" : "violates")});
    }
  }
  if (!losses.rows.empty()) rep.tables.push_back(std::move(losses));
  return rep;
}

Report oracle_scenario(const ScenarioConfig& cfg) {
  const Materialized m = materialize(cfg);
  Report rep = scenario_header(cfg, m);
  const FinitePmf law = oracle_law(m, cfg);
  const auto ofit = oracle::fit_and_compare(law);
  add_oracle_fields(rep, m, ofit);
  rep.fields.push_back({"stein_residual", oracle::stein_identity_residual(ofit.alpha, ofit.beta, ofit.target)});
  Table t{"law", {"k", "law", "target"}, {}};
  const std::size_t top = std::max(law.size(), ofit.target.size());
  for (std::size_t k = 0; k < top; ++k) t.rows.push_back({count_cell(k), law[k], ofit.target[k]});
  rep.tables.push_back(std::move(t));
  return rep;
}

Document run_scenarios(const std::string& command, const std::vector<ScenarioConfig>& cfgs, const RunOptions& opts,
                       bool oracle_only) {
  std::vector<std::future<Report>> jobs;
  for (const auto& cfg : cfgs) {
    jobs.push_back(std::async(std::launch::async, [&cfg, &opts, oracle_only] {
      return oracle_only ? oracle_scenario(cfg) : run_scenario(cfg, opts);
    }));
  }
  Document doc{command, {}};
  for (auto& j : jobs) doc.reports.push_back(j.get());
  return doc;
}

const std::vector<TableRow>& published_table() {
  static const std::vector<TableRow> rows{{10, 7.14e-17, 6.00e-18, 0.0574},
                                          {20, 0.3711, 0.01630, 0.9954},
                                          {30, 4.9800, 0.36415, 13.7099},
                                          {40, 111.8440, 11.7054, 221.8700},
                                          {50, 3311.4600, 897.600, 4970.7400}};
  return rows;
}

std::vector<TableRow> computed_table() {
  std::vector<TableRow> out;
  for (const auto& row : published_table()) {
    const auto probs = cdo_table_probabilities(row.n);
    out.push_back({row.n, cdo_bound_independent(probs).value, cdo_bound_independent_gamma(probs).value,
                   poisson_existing_bound(probs)});
  }
  return out;
}

Document table_command() {
  const auto ours = computed_table();
  const auto& paper = published_table();
  Table t{"comparison",
          {"n", "pb_bound", "pb_bound_published", "pb_bound_ratio", "pb_gamma_bound", "pb_gamma_bound_published",
           "pb_gamma_bound_ratio", "poisson_bound", "poisson_bound_published", "poisson_rel_error", "ordering"},
          {}};
  for (std::size_t i = 0; i < ours.size(); ++i) {
    const auto& a = ours[i];
    const auto& b = paper[i];
    std::string ordering = "-";
    if (a.n >= 20) ordering = a.cdo_gamma <= a.cdo && a.cdo <= a.poisson ? "ok" : "broken";
    t.rows.push_back({count_cell(a.n), a.cdo, b.cdo, a.cdo / b.cdo, a.cdo_gamma, b.cdo_gamma, a.cdo_gamma / b.cdo_gamma,
                      a.poisson, b.poisson, std::abs(a.poisson - b.poisson) / b.poisson, ordering});
  }
  Report rep;
  rep.title = "tranche loss bounds";
  rep.tables.push_back(std::move(t));
  return {"table", {std::move(rep)}};
}

Document harness_command(GeneratorConfig::Kind kind, std::uint64_t seed, std::size_t count) {
  GeneratorConfig cfg;
  cfg.kind = kind;
  const auto verdicts = dominance_harness(seed, count, cfg);
  const auto s = summarize(verdicts);
  Report rep;
  rep.title = "dominance harness";
  rep.fields = {{"seed", static_cast<std::int64_t>(seed)}, {"count", count_cell(s.count)},
                {"dominates", count_cell(s.dominates)},   {"violates", count_cell(s.violates)},
                {"inconclusive", count_cell(s.inconclusive)}, {"min_ratio", s.min_ratio}};
  Table t{"verdicts", {"instance", "family", "floor_N", "exact_tv", "bound", "margin", "support_overflow", "status"}, {}};
  for (const auto& v : verdicts) {
    t.rows.push_back({v.descriptor, std::string(oracle::to_string(v.family)), v.floor_n, v.exact_tv, v.bound_value,
                      v.margin, v.support_overflow, std::string(oracle::to_string(v.status))});
  }
  rep.tables.push_back(std::move(t));
  return {"oracle", {std::move(rep)}};
}

Document runs_demo(double p, const std::vector<std::size_t>& ns, const RunOptions& opts) {
  Report rep;
  rep.title = fmt::format("runs, iid p = {}", p);
  Table t{"runs",
          {"n", "mean", "variance", "n_hat", "p_hat", "smoothness_factor", "runs_bound", "cdo_runs_bound", "exact_tv",
           "status"},
          {}};
  std::vector<std::pair<std::size_t, double>> values;
  for (std::size_t n : ns) {
    const RunsModel model = RunsModel::iid(n, p);
    const auto b = runs_bound(model);
    const auto cdo = cdo_bound_runs_display(model);
    values.emplace_back(n, b.value);
    Cell tv = std::string("-");
    Cell status = std::string("-");
    const double states = std::pow(2.0, static_cast<double>(n));
    if (opts.oracle == OracleMode::On || (opts.oracle == OracleMode::Auto && states <= opts.auto_state_limit)) {
      const auto fit = oracle::exact_tv_to_fit(runs_joint_spec(model));
      const auto v = oracle::make_verdict("runs", fit, b.value);
      tv = v.exact_tv;
      status = std::string(oracle::to_string(v.status));
    }
    t.rows.push_back({count_cell(n), runs_mean(model), runs_variance(model), b.detail("n_hat"), b.detail("p_hat"),
                      runs_smoothness_factor(model), b.value, cdo.value, tv, status});
  }
  rep.tables.push_back(std::move(t));
  Table decay{"decay", {"n", "bound_n", "bound_4n", "ratio"}, {}};
  for (const auto& [n, v] : values) {
    for (const auto& [n4, v4] : values) {
      if (n4 == 4 * n) decay.rows.push_back({count_cell(n), v, v4, v4 / v});
    }
  }
  if (!decay.rows.empty()) rep.tables.push_back(std::move(decay));
  return {"runs-demo", {std::move(rep)}};
}

Document cdo_demo(const std::vector<double>& probs, const std::vector<double>& attachments, const RunOptions& opts,
                  double eps) {
  ScenarioConfig cfg;
  cfg.name = fmt::format("tranche loss, n = {}", probs.size());
  cfg.model = ModelKind::Cdo;
  cfg.probs = probs;
  cfg.attachments = attachments;
  cfg.eps = eps;
  cfg.bounds = default_bounds(ModelKind::Cdo);
  if (probs.size() <= 16) cfg.bounds.push_back("cdo-dependent");
  return {"cdo-demo", {run_scenario(cfg, opts)}};
}

Document cpoisson_demo(const std::vector<double>& lambdas, const RunOptions& opts, double eps) {
  ScenarioConfig cfg;
  cfg.name = fmt::format("compound Poisson, n = {}", lambdas.size());
  cfg.model = ModelKind::CompoundPoisson;
  cfg.lambdas = lambdas;
  cfg.eps = eps;
  cfg.bounds = default_bounds(ModelKind::CompoundPoisson);
  return {"cpoisson-demo", {run_scenario(cfg, opts)}};
}

}  // namespace steinbound::cli
