#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace steinbound::cli {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& known) {
  if (!node.IsMap()) fail(where, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

double as_real(const YAML::Node& n, const std::string& where) {
  if (!n.IsScalar()) fail(where, "expected a number");
  try {
    const double x = n.as<double>();
    if (!std::isfinite(x)) fail(where, "expected a finite number");
    return x;
  } catch (const YAML::BadConversion&) {
    fail(where, "expected a number, got '" + n.Scalar() + "'");
  }
}

std::size_t as_count(const YAML::Node& n, const std::string& where) {
  const double x = as_real(n, where);
  if (x < 0 || x != std::floor(x) || x > 1e9) fail(where, "expected a non-negative integer");
  return static_cast<std::size_t>(x);
}

std::string as_text(const YAML::Node& n, const std::string& where) {
  if (!n.IsScalar()) fail(where, "expected a string");
  return n.Scalar();
}

std::vector<double> real_list(const YAML::Node& n, const std::string& where) {
  if (!n.IsSequence()) fail(where, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_real(n[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::size_t> count_list(const YAML::Node& n, const std::string& where) {
  if (!n.IsSequence()) fail(where, "expected a list of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_count(n[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

const YAML::Node require(const YAML::Node& parent, const char* key, const std::string& where) {
  const auto n = parent[key];
  if (!n) fail(where, std::string("missing required key '") + key + "'");
  return n;
}

ModelKind parse_model(const std::string& s) {
  if (s == "independent") return ModelKind::Independent;
  if (s == "runs") return ModelKind::Runs;
  if (s == "explicit-joint") return ModelKind::ExplicitJoint;
  if (s == "cdo") return ModelKind::Cdo;
  if (s == "compound-poisson") return ModelKind::CompoundPoisson;
  if (s == "nb-of-nb") return ModelKind::NbOfNb;
  fail("model", "unknown model '" + s + "'");
}

TargetChoice parse_target(const std::string& s) {
  if (s == "auto") return TargetChoice::Auto;
  if (s == "pb") return TargetChoice::Pb;
  if (s == "nb") return TargetChoice::Nb;
  fail("target", "expected pb, nb or auto");
}

GammaStrategy parse_gamma(const std::string& s) {
  if (s == "exact") return GammaStrategy::Exact;
  if (s == "analytic") return GammaStrategy::Analytic;
  if (s == "trivial") return GammaStrategy::Trivial;
  fail("gamma_strategy", "expected exact, analytic or trivial");
}

SmoothnessStrategy parse_smoothness(const YAML::Node& n) {
  const auto s = as_text(n, "smoothness_strategy");
  if (s == "exact-conditional") return SmoothnessStrategy::exact_conditional();
  if (s == "trivial") return SmoothnessStrategy::trivial();
  try {
    return SmoothnessStrategy::user_constant(as_real(n, "smoothness_strategy"));
  } catch (const ConfigError&) {
    fail("smoothness_strategy", "expected exact-conditional, trivial or a constant in (0, 2]");
  } catch (const std::invalid_argument& e) {
    fail("smoothness_strategy", e.what());
  }
}

FinitePmf parse_marginal(const YAML::Node& item, const std::string& where, double eps) {
  int given = 0;
  FinitePmf out;
  if (item["pmf"]) {
    ++given;
    out = FinitePmf(real_list(item["pmf"], where + ".pmf"));
  }
  if (item["bernoulli"]) {
    ++given;
    out = bernoulli(as_real(item["bernoulli"], where + ".bernoulli"));
  }
  if (item["geometric"]) {
    ++given;
    out = geometric(as_real(item["geometric"], where + ".geometric"), eps);
  }
  if (item["poisson"]) {
    ++given;
    out = poisson(as_real(item["poisson"], where + ".poisson"), eps);
  }
  if (given != 1) fail(where, "give exactly one of pmf, bernoulli, geometric, poisson");
  return out;
}

void parse_independent(const YAML::Node& root, ScenarioConfig& cfg) {
  const auto items = require(root, "items", "independent");
  if (!items.IsSequence() || items.size() == 0) fail("items", "expected a non-empty list");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string where = "items[" + std::to_string(i) + "]";
    check_keys(items[i], where, {"weight", "pmf", "bernoulli", "geometric", "poisson"});
    const std::size_t w = items[i]["weight"] ? as_count(items[i]["weight"], where + ".weight") : 1;
    cfg.items.push_back({w, parse_marginal(items[i], where, cfg.eps)});
  }
}

std::vector<double> parse_probs(const YAML::Node& root, const std::string& model) {
  const int forms = (root["probs"] ? 1 : 0) + (root["n"] || root["p"] ? 1 : 0) + (root["table_n"] ? 1 : 0);
  if (forms != 1) fail(model, "give exactly one of probs, n with p, or table_n");
  if (root["probs"]) return real_list(root["probs"], "probs");
  if (root["table_n"]) {
    if (model != "cdo") fail("table_n", "only valid for the cdo model");
    return cdo_table_probabilities(as_count(root["table_n"], "table_n"));
  }
  const auto n = as_count(require(root, "n", model), "n");
  const double p = as_real(require(root, "p", model), "p");
  return std::vector<double>(n, p);
}

void parse_joint(const YAML::Node& root, ScenarioConfig& cfg) {
  auto weights = count_list(require(root, "weights", "explicit-joint"), "weights");
  auto supports = count_list(require(root, "supports", "explicit-joint"), "supports");
  auto joint = real_list(require(root, "joint", "explicit-joint"), "joint");
  const auto hn = require(root, "neighborhoods", "explicit-joint");
  if (!hn.IsSequence()) fail("neighborhoods", "expected a list");
  std::vector<Neighborhood> hoods;
  for (std::size_t i = 0; i < hn.size(); ++i) {
    const std::string where = "neighborhoods[" + std::to_string(i) + "]";
    check_keys(hn[i], where, {"a", "b"});
    hoods.push_back({count_list(require(hn[i], "a", where), where + ".a"),
                     count_list(require(hn[i], "b", where), where + ".b")});
  }
  cfg.joint.emplace(std::move(weights), std::move(supports), std::move(joint), std::move(hoods));
}

void parse_components(const YAML::Node& root, ScenarioConfig& cfg) {
  const auto cs = require(root, "components", "nb-of-nb");
  if (!cs.IsSequence() || cs.size() == 0) fail("components", "expected a non-empty list");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string where = "components[" + std::to_string(i) + "]";
    check_keys(cs[i], where, {"n", "p"});
    const NbComponent c{as_real(require(cs[i], "n", where), where + ".n"), as_real(require(cs[i], "p", where), where + ".p")};
    (void)NegBinomialParams(c.n, c.p);
    cfg.components.push_back(c);
  }
}

}  // namespace

const char* to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Independent: return "independent";
    case ModelKind::Runs: return "runs";
    case ModelKind::ExplicitJoint: return "explicit-joint";
    case ModelKind::Cdo: return "cdo";
    case ModelKind::CompoundPoisson: return "compound-poisson";
    case ModelKind::NbOfNb: return "nb-of-nb";
  }
  return "?";
}

const char* to_string(TargetChoice t) {
  switch (t) {
    case TargetChoice::Auto: return "auto";
    case TargetChoice::Pb: return "pb";
    case TargetChoice::Nb: return "nb";
  }
  return "?";
}

OracleMode parse_oracle_mode(const std::string& s) {
  if (s == "on") return OracleMode::On;
  if (s == "off") return OracleMode::Off;
  if (s == "auto") return OracleMode::Auto;
  throw std::invalid_argument("oracle mode must be on, off or auto");
}

std::vector<std::string> allowed_bounds(ModelKind m) {
  switch (m) {
    case ModelKind::Independent: return {"corollary", "theorem1"};
    case ModelKind::Runs: return {"runs", "theorem1", "cdo-runs"};
    case ModelKind::ExplicitJoint: return {"theorem1", "cdo-dependent"};
    case ModelKind::Cdo: return {"cdo", "cdo-gamma", "poisson", "cdo-dependent"};
    case ModelKind::CompoundPoisson: return {"compound-poisson"};
    case ModelKind::NbOfNb: return {"nb-of-nb"};
  }
  return {};
}

std::vector<std::string> default_bounds(ModelKind m) {
  switch (m) {
    case ModelKind::Independent: return {"corollary"};
    case ModelKind::Runs: return {"runs"};
    case ModelKind::ExplicitJoint: return {"theorem1"};
    case ModelKind::Cdo: return {"cdo", "cdo-gamma", "poisson"};
    case ModelKind::CompoundPoisson: return {"compound-poisson"};
    case ModelKind::NbOfNb: return {"nb-of-nb"};
  }
  return {};
}

ScenarioConfig parse_scenario(const YAML::Node& root, std::optional<double> eps_override) {
  if (!root || !root.IsMap()) throw ConfigError("scenario: expected a mapping at top level");
  ScenarioConfig cfg;
  try {
  cfg.model = parse_model(as_text(require(root, "model", "scenario"), "model"));
  std::set<std::string> known{"name", "model", "target", "bounds", "gamma_strategy", "smoothness_strategy", "eps",
                              "format", "oracle"};
  switch (cfg.model) {
    case ModelKind::Independent: known.insert("items"); break;
    case ModelKind::Runs: known.insert({"probs", "n", "p", "attachments"}); break;
    case ModelKind::ExplicitJoint: known.insert({"weights", "supports", "joint", "neighborhoods", "attachments"}); break;
    case ModelKind::Cdo: known.insert({"probs", "n", "p", "table_n", "attachments"}); break;
    case ModelKind::CompoundPoisson: known.insert("lambdas"); break;
    case ModelKind::NbOfNb: known.insert("components"); break;
  }
  check_keys(root, "scenario", known);

    cfg.name = root["name"] ? as_text(root["name"], "name") : to_string(cfg.model);
    if (root["target"]) cfg.target = parse_target(as_text(root["target"], "target"));
    if (root["gamma_strategy"]) cfg.gamma = parse_gamma(as_text(root["gamma_strategy"], "gamma_strategy"));
    if (root["smoothness_strategy"]) cfg.smoothness = parse_smoothness(root["smoothness_strategy"]);
    if (root["eps"]) cfg.eps = as_real(root["eps"], "eps");
    if (eps_override) cfg.eps = *eps_override;
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) fail("eps", "must lie in (0, 1)");
    if (root["format"]) {
      cfg.format = as_text(root["format"], "format");
      if (*cfg.format != "md" && *cfg.format != "csv" && *cfg.format != "json") fail("format", "expected md, csv or json");
    }
    if (root["oracle"]) {
      const auto s = as_text(root["oracle"], "oracle");
      if (s != "on" && s != "off" && s != "auto") fail("oracle", "expected on, off or auto");
      cfg.oracle = parse_oracle_mode(s);
    }

    const auto allowed = allowed_bounds(cfg.model);
    if (root["bounds"]) {
      const auto b = root["bounds"];
      if (!b.IsSequence() || b.size() == 0) fail("bounds", "expected a non-empty list");
      for (std::size_t i = 0; i < b.size(); ++i) {
        const auto name = as_text(b[i], "bounds[" + std::to_string(i) + "]");
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
          fail("bounds", "'" + name + "' is not available for model " + to_string(cfg.model));
        }
        cfg.bounds.push_back(name);
      }
    } else {
      cfg.bounds = default_bounds(cfg.model);
    }

    switch (cfg.model) {
      case ModelKind::Independent: parse_independent(root, cfg); break;
      case ModelKind::Runs:
        cfg.probs = parse_probs(root, "runs");
        (void)RunsModel(cfg.probs);
        if (cfg.probs.size() < 4) fail("runs", "need at least four trials");
        break;
      case ModelKind::ExplicitJoint: parse_joint(root, cfg); break;
      case ModelKind::Cdo:
        cfg.probs = parse_probs(root, "cdo");
        if (cfg.probs.empty()) fail("probs", "expected at least one probability");
        for (double p : cfg.probs) {
          if (!(p > 0.0 && p < 1.0)) fail("probs", "probabilities must lie in (0, 1)");
        }
        break;
      case ModelKind::CompoundPoisson:
        cfg.lambdas = real_list(require(root, "lambdas", "compound-poisson"), "lambdas");
        for (double l : cfg.lambdas) {
          if (!(l > 0.0)) fail("lambdas", "rates must be positive");
        }
        if (cfg.lambdas.size() < 2) fail("lambdas", "need at least two rates");
        break;
      case ModelKind::NbOfNb: parse_components(root, cfg); break;
    }
    cfg.attachments = root["attachments"] ? real_list(root["attachments"], "attachments") : std::vector<double>{1, 2, 3};
    for (double z : cfg.attachments) {
      if (z < 0) fail("attachments", "must be non-negative");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  return cfg;
}

ScenarioConfig parse_scenario_text(const std::string& text, std::optional<double> eps_override) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  return parse_scenario(root, eps_override);
}

ScenarioConfig load_scenario(const std::string& path, std::optional<double> eps_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    auto cfg = parse_scenario_text(ss.str(), eps_override);
    return cfg;
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace steinbound::cli
