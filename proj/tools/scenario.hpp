#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinbound/steinbound.hpp"

namespace YAML {
class Node;
}

namespace steinbound::cli {

/// Malformed or unreadable scenario file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { Independent, Runs, ExplicitJoint, Cdo, CompoundPoisson, NbOfNb };
enum class TargetChoice { Auto, Pb, Nb };
enum class OracleMode { On, Off, Auto };

const char* to_string(ModelKind m);
const char* to_string(TargetChoice t);
OracleMode parse_oracle_mode(const std::string& s);

struct ScenarioConfig {
  std::string name;
  ModelKind model = ModelKind::Independent;
  TargetChoice target = TargetChoice::Auto;
  std::vector<std::string> bounds;
  GammaStrategy gamma = GammaStrategy::Analytic;
  SmoothnessStrategy smoothness = SmoothnessStrategy::exact_conditional();
  double eps = kDefaultTruncationEps;
  std::optional<std::string> format;
  std::optional<OracleMode> oracle;

  // independent
  std::vector<WeightedMarginal> items;
  // runs, cdo
  std::vector<double> probs;
  // cdo
  std::vector<double> attachments;
  // explicit-joint
  std::optional<DependentJointSpec> joint;
  // compound-poisson
  std::vector<double> lambdas;
  // nb-of-nb
  std::vector<NbComponent> components;
};

/// Bound names accepted for a model; the first entries are the defaults.
std::vector<std::string> allowed_bounds(ModelKind m);
std::vector<std::string> default_bounds(ModelKind m);

/// `eps_override` replaces the file's eps before any marginal is truncated.
ScenarioConfig parse_scenario(const YAML::Node& root, std::optional<double> eps_override = std::nullopt);
ScenarioConfig parse_scenario_text(const std::string& text, std::optional<double> eps_override = std::nullopt);
ScenarioConfig load_scenario(const std::string& path, std::optional<double> eps_override = std::nullopt);

}  // namespace steinbound::cli
