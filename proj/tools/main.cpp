#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace steinbound;
using namespace steinbound::cli;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kSchema = 2, kInfeasible = 3 };

// Written in one go so a failing run leaves nothing behind.
void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out.flush()) throw std::runtime_error("cannot write " + path);
  }
  std::filesystem::rename(tmp, path);
}

GeneratorConfig::Kind parse_kind(const std::string& s) {
  if (s == "mixed") return GeneratorConfig::Kind::Mixed;
  if (s == "homogeneous") return GeneratorConfig::Kind::HomogeneousBernoulli;
  if (s == "dependent") return GeneratorConfig::Kind::Dependent;
  throw std::invalid_argument("harness kind must be mixed, homogeneous or dependent");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stein's-method bounds for pseudo-binomial and negative binomial approximation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format_flag;
  std::uint64_t seed = 42;
  std::string oracle_flag = "auto";
  std::optional<double> eps;
  std::string output;
  app.add_option("--format", format_flag, "md, csv or json (default md)")->check(CLI::IsMember({"md", "csv", "json"}));
  app.add_option("--seed", seed, "seed for the oracle harness");
  app.add_option("--oracle", oracle_flag, "on, off or auto (auto enumerates up to 1e6 states)")
      ->check(CLI::IsMember({"on", "off", "auto"}));
  app.add_option("--eps", eps, "truncation mass for unbounded marginals");
  app.add_option("--output,-o", output, "write the report here instead of stdout");

  std::vector<std::string> scenario_paths;
  auto* bound = app.add_subcommand("bound", "bounds for scenario files");
  bound->add_option("scenarios", scenario_paths, "scenario files")->required();

  std::vector<std::string> oracle_paths;
  std::string harness_kind;
  std::size_t count = 200;
  auto* oracle_cmd = app.add_subcommand("oracle", "exact laws, or the seeded dominance harness");
  oracle_cmd->add_option("scenarios", oracle_paths, "scenario files");
  oracle_cmd->add_option("--harness", harness_kind, "mixed, homogeneous or dependent")
      ->check(CLI::IsMember({"mixed", "homogeneous", "dependent"}));
  oracle_cmd->add_option("--count", count, "harness instances");

  auto* table = app.add_subcommand("table", "tranche-loss bound comparison against published values");

  double runs_p = 0.2;
  std::vector<std::size_t> runs_n{10, 14, 100, 400, 1600};
  auto* runs = app.add_subcommand("runs-demo", "(1,1)-runs bounds and their decay");
  runs->add_option("--p", runs_p, "success probability")->check(CLI::Range(0.0, 1.0));
  runs->add_option("--n", runs_n, "sequence lengths")->delimiter(',');

  std::size_t cdo_n = 20;
  std::vector<double> cdo_p;
  std::vector<double> cdo_z{1, 2, 3};
  auto* cdo = app.add_subcommand("cdo-demo", "tranche-loss bounds for default indicators");
  cdo->add_option("--table-n", cdo_n, "pool size using the comparison-table probabilities");
  cdo->add_option("--p", cdo_p, "explicit default probabilities")->delimiter(',');
  cdo->add_option("--z", cdo_z, "attachment points")->delimiter(',');

  std::vector<double> lambdas{1.0, 0.1};
  auto* cpoisson = app.add_subcommand("cpoisson-demo", "negative binomial bound for a compound Poisson sum");
  cpoisson->add_option("--lambda", lambdas, "rates lambda_1..lambda_n")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kSchema;
  }

  try {
    RunOptions opts;
    opts.oracle = parse_oracle_mode(oracle_flag);
    const double demo_eps = eps.value_or(kDefaultTruncationEps);
    Document doc;
    std::optional<std::string> file_format;
    if (*bound || (*oracle_cmd && !oracle_paths.empty())) {
      const auto& paths = *bound ? scenario_paths : oracle_paths;
      std::vector<ScenarioConfig> cfgs;
      for (const auto& p : paths) cfgs.push_back(load_scenario(p, eps));
      if (!cfgs.empty()) file_format = cfgs.front().format;
      doc = run_scenarios(*bound ? "bound" : "oracle", cfgs, opts, !*bound);
    } else if (*oracle_cmd) {
      doc = harness_command(parse_kind(harness_kind.empty() ? "mixed" : harness_kind), seed, count);
    } else if (*table) {
      doc = table_command();
    } else if (*runs) {
      doc = runs_demo(runs_p, runs_n, opts);
    } else if (*cdo) {
      doc = cdo_demo(cdo_p.empty() ? cdo_table_probabilities(cdo_n) : cdo_p, cdo_z, opts, demo_eps);
    } else if (*cpoisson) {
      doc = cpoisson_demo(lambdas, opts, demo_eps);
    }
    const std::string fmt_name = !format_flag.empty() ? format_flag : file_format.value_or("md");
    emit(render(doc, parse_format(fmt_name)), output);
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSchema;
  } catch (const InfeasibleModel& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}
