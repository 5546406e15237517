// qplan command line: run the planning server, run simulation experiments, or
// dump the built-in hardware catalog.

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "qplan/config.hpp"
#include "qplan/hardware_catalog.hpp"
#include "qplan/http_api.hpp"
#include "qplan/sim.hpp"

namespace {

int serve(const std::string& config_path, std::optional<int> port) {
  qplan::ServerConfig config =
      config_path.empty() ? qplan::apply_env(qplan::ServerConfig{}) : qplan::load_server_config(config_path);
  if (port) config.port = *port;
  qplan::run_server(config);
  return 0;
}

struct SimulateArgs {
  std::string config_path;
  std::optional<std::string> planner;
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

int simulate(const SimulateArgs& args) {
  qplan::ExperimentConfig config;
  if (!args.config_path.empty()) config = qplan::read_json_file(args.config_path).get<qplan::ExperimentConfig>();
  if (args.planner) config.planner = qplan::parse_label<qplan::Planner>(*args.planner, "planner");
  if (args.strategy) config.strategy = qplan::parse_label<qplan::Strategy>(*args.strategy, "strategy");
  if (args.seed) config.seed = *args.seed;
  const auto report = qplan::run_experiment(config);
  qplan::emit_report(report, args.out);
  std::cout << "planner=" << qplan::label(config.planner) << " strategy=" << qplan::label(config.strategy)
            << " seed=" << config.seed << " mean_satisfaction=" << report.mean_satisfaction
            << " mean_relative_energy=" << report.mean_relative_energy << "\n"
            << "wrote " << (std::filesystem::path(args.out) / "report.json").string() << " and "
            << (std::filesystem::path(args.out) / "metrics.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-client precision planning for mixed-precision federated learning"};
  app.require_subcommand(1);

  std::string serve_config;
  std::optional<int> port;
  auto* serve_cmd = app.add_subcommand("serve", "Run the REST planning server");
  serve_cmd->add_option("--config", serve_config, "Server config JSON")->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", port, "Override the listen port");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run one simulation experiment");
  sim_cmd->add_option("--config", sim.config_path, "Experiment config JSON")->check(CLI::ExistingFile);
  sim_cmd->add_option("--planner", sim.planner, "personalized | unified | energy_priority");
  sim_cmd->add_option("--strategy", sim.strategy, "fedavg | class_equal | majority_centric");
  sim_cmd->add_option("--seed", sim.seed, "PRNG seed");
  sim_cmd->add_option("--out", sim.out, "Output directory")->capture_default_str();

  auto* catalog_cmd = app.add_subcommand("catalog", "Print the built-in hardware performance catalog");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*serve_cmd) return serve(serve_config, port);
    if (*sim_cmd) return simulate(sim);
    if (*catalog_cmd) {
      std::cout << qplan::catalog_to_json(qplan::default_hardware_catalog()).dump(2) << "\n";
      return 0;
    }
  } catch (const qplan::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
