#pragma once

// Server configuration loaded from a single JSON file. Every key is optional.

#include <filesystem>
#include <string>

#include "qplan/domain.hpp"
#include "qplan/llm_client.hpp"
#include "qplan/planner.hpp"
#include "qplan/profiler.hpp"

namespace qplan {

SlotConfig default_slots();

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  SlotConfig slots = default_slots();
  double epsilon = 0.05;
  int participation = 10;
  ProfilingOptions profiling;
  AccuracyModel accuracy;
  // Empty keeps both stores in memory.
  std::string data_dir;
  // Catalog file used to seed an empty hardware store; empty uses the
  // built-in catalog.
  std::string hwperf_fixture;
  LlmClientConfig llm;
};

void validate(const ServerConfig& config);

// Flat keys: host, port, slots, epsilon, participation, k, hint_blend,
// strategy, beta, global_dist, accuracy_kappa, accuracy_max, data_dir,
// hwperf_fixture, llm.
void to_json(json& j, const ServerConfig& c);
void from_json(const json& j, ServerConfig& c);

// QPLAN_DATA_DIR, LLM_ENDPOINT and LLM_MODEL override the file.
ServerConfig apply_env(ServerConfig config);

ServerConfig load_server_config(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);

}  // namespace qplan
