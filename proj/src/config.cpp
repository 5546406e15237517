#include "qplan/config.hpp"

#include <cstdlib>
#include <fstream>

namespace qplan {

SlotConfig default_slots() {
  return SlotConfig{{{Level::kInt4, 4}, {Level::kInt8, 3}, {Level::kFp16, 2}, {Level::kFp32, 1}}};
}

void validate(const ServerConfig& c) {
  if (c.port < 0 || c.port > 65535) throw ValidationError("port", "must be in [0, 65535]");
  validate(c.slots);
  if (!(c.epsilon >= 0.0)) throw ValidationError("epsilon", "must be >= 0");
  if (c.participation < 1) throw ValidationError("participation", "must be >= 1");
  validate(c.profiling);
  validate(c.accuracy);
  validate(c.llm);
}

void to_json(json& j, const ServerConfig& c) {
  j = json{{"host", c.host},
           {"port", c.port},
           {"slots", c.slots},
           {"epsilon", c.epsilon},
           {"participation", c.participation},
           {"k", c.profiling.k},
           {"hint_blend", c.profiling.hint_blend},
           {"strategy", label(c.profiling.strategy)},
           {"beta", c.profiling.beta},
           {"global_dist", c.profiling.global_dist},
           {"accuracy_kappa", c.accuracy.kappa},
           {"accuracy_max", c.accuracy.max},
           {"data_dir", c.data_dir},
           {"hwperf_fixture", c.hwperf_fixture},
           {"llm", c.llm}};
}

void from_json(const json& j, ServerConfig& c) {
  if (!j.is_object()) throw ValidationError("config", "expected an object");
  auto opt = [&](std::string_view key, auto& target) {
    if (j.contains(key)) target = get_field<std::remove_reference_t<decltype(target)>>(j, key);
  };
  opt("host", c.host);
  opt("port", c.port);
  opt("slots", c.slots);
  opt("epsilon", c.epsilon);
  opt("participation", c.participation);
  opt("k", c.profiling.k);
  opt("hint_blend", c.profiling.hint_blend);
  opt("beta", c.profiling.beta);
  if (j.contains("strategy")) {
    c.profiling.strategy = parse_label<Strategy>(get_field<std::string>(j, "strategy"), "strategy");
  }
  if (j.contains("global_dist")) {
    c.profiling.global_dist = validate_distribution(get_field<TaskValues>(j, "global_dist"));
  }
  opt("accuracy_kappa", c.accuracy.kappa);
  opt("accuracy_max", c.accuracy.max);
  opt("data_dir", c.data_dir);
  opt("hwperf_fixture", c.hwperf_fixture);
  opt("llm", c.llm);
  validate(c);
}

ServerConfig apply_env(ServerConfig config) {
  if (const char* dir = std::getenv("QPLAN_DATA_DIR")) config.data_dir = dir;
  config.llm = apply_llm_env(std::move(config.llm));
  return config;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

ServerConfig load_server_config(const std::filesystem::path& path) {
  return apply_env(read_json_file(path).get<ServerConfig>());
}

}  // namespace qplan
