#include "qplan/domain.hpp"

#include <algorithm>
#include <cmath>

namespace qplan {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kAlreadyNormalized = 1e-12;

template <class E>
EnumArray<E> normalize_nonnegative(const EnumArray<E>& raw, std::string_view what) {
  double sum = 0.0;
  for (auto e : all_values<E>()) {
    const double v = raw[e];
    if (!std::isfinite(v)) throw ValidationError(std::string(label(e)), "must be finite");
    if (v < 0.0) throw ValidationError(std::string(label(e)), "must be >= 0");
    sum += v;
  }
  if (sum <= 0.0) throw ValidationError(std::string(what), "at least one entry must be > 0");
  if (std::abs(sum - 1.0) <= kAlreadyNormalized) return raw;
  EnumArray<E> out;
  for (auto e : all_values<E>()) out[e] = raw[e] / sum;
  return out;
}

template <class E>
void check_distribution(const EnumArray<E>& d, std::string_view what) {
  double sum = 0.0;
  for (auto e : all_values<E>()) {
    if (!(d[e] >= 0.0)) throw ValidationError(std::string(what), "entries must be >= 0");
    sum += d[e];
  }
  if (std::abs(sum - 1.0) > kSumTolerance) throw ValidationError(std::string(what), "must sum to 1");
}

void check_unit(double v, std::string_view field) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(field), "must be within [0,1]");
}

template <class E>
E enum_from_json(const json& j, std::string_view field) {
  if (!j.is_string()) throw ValidationError(std::string(field), "expected a label string");
  return parse_label<E>(j.get<std::string>(), field);
}

template <class E>
json enum_map_to_json(const EnumArray<E>& v) {
  json j = json::object();
  for (auto e : all_values<E>()) j[std::string(label(e))] = v[e];
  return j;
}

template <class E>
EnumArray<E> enum_map_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("map", "expected an object keyed by label");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!try_parse_label<E>(it.key())) throw ValidationError(it.key(), "unknown label");
  }
  EnumArray<E> out;
  for (auto e : all_values<E>()) out[e] = get_field<double>(j, label(e));
  return out;
}

}  // namespace

TaskDistribution default_task_distribution() {
  TaskDistribution d;
  d[TaskCategory::kEntertainment] = 0.327;
  d[TaskCategory::kSmartHome] = 0.160;
  d[TaskCategory::kGeneralQuery] = 0.319;
  d[TaskCategory::kPersonalRequest] = 0.194;
  return d;
}

TaskDistribution uniform_task_distribution() {
  TaskDistribution d;
  for (auto t : kAllTasks) d[t] = 0.25;
  return d;
}

SensitivityWeights::SensitivityWeights() {
  for (auto f : kAllFactors) values_[f] = 1.0 / 3.0;
}

SensitivityWeights validate_weights(const FactorValues& raw) {
  return SensitivityWeights(normalize_nonnegative(raw, "weights"));
}

TaskDistribution validate_distribution(const TaskValues& raw) {
  return normalize_nonnegative(raw, "distribution");
}

bool HardwareSpec::supports(Level level) const {
  return std::find(available_levels.begin(), available_levels.end(), level) != available_levels.end();
}

void validate(const HardwareSpec& hw) {
  if (hw.ram_mb < 0) throw ValidationError("ram_mb", "must be >= 0");
  if (hw.available_levels.empty()) throw ValidationError("available_levels", "must not be empty");
  for (std::size_t i = 0; i < hw.available_levels.size(); ++i) {
    if (index_of(hw.available_levels[i]) != i) {
      throw ValidationError("available_levels",
                            "must be the contiguous ascending run of levels starting at INT4");
    }
  }
}

void validate(const ContextualFactors& ctx) { check_distribution(ctx.task_type_mix, "task_type_mix"); }

void validate(const InferredFactors& inferred) {
  check_distribution(inferred.data_distribution, "data_distribution");
}

void validate(const PerfTable& table) {
  if (table.empty()) throw ValidationError("performance", "table must not be empty");
  const PerformanceEstimate* prev = nullptr;
  for (const auto& [level, p] : table) {
    const std::string where(label(level));
    check_unit(p.accuracy, where + ".accuracy");
    if (!(p.relative_energy > 0.0 && p.relative_energy <= 1.0)) {
      throw ValidationError(where + ".relative_energy", "must be within (0,1]");
    }
    if (!(p.latency_norm > 0.0 && p.latency_norm <= 1.0)) {
      throw ValidationError(where + ".latency_norm", "must be within (0,1]");
    }
    if (prev != nullptr) {
      if (p.accuracy < prev->accuracy) throw ValidationError(where + ".accuracy", "must not decrease");
      if (p.relative_energy < prev->relative_energy) {
        throw ValidationError(where + ".relative_energy", "must not decrease");
      }
      if (p.latency_norm < prev->latency_norm) {
        throw ValidationError(where + ".latency_norm", "must not decrease");
      }
    }
    prev = &p;
  }
}

void validate(const FeedbackRecord& fb) {
  if (fb.round < 0) throw ValidationError("round", "must be >= 0");
  for (auto f : kAllFactors) check_unit(fb.ratings[f], "ratings." + std::string(label(f)));
}

void validate(const ClientProfile& profile) {
  validate(profile.hardware);
  validate(profile.context);
  validate(profile.inferred);
  for (Level level : profile.hardware.available_levels) {
    auto it = profile.contribution_estimate.find(level);
    if (it == profile.contribution_estimate.end()) {
      throw ValidationError("contribution_estimate." + std::string(label(level)), "missing level");
    }
    if (!(it->second > 0.0)) {
      throw ValidationError("contribution_estimate." + std::string(label(level)), "must be > 0");
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, Level level) { j = json{{"name", label(level)}, {"bit_width", bit_width(level)}}; }

void from_json(const json& j, Level& level) {
  if (j.is_string()) {
    level = parse_label<Level>(j.get<std::string>(), "level");
    return;
  }
  level = parse_label<Level>(get_field<std::string>(j, "name"), "name");
  if (j.contains("bit_width") && get_field<int>(j, "bit_width") != bit_width(level)) {
    throw ValidationError("bit_width", "does not match level name");
  }
}

void to_json(json& j, const FactorValues& v) { j = enum_map_to_json(v); }
void from_json(const json& j, FactorValues& v) { v = enum_map_from_json<Factor>(j); }
void to_json(json& j, const TaskValues& v) { j = enum_map_to_json(v); }
void from_json(const json& j, TaskValues& v) { v = enum_map_from_json<TaskCategory>(j); }

void to_json(json& j, const SensitivityWeights& w) { j = enum_map_to_json(w.values()); }

void from_json(const json& j, SensitivityWeights& w) {
  const auto raw = enum_map_from_json<Factor>(j);
  double sum = 0.0;
  for (double v : raw) sum += v;
  if (std::abs(sum - 1.0) > kSumTolerance) throw ValidationError("weights", "must sum to 1");
  w = validate_weights(raw);
}

void to_json(json& j, const HardwareSpec& hw) {
  json levels = json::array();
  for (Level l : hw.available_levels) levels.push_back(l);
  j = json{{"processor_class", hw.processor_class},
           {"ram_mb", hw.ram_mb},
           {"power_state", label(hw.power_state)},
           {"available_levels", std::move(levels)}};
}

void from_json(const json& j, HardwareSpec& hw) {
  hw.processor_class = get_field<std::string>(j, "processor_class");
  hw.ram_mb = get_field<int>(j, "ram_mb");
  hw.power_state = enum_from_json<PowerState>(get_field<json>(j, "power_state"), "power_state");
  hw.available_levels = get_field<std::vector<Level>>(j, "available_levels");
  validate(hw);
}

void to_json(json& j, const ContextualFactors& ctx) {
  j = json{{"device_location", label(ctx.device_location)},
           {"interaction_time", label(ctx.interaction_time)},
           {"interaction_frequency", label(ctx.interaction_frequency)},
           {"task_type_mix", ctx.task_type_mix}};
}

void from_json(const json& j, ContextualFactors& ctx) {
  ctx.device_location = enum_from_json<Location>(get_field<json>(j, "device_location"), "device_location");
  ctx.interaction_time =
      enum_from_json<InteractionTime>(get_field<json>(j, "interaction_time"), "interaction_time");
  ctx.interaction_frequency =
      enum_from_json<Frequency>(get_field<json>(j, "interaction_frequency"), "interaction_frequency");
  ctx.task_type_mix = get_field<TaskValues>(j, "task_type_mix");
  validate(ctx);
}

void to_json(json& j, const InferredFactors& inf) {
  j = json{{"noise_level", label(inf.noise_level)},
           {"data_quantity", label(inf.data_quantity)},
           {"data_distribution", inf.data_distribution}};
}

void from_json(const json& j, InferredFactors& inf) {
  inf.noise_level = enum_from_json<NoiseLevel>(get_field<json>(j, "noise_level"), "noise_level");
  inf.data_quantity = enum_from_json<DataQuantity>(get_field<json>(j, "data_quantity"), "data_quantity");
  inf.data_distribution = get_field<TaskValues>(j, "data_distribution");
  validate(inf);
}

void to_json(json& j, const PerformanceEstimate& p) {
  j = json{{"accuracy", p.accuracy}, {"relative_energy", p.relative_energy}, {"latency_norm", p.latency_norm}};
}

void from_json(const json& j, PerformanceEstimate& p) {
  p.accuracy = get_field<double>(j, "accuracy");
  p.relative_energy = get_field<double>(j, "relative_energy");
  p.latency_norm = get_field<double>(j, "latency_norm");
}

void to_json(json& j, const FeedbackRecord& fb) {
  j = json{{"client_id", fb.client_id},
           {"round", fb.round},
           {"level", fb.level},
           {"ratings", fb.ratings},
           {"free_text", fb.free_text}};
}

void from_json(const json& j, FeedbackRecord& fb) {
  fb.client_id = get_field<std::string>(j, "client_id");
  fb.round = get_field<int>(j, "round");
  fb.level = get_field<Level>(j, "level");
  fb.ratings = get_field<FactorValues>(j, "ratings");
  fb.free_text = j.contains("free_text") ? get_field<std::string>(j, "free_text") : std::string{};
  validate(fb);
}

json perf_table_to_json(const PerfTable& table) {
  json j = json::object();
  for (const auto& [level, p] : table) j[std::string(label(level))] = p;
  return j;
}

PerfTable perf_table_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("table", "expected an object keyed by level");
  PerfTable out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Level level = parse_label<Level>(it.key(), "table");
    out[level] = get_field<PerformanceEstimate>(j, it.key());
  }
  validate(out);
  return out;
}

json contribution_to_json(const ContributionMap& c) {
  json j = json::object();
  for (const auto& [level, v] : c) j[std::string(label(level))] = v;
  return j;
}

ContributionMap contribution_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("contribution_estimate", "expected an object keyed by level");
  ContributionMap out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    out[parse_label<Level>(it.key(), "contribution_estimate")] = get_field<double>(j, it.key());
  }
  return out;
}

void to_json(json& j, const ClientProfile& p) {
  j = json{{"client_id", p.client_id},
           {"hardware", p.hardware},
           {"context", p.context},
           {"inferred", p.inferred},
           {"estimated_weights", p.estimated_weights},
           {"contribution_estimate", contribution_to_json(p.contribution_estimate)}};
}

void from_json(const json& j, ClientProfile& p) {
  p.client_id = get_field<std::string>(j, "client_id");
  p.hardware = get_field<HardwareSpec>(j, "hardware");
  p.context = get_field<ContextualFactors>(j, "context");
  p.inferred = get_field<InferredFactors>(j, "inferred");
  p.estimated_weights = get_field<SensitivityWeights>(j, "estimated_weights");
  p.contribution_estimate = contribution_from_json(get_field<json>(j, "contribution_estimate"));
  validate(p);
}

void to_json(json& j, const RoundPlan& plan) {
  json assignments = json::object();
  for (const auto& [id, level] : plan.assignments) assignments[id] = label(level);
  json usage = json::object();
  for (const auto& [level, n] : plan.slot_usage) usage[std::string(label(level))] = n;
  j = json{{"round", plan.round},
           {"assignments", std::move(assignments)},
           {"slot_usage", std::move(usage)},
           {"utilization", plan.utilization},
           {"over_capacity", plan.over_capacity}};
}

void from_json(const json& j, RoundPlan& plan) {
  plan.round = get_field<int>(j, "round");
  plan.assignments.clear();
  const auto assignments = get_field<json>(j, "assignments");
  for (auto it = assignments.begin(); it != assignments.end(); ++it) {
    plan.assignments[it.key()] = it.value().get<Level>();
  }
  plan.slot_usage.clear();
  const auto usage = get_field<json>(j, "slot_usage");
  for (auto it = usage.begin(); it != usage.end(); ++it) {
    plan.slot_usage[parse_label<Level>(it.key(), "slot_usage")] = it.value().get<int>();
  }
  plan.utilization = get_field<double>(j, "utilization");
  plan.over_capacity =
      j.contains("over_capacity") ? get_field<std::vector<std::string>>(j, "over_capacity") : std::vector<std::string>{};
}

}  // namespace qplan
