#include "qplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qplan {

SlotConfig SlotConfig::unbounded() {
  SlotConfig s;
  for (Level level : kAllLevels) s.capacity[level] = kUnboundedCapacity;
  return s;
}

void validate(const SlotConfig& slots) {
  bool any_positive = false;
  for (const auto& [level, cap] : slots.capacity) {
    if (cap < 0) throw ValidationError("capacity." + std::string(label(level)), "must be >= 0");
    any_positive = any_positive || cap > 0;
  }
  if (!any_positive) throw ValidationError("capacity", "at least one level needs a positive capacity");
}

void to_json(json& j, const SlotConfig& s) {
  j = json::object();
  for (const auto& [level, cap] : s.capacity) j[std::string(label(level))] = cap;
}

void from_json(const json& j, SlotConfig& s) {
  if (!j.is_object()) throw ValidationError("capacity", "expected an object keyed by level");
  s.capacity.clear();
  for (const auto& [key, value] : j.items()) {
    s.capacity[parse_label<Level>(key, "capacity")] = get_field<int>(j, key);
  }
  validate(s);
}

std::vector<std::string> select_clients(int round, std::vector<std::string> population, int participation) {
  if (population.empty()) throw ValidationError("population", "no clients registered");
  const auto n = static_cast<long long>(population.size());
  if (participation < 1 || participation > n) {
    throw ValidationError("participation", "must be between 1 and the population size");
  }
  if (round < 0) throw ValidationError("round", "must be >= 0");
  std::sort(population.begin(), population.end());
  const long long start = (static_cast<long long>(round) * participation) % n;
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(participation));
  for (long long i = 0; i < participation; ++i) out.push_back(population[static_cast<std::size_t>((start + i) % n)]);
  return out;
}

double ScoredClient::satisfaction(Level level) const {
  for (const auto& s : scores) {
    if (s.level == level) return s.satisfaction;
  }
  throw ValidationError("level", std::string(label(level)) + " not scored for " + client_id);
}

ScoredClient score_client(const ClientProfile& profile, const PerfTable& perf) {
  PerfTable available;
  for (Level level : profile.hardware.available_levels) {
    auto it = perf.find(level);
    if (it == perf.end()) {
      throw ValidationError("perf_tables." + profile.client_id, "missing level " + std::string(label(level)));
    }
    available.emplace(level, it->second);
  }
  const auto table = build_reward_penalty(available);
  ScoredClient out;
  out.client_id = profile.client_id;
  out.scores = score_levels(profile.estimated_weights, table, profile.contribution_estimate);
  out.best = optimal_level(profile.estimated_weights, table, profile.contribution_estimate,
                           profile.hardware.available_levels);
  out.best_satisfaction = out.satisfaction(out.best);
  return out;
}

RoundPlan plan_scored(int round, std::vector<ScoredClient> clients, const SlotConfig& slots, double epsilon) {
  if (!(epsilon >= 0.0)) throw ValidationError("epsilon", "must be >= 0");
  validate(slots);
  std::sort(clients.begin(), clients.end(), [](const ScoredClient& a, const ScoredClient& b) {
    if (a.best_satisfaction != b.best_satisfaction) return a.best_satisfaction > b.best_satisfaction;
    return a.client_id < b.client_id;
  });

  RoundPlan plan;
  plan.round = round;
  std::map<Level, int> remaining = slots.capacity;
  int within = 0;
  for (const auto& c : clients) {
    if (plan.assignments.count(c.client_id)) throw ValidationError("profiles", "duplicate client " + c.client_id);
    std::vector<LevelScore> candidates;
    for (const auto& s : c.scores) {
      if (s.satisfaction >= c.best_satisfaction - epsilon) candidates.push_back(s);
    }
    // Scores arrive ascending by bit width, so a stable sort keeps the lower
    // level first among equal scores.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const LevelScore& a, const LevelScore& b) { return a.satisfaction > b.satisfaction; });
    Level chosen = c.best;
    bool placed = false;
    for (const auto& s : candidates) {
      if (remaining[s.level] > 0) {
        --remaining[s.level];
        chosen = s.level;
        placed = true;
        break;
      }
    }
    if (placed) {
      ++within;
    } else {
      plan.over_capacity.push_back(c.client_id);
    }
    plan.assignments[c.client_id] = chosen;
    ++plan.slot_usage[chosen];
  }
  std::sort(plan.over_capacity.begin(), plan.over_capacity.end());
  const long long total = std::accumulate(slots.capacity.begin(), slots.capacity.end(), 0LL,
                                          [](long long acc, const auto& kv) { return acc + kv.second; });
  plan.utilization = std::clamp(static_cast<double>(within) / static_cast<double>(total), 0.0, 1.0);
  return plan;
}

RoundPlan plan_round(int round, std::span<const ClientProfile> profiles,
                     const std::map<std::string, PerfTable>& perf_tables, const SlotConfig& slots, double epsilon) {
  std::vector<ScoredClient> scored;
  scored.reserve(profiles.size());
  for (const auto& p : profiles) {
    auto it = perf_tables.find(p.client_id);
    if (it == perf_tables.end()) throw ValidationError("perf_tables." + p.client_id, "missing performance table");
    scored.push_back(score_client(p, it->second));
  }
  return plan_scored(round, std::move(scored), slots, epsilon);
}

void validate(const AccuracyModel& model) {
  if (!(model.kappa > 0.0)) throw ValidationError("accuracy_kappa", "must be > 0");
  for (auto c : kAllTasks) {
    if (!(model.max[c] >= 0.0 && model.max[c] <= 1.0)) {
      throw ValidationError("accuracy_max." + std::string(label(c)), "must be in [0, 1]");
    }
  }
}

void to_json(json& j, const AccuracyModel& m) { j = json{{"kappa", m.kappa}, {"max", m.max}}; }

void from_json(const json& j, AccuracyModel& m) {
  m.kappa = get_field<double>(j, "kappa");
  m.max = get_field<TaskValues>(j, "max");
  validate(m);
}

TaskValues accuracy_proxy(const TaskValues& class_mass, const AccuracyModel& model) {
  TaskValues out{};
  for (auto c : kAllTasks) {
    if (!(class_mass[c] >= 0.0)) throw ValidationError("class_mass." + std::string(label(c)), "must be >= 0");
    out[c] = model.max[c] * -std::expm1(-model.kappa * class_mass[c]);
  }
  return out;
}

void to_json(json& j, const GlobalModelState& s) {
  j = json{{"round", s.round}, {"class_mass", s.class_mass}, {"accuracy", s.accuracy}};
}

void from_json(const json& j, GlobalModelState& s) {
  s.round = get_field<int>(j, "round");
  s.class_mass = get_field<TaskValues>(j, "class_mass");
  s.accuracy = get_field<TaskValues>(j, "accuracy");
}

GlobalModelState aggregate_round(const RoundPlan& plan, const std::map<std::string, ClientProfile>& profiles,
                                 const GlobalModelState& state, const std::map<std::string, double>& quantity_map,
                                 const AccuracyModel& model) {
  GlobalModelState next = state;
  for (const auto& [client, level] : plan.assignments) {
    auto p = profiles.find(client);
    if (p == profiles.end()) throw ValidationError("profiles." + client, "missing profile");
    auto q = quantity_map.find(client);
    if (q == quantity_map.end()) throw ValidationError("quantity." + client, "missing quantity");
    if (!(q->second >= 0.0)) throw ValidationError("quantity." + client, "must be >= 0");
    const double weight = q->second * precision_factor(level);
    for (auto c : kAllTasks) next.class_mass[c] += weight * p->second.inferred.data_distribution[c];
  }
  next.accuracy = accuracy_proxy(next.class_mass, model);
  next.round = state.round + 1;
  return next;
}

}  // namespace qplan
