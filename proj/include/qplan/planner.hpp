#pragma once

// Server-side round planning: client scheduling, merit-filtered slot packing
// and contribution accounting for aggregation.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "qplan/domain.hpp"
#include "qplan/satisfaction.hpp"

namespace qplan {

struct SlotConfig {
  std::map<Level, int> capacity;

  // Enough room at every level that capacity never binds.
  static SlotConfig unbounded();

  bool operator==(const SlotConfig&) const = default;
};

inline constexpr int kUnboundedCapacity = 1'000'000;

void validate(const SlotConfig& slots);
void to_json(json& j, const SlotConfig& s);
void from_json(const json& j, SlotConfig& s);

// Window of `participation` ids out of the sorted population, starting at
// (round * participation) mod n and wrapping around.
std::vector<std::string> select_clients(int round, std::vector<std::string> population, int participation);

struct ScoredClient {
  std::string client_id;
  // Ascending by bit width.
  std::vector<LevelScore> scores;
  Level best = Level::kInt4;
  double best_satisfaction = 0.0;

  double satisfaction(Level level) const;
};

ScoredClient score_client(const ClientProfile& profile, const PerfTable& perf);

// Packing over pre-scored clients. Candidates are the levels within epsilon of
// each client's optimum; clients go in order of descending optimum (ties by
// id) and take their best candidate that still has a slot, else their optimum
// without one.
RoundPlan plan_scored(int round, std::vector<ScoredClient> clients, const SlotConfig& slots, double epsilon);

// Throws ValidationError when a profile has no performance table.
RoundPlan plan_round(int round, std::span<const ClientProfile> profiles,
                     const std::map<std::string, PerfTable>& perf_tables, const SlotConfig& slots, double epsilon);

struct AccuracyModel {
  double kappa = 0.01;
  TaskValues max = {{1.0, 1.0, 1.0, 1.0}};
};

void validate(const AccuracyModel& model);
void to_json(json& j, const AccuracyModel& m);
void from_json(const json& j, AccuracyModel& m);

// max[c] * (1 - exp(-kappa * mass[c]))
TaskValues accuracy_proxy(const TaskValues& class_mass, const AccuracyModel& model);

struct GlobalModelState {
  int round = 0;
  TaskValues class_mass{};
  TaskValues accuracy{};

  bool operator==(const GlobalModelState&) const = default;
};

void to_json(json& j, const GlobalModelState& s);
void from_json(const json& j, GlobalModelState& s);

constexpr double precision_factor(Level level) { return bit_width(level) / 32.0; }

GlobalModelState aggregate_round(const RoundPlan& plan, const std::map<std::string, ClientProfile>& profiles,
                                 const GlobalModelState& state, const std::map<std::string, double>& quantity_map,
                                 const AccuracyModel& model = {});

}  // namespace qplan
