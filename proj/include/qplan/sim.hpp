#pragma once

// Experiment harness: a synthetic client population with hidden preferences,
// scripted interviews, and the round loop that reports satisfaction, energy
// and per-class accuracy for a planner / strategy pair.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qplan/config.hpp"
#include "qplan/domain.hpp"
#include "qplan/interview.hpp"
#include "qplan/knowledge_store.hpp"
#include "qplan/planner.hpp"
#include "qplan/satisfaction.hpp"

namespace qplan {

enum class Planner : std::uint8_t { kPersonalized, kUnified, kEnergyPriority };

template <>
struct EnumLabels<Planner> {
  static constexpr std::array names{std::string_view{"personalized"}, std::string_view{"unified"},
                                    std::string_view{"energy_priority"}};
  static constexpr std::size_t size = names.size();
};

struct ContextPriors {
  EnumArray<Location> location{{0.25, 0.30, 0.15, 0.15, 0.15}};
  EnumArray<InteractionTime> time{{0.40, 0.25, 0.35}};
  EnumArray<Frequency> frequency{{0.30, 0.40, 0.30}};

  bool operator==(const ContextPriors&) const = default;
};

struct ExperimentConfig {
  int num_clients = 100;
  int num_rounds = 100;
  int participation = 10;
  Planner planner = Planner::kPersonalized;
  Strategy strategy = Strategy::kFedAvg;
  std::uint64_t seed = 1;
  FactorValues weight_means{{0.5, 0.25, 0.25}};
  double weight_stddev = 0.15;
  TaskDistribution global_dist = default_task_distribution();
  double accuracy_kappa = 0.01;
  TaskValues accuracy_max{{1.0, 1.0, 1.0, 1.0}};

  // Knobs beyond the core set; defaults documented in the README.
  double dirichlet_concentration = 5.0;
  double vague_probability = 0.1;
  double feedback_noise = 0.05;
  double energy_priority_mass = 0.7;
  ContextPriors priors;
  SlotConfig slots = default_slots();
  double epsilon = 0.05;
  int k = 5;
  double hint_blend = 0.5;
  double beta = kDefaultBeta;

  bool operator==(const ExperimentConfig&) const = default;
};

void validate(const ExperimentConfig& c);
void to_json(json& j, const ExperimentConfig& c);
// Missing keys keep their defaults.
void from_json(const json& j, ExperimentConfig& c);

struct SimClient {
  std::string client_id;
  HardwareSpec hardware;
  ContextualFactors true_context;
  SensitivityWeights true_weights;
  double data_quantity = 1.0;
  std::uint64_t noise_seed = 0;
};

std::vector<SimClient> spawn_population(const ExperimentConfig& config,
                                        const std::vector<HwPerfRecord>& tiers);

// Replies are generated so that the rule-based extractor recovers the true
// context; each slot is answered vaguely with probability vague_probability.
Transcript simulate_interview(const SimClient& client, const ExperimentConfig& config);

// Satisfaction score under the true weights with C = 1.
double ground_truth_satisfaction(const SimClient& client, Level level, const PerfTable& perf);

// Fixed per-tier level of the unified baseline: FP16 for tiers topping out at
// FP32, one level below the top otherwise, the only level for one-level tiers.
Level unified_level(const HardwareSpec& hw);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;

  bool operator==(const HistogramBin&) const = default;
};

struct RoundSummary {
  int round = 0;
  double mean_satisfaction = 0.0;
  double mean_relative_energy = 0.0;
  double utilization = 0.0;
  TaskValues accuracy{};

  bool operator==(const RoundSummary&) const = default;
};

struct ExperimentReport {
  ExperimentConfig config;
  double mean_satisfaction = 0.0;
  std::vector<HistogramBin> satisfaction_histogram;
  double mean_relative_energy = 0.0;
  TaskValues per_class_accuracy{};
  TaskValues class_mass{};
  std::vector<RoundSummary> per_round_series;

  bool operator==(const ExperimentReport&) const = default;
};

void to_json(json& j, const ExperimentReport& r);
void from_json(const json& j, ExperimentReport& r);

inline constexpr int kHistogramBins = 20;

ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config, const std::vector<HwPerfRecord>& tiers);

std::string metrics_csv(const ExperimentReport& report);

// Writes report.json and metrics.csv into `dir`, creating it if needed.
void emit_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace qplan
