#pragma once

// Reward-penalty satisfaction model: per-level rewards and penalties derived
// from performance estimates, weighted totals, the signed satisfaction score,
// and the argmax level selection.

#include <map>
#include <span>
#include <vector>

#include "qplan/domain.hpp"

namespace qplan {

struct LevelScore {
  Level level = Level::kInt4;
  double reward_total = 0.0;
  double penalty_total = 0.0;
  // Always exactly reward_total - penalty_total.
  double satisfaction = 0.0;

  bool operator==(const LevelScore&) const = default;
};

struct RewardPenaltyTable {
  std::map<Level, FactorValues> rewards;
  std::map<Level, FactorValues> penalties;

  bool contains(Level level) const { return rewards.count(level) != 0 && penalties.count(level) != 0; }
  std::vector<Level> levels() const;
};

// R_accuracy = accuracy, R_energy = 1 - relative_energy,
// R_latency = 1 - latency_norm, and every penalty is the complement 1 - R.
RewardPenaltyTable build_reward_penalty(const PerfTable& perf);
// Same, but every level of `required` must be present; the error lists the
// missing ones.
RewardPenaltyTable build_reward_penalty(const PerfTable& perf, std::span<const Level> required);

double total_reward(const SensitivityWeights& weights, const RewardPenaltyTable& table, double c_q, Level q);
double total_penalty(const SensitivityWeights& weights, const RewardPenaltyTable& table, Level q);

LevelScore satisfaction_score(const SensitivityWeights& weights, const RewardPenaltyTable& table,
                              const ContributionMap& c, Level q);

// Highest satisfaction among `candidates`; equal scores resolve to the lower
// bit width.
Level optimal_level(const SensitivityWeights& weights, const RewardPenaltyTable& table, const ContributionMap& c,
                    std::span<const Level> candidates);

// Scores for every level of the table, ascending by bit width.
std::vector<LevelScore> score_levels(const SensitivityWeights& weights, const RewardPenaltyTable& table,
                                     const ContributionMap& c);

// Contribution strategies of the server. fedavg weighs all samples equally;
// the two biased strategies favour higher precision for clients whose data is
// rare (class_equal) or aligned with the majority (majority_centric).
enum class Strategy : std::uint8_t { kFedAvg, kClassEqual, kMajorityCentric };

template <>
struct EnumLabels<Strategy> {
  static constexpr std::array names{std::string_view{"fedavg"}, std::string_view{"class_equal"},
                                    std::string_view{"majority_centric"}};
  static constexpr std::size_t size = names.size();
};

inline constexpr double kDefaultBeta = 1.0;

double contribution_multiplier(Strategy strategy, const InferredFactors& inferred,
                               const TaskDistribution& global_dist, Level level, double beta = kDefaultBeta);

ContributionMap contribution_estimate(Strategy strategy, const InferredFactors& inferred,
                                      const TaskDistribution& global_dist, std::span<const Level> levels,
                                      double beta = kDefaultBeta);

void to_json(json& j, const LevelScore& s);

}  // namespace qplan
