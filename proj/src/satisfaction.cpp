#include "qplan/satisfaction.hpp"

namespace qplan {

namespace {

double weighted_sum(const SensitivityWeights& weights, const FactorValues& values) {
  double sum = 0.0;
  for (auto f : kAllFactors) sum += weights[f] * values[f];
  return sum;
}

const FactorValues& row(const std::map<Level, FactorValues>& m, Level q, const char* what) {
  auto it = m.find(q);
  if (it == m.end()) throw ValidationError(what, "no entry for level " + std::string(label(q)));
  return it->second;
}

}  // namespace

std::vector<Level> RewardPenaltyTable::levels() const {
  std::vector<Level> out;
  for (const auto& [level, _] : rewards) {
    if (penalties.count(level)) out.push_back(level);
  }
  return out;
}

RewardPenaltyTable build_reward_penalty(const PerfTable& perf) {
  validate(perf);
  RewardPenaltyTable table;
  for (const auto& [level, p] : perf) {
    FactorValues r;
    r[Factor::kAccuracy] = p.accuracy;
    r[Factor::kEnergy] = 1.0 - p.relative_energy;
    r[Factor::kLatency] = 1.0 - p.latency_norm;
    FactorValues pen;
    for (auto f : kAllFactors) pen[f] = 1.0 - r[f];
    table.rewards[level] = r;
    table.penalties[level] = pen;
  }
  return table;
}

RewardPenaltyTable build_reward_penalty(const PerfTable& perf, std::span<const Level> required) {
  std::string missing;
  for (Level q : required) {
    if (!perf.count(q)) missing += (missing.empty() ? "" : ", ") + std::string(label(q));
  }
  if (!missing.empty()) throw ValidationError("performance", "missing levels: " + missing);
  return build_reward_penalty(perf);
}

double total_reward(const SensitivityWeights& weights, const RewardPenaltyTable& table, double c_q, Level q) {
  if (!(c_q > 0.0)) throw ValidationError("c_q", "contribution multiplier must be > 0");
  return c_q * weighted_sum(weights, row(table.rewards, q, "rewards"));
}

double total_penalty(const SensitivityWeights& weights, const RewardPenaltyTable& table, Level q) {
  return weighted_sum(weights, row(table.penalties, q, "penalties"));
}

LevelScore satisfaction_score(const SensitivityWeights& weights, const RewardPenaltyTable& table,
                              const ContributionMap& c, Level q) {
  auto it = c.find(q);
  if (it == c.end()) throw ValidationError("contribution", "no multiplier for level " + std::string(label(q)));
  LevelScore s;
  s.level = q;
  s.reward_total = total_reward(weights, table, it->second, q);
  s.penalty_total = total_penalty(weights, table, q);
  s.satisfaction = s.reward_total - s.penalty_total;
  return s;
}

Level optimal_level(const SensitivityWeights& weights, const RewardPenaltyTable& table, const ContributionMap& c,
                    std::span<const Level> candidates) {
  if (candidates.empty()) throw ValidationError("candidates", "must not be empty");
  std::optional<LevelScore> best;
  for (Level q : candidates) {
    const LevelScore s = satisfaction_score(weights, table, c, q);
    if (!best || s.satisfaction > best->satisfaction ||
        (s.satisfaction == best->satisfaction && bit_width(q) < bit_width(best->level))) {
      best = s;
    }
  }
  return best->level;
}

std::vector<LevelScore> score_levels(const SensitivityWeights& weights, const RewardPenaltyTable& table,
                                     const ContributionMap& c) {
  std::vector<LevelScore> out;
  for (Level q : table.levels()) out.push_back(satisfaction_score(weights, table, c, q));
  return out;
}

double contribution_multiplier(Strategy strategy, const InferredFactors& inferred,
                               const TaskDistribution& global_dist, Level level, double beta) {
  if (strategy == Strategy::kFedAvg) return 1.0;
  if (!(beta >= 0.0)) throw ValidationError("beta", "must be >= 0");
  double rarity = 0.0;
  double alignment = 0.0;
  for (auto c : kAllTasks) {
    rarity += inferred.data_distribution[c] * (1.0 - global_dist[c]);
    alignment += inferred.data_distribution[c] * global_dist[c];
  }
  const double share = static_cast<double>(bit_width(level)) / 32.0;
  switch (strategy) {
    case Strategy::kClassEqual:
      return 1.0 + beta * rarity * share;
    case Strategy::kMajorityCentric:
      return 1.0 + beta * alignment * share;
    case Strategy::kFedAvg:
      break;
  }
  return 1.0;
}

ContributionMap contribution_estimate(Strategy strategy, const InferredFactors& inferred,
                                      const TaskDistribution& global_dist, std::span<const Level> levels,
                                      double beta) {
  ContributionMap out;
  for (Level q : levels) out[q] = contribution_multiplier(strategy, inferred, global_dist, q, beta);
  return out;
}

void to_json(json& j, const LevelScore& s) {
  j = json{{"level", s.level},
           {"reward_total", s.reward_total},
           {"penalty_total", s.penalty_total},
           {"satisfaction", s.satisfaction}};
}

}  // namespace qplan
