#include <gtest/gtest.h>

#include <algorithm>

#include "generators.hpp"
#include "qplan/satisfaction.hpp"

namespace qplan {
namespace {

FactorValues fv(double a, double e, double l) {
  FactorValues v;
  v[Factor::kAccuracy] = a;
  v[Factor::kEnergy] = e;
  v[Factor::kLatency] = l;
  return v;
}

// Independent oracle: plain index loop over raw arrays.
double dot_oracle(const std::array<double, 3>& w, const std::array<double, 3>& x) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += w[i] * x[i];
  return s;
}

std::array<double, 3> arr(const FactorValues& v) { return v.values; }
std::array<double, 3> arr(const SensitivityWeights& w) { return w.values().values; }

RewardPenaltyTable one_level(Level q, FactorValues r, FactorValues p) {
  RewardPenaltyTable t;
  t.rewards[q] = r;
  t.penalties[q] = p;
  return t;
}

RewardPenaltyTable random_table(testgen::Rng& rng) {
  RewardPenaltyTable t;
  for (Level q : kAllLevels) {
    t.rewards[q] = fv(testgen::uniform(rng), testgen::uniform(rng), testgen::uniform(rng));
    t.penalties[q] = fv(testgen::uniform(rng), testgen::uniform(rng), testgen::uniform(rng));
  }
  return t;
}

ContributionMap random_contribution(testgen::Rng& rng) {
  ContributionMap c;
  for (Level q : kAllLevels) c[q] = testgen::uniform(rng, 0.5, 2.5);
  return c;
}

Level exhaustive_argmax(const std::vector<std::pair<Level, double>>& scored) {
  Level best = scored.front().first;
  double best_score = scored.front().second;
  for (const auto& [q, s] : scored) {
    if (s > best_score || (s == best_score && bit_width(q) < bit_width(best))) {
      best = q;
      best_score = s;
    }
  }
  return best;
}

TEST(BuildRewardPenalty, ExtremesAtTopLevel) {
  const auto t = build_reward_penalty({{Level::kFp32, {1.0, 1.0, 1.0}}});
  EXPECT_EQ(t.rewards.at(Level::kFp32), fv(1.0, 0.0, 0.0));
  EXPECT_EQ(t.penalties.at(Level::kFp32), fv(0.0, 1.0, 1.0));
}

TEST(BuildRewardPenalty, ArithmeticComplement) {
  const auto t = build_reward_penalty({{Level::kInt4, {0.6, 0.2, 0.25}}});
  EXPECT_EQ(t.rewards.at(Level::kInt4), fv(0.6, 0.8, 0.75));
  EXPECT_DOUBLE_EQ(t.penalties.at(Level::kInt4)[Factor::kAccuracy], 0.4);
  EXPECT_DOUBLE_EQ(t.penalties.at(Level::kInt4)[Factor::kEnergy], 0.2);
  EXPECT_DOUBLE_EQ(t.penalties.at(Level::kInt4)[Factor::kLatency], 0.25);
}

TEST(BuildRewardPenalty, CellsSumToOneAndStayInUnitRange) {
  testgen::Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto t = build_reward_penalty(testgen::perf_table(rng, {kAllLevels.begin(), kAllLevels.end()}));
    for (Level q : t.levels()) {
      for (auto f : kAllFactors) {
        EXPECT_DOUBLE_EQ(t.rewards.at(q)[f] + t.penalties.at(q)[f], 1.0);
        EXPECT_GE(t.rewards.at(q)[f], 0.0);
        EXPECT_LE(t.rewards.at(q)[f], 1.0);
      }
    }
  }
}

TEST(BuildRewardPenalty, MissingLevelIsListed) {
  const std::vector<Level> need{Level::kInt4, Level::kInt8, Level::kFp16};
  try {
    build_reward_penalty({{Level::kInt4, {0.6, 0.2, 0.25}}}, need);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("INT8, FP16"), std::string::npos);
  }
}

TEST(TotalReward, Examples) {
  const auto t1 = one_level(Level::kInt8, fv(0.7, 0.1, 0.1), fv(0.3, 0.9, 0.9));
  EXPECT_DOUBLE_EQ(total_reward(validate_weights(fv(1, 0, 0)), t1, 1.0, Level::kInt8), 0.7);

  const auto w = validate_weights(fv(0.5, 0.3, 0.2));
  const auto t2 = one_level(Level::kInt8, fv(0.8, 0.6, 0.4), fv(0.2, 0.4, 0.6));
  const double oracle = dot_oracle({0.5, 0.3, 0.2}, {0.8, 0.6, 0.4});
  EXPECT_NEAR(oracle, 0.66, 1e-15);
  EXPECT_NEAR(total_reward(w, t2, 1.0, Level::kInt8), oracle, 1e-12);
  EXPECT_NEAR(total_reward(w, t2, 2.0, Level::kInt8), 1.32, 1e-12);
}

TEST(TotalReward, Errors) {
  const auto t = one_level(Level::kInt8, fv(0.7, 0.1, 0.1), fv(0.3, 0.9, 0.9));
  EXPECT_THROW(total_reward(SensitivityWeights{}, t, 1.0, Level::kFp16), ValidationError);
  EXPECT_THROW(total_reward(SensitivityWeights{}, t, 0.0, Level::kInt8), ValidationError);
}

TEST(TotalPenalty, Examples) {
  const auto t1 = one_level(Level::kInt8, fv(0.7, 0.1, 0.1), fv(0.3, 0.9, 0.9));
  EXPECT_DOUBLE_EQ(total_penalty(validate_weights(fv(1, 0, 0)), t1, Level::kInt8), 0.3);

  const auto t2 = one_level(Level::kInt8, fv(0.8, 0.6, 0.4), fv(0.2, 0.4, 0.6));
  const double oracle = dot_oracle({0.5, 0.3, 0.2}, {0.2, 0.4, 0.6});
  EXPECT_NEAR(oracle, 0.34, 1e-15);
  EXPECT_NEAR(total_penalty(validate_weights(fv(0.5, 0.3, 0.2)), t2, Level::kInt8), oracle, 1e-12);

  const auto t3 = one_level(Level::kInt4, fv(0.6, 0.6, 0.6), fv(0.4, 0.4, 0.4));
  EXPECT_NEAR(total_penalty(SensitivityWeights{}, t3, Level::kInt4), 0.4, 1e-15);
  EXPECT_THROW(total_penalty(SensitivityWeights{}, t3, Level::kFp32), ValidationError);
}

TEST(SatisfactionScore, Examples) {
  const auto w = validate_weights(fv(0.5, 0.3, 0.2));
  const auto t = one_level(Level::kInt8, fv(0.8, 0.6, 0.4), fv(0.2, 0.4, 0.6));
  const auto s = satisfaction_score(w, t, {{Level::kInt8, 1.0}}, Level::kInt8);
  EXPECT_NEAR(s.satisfaction, 0.32, 1e-12);
  EXPECT_EQ(s.satisfaction, s.reward_total - s.penalty_total);

  const auto half = one_level(Level::kFp16, fv(0.5, 0.5, 0.5), fv(0.5, 0.5, 0.5));
  EXPECT_DOUBLE_EQ(satisfaction_score(w, half, {{Level::kFp16, 1.0}}, Level::kFp16).satisfaction, 0.0);
  EXPECT_DOUBLE_EQ(satisfaction_score(w, half, {{Level::kFp16, 2.0}}, Level::kFp16).satisfaction, 0.5);

  EXPECT_THROW(satisfaction_score(w, t, {{Level::kFp16, 1.0}}, Level::kInt8), ValidationError);
}

// Builds a table whose satisfaction (with c = 1 and zero penalties) equals
// the given per-level score under weights {1,0,0}.
RewardPenaltyTable table_with_scores(const std::map<Level, double>& scores) {
  RewardPenaltyTable t;
  for (const auto& [q, s] : scores) {
    t.rewards[q] = fv(s, 0, 0);
    t.penalties[q] = fv(0, 0, 0);
  }
  return t;
}

TEST(OptimalLevel, Examples) {
  const auto w = validate_weights(fv(1, 0, 0));
  const ContributionMap ones{{Level::kInt8, 1}, {Level::kFp16, 1}, {Level::kFp32, 1}};
  const auto t = table_with_scores({{Level::kInt8, 0.4}, {Level::kFp16, 0.5}, {Level::kFp32, 0.3}});
  const std::vector<Level> all{Level::kInt8, Level::kFp16, Level::kFp32};
  EXPECT_EQ(optimal_level(w, t, ones, all), Level::kFp16);

  const auto tie = table_with_scores({{Level::kInt8, 0.5}, {Level::kFp16, 0.5}});
  const std::vector<Level> pair{Level::kFp16, Level::kInt8};
  EXPECT_EQ(optimal_level(w, tie, ones, pair), Level::kInt8);

  EXPECT_THROW(optimal_level(w, t, ones, std::vector<Level>{}), ValidationError);
}

TEST(Properties, ScoreIdentityLinearityAndOracle) {
  testgen::Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto w = testgen::weights(rng);
    const auto t = random_table(rng);
    const auto c = random_contribution(rng);
    const double k = testgen::uniform(rng, 0.1, 10.0);
    for (Level q : kAllLevels) {
      const auto s = satisfaction_score(w, t, c, q);
      EXPECT_EQ(s.satisfaction, s.reward_total - s.penalty_total);
      EXPECT_NEAR(s.reward_total, c.at(q) * dot_oracle(arr(w), arr(t.rewards.at(q))), 1e-12);
      EXPECT_NEAR(s.penalty_total, dot_oracle(arr(w), arr(t.penalties.at(q))), 1e-12);
      EXPECT_NEAR(total_reward(w, t, k * c.at(q), q), k * total_reward(w, t, c.at(q), q), 1e-12);
    }
  }
}

TEST(Properties, ArgmaxMatchesExhaustiveScanIncludingTies) {
  testgen::Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const auto w = testgen::weights(rng);
    auto t = random_table(rng);
    const auto c = random_contribution(rng);
    if (i % 4 == 0) {
      // Force a tie between two random levels.
      const Level a = testgen::any_level(rng), b = testgen::any_level(rng);
      t.rewards[b] = t.rewards[a];
      t.penalties[b] = t.penalties[a];
      auto c2 = c;
      c2[b] = c2[a];
      std::vector<std::pair<Level, double>> scored;
      for (Level q : kAllLevels) scored.emplace_back(q, satisfaction_score(w, t, c2, q).satisfaction);
      EXPECT_EQ(optimal_level(w, t, c2, kAllLevels), exhaustive_argmax(scored));
      continue;
    }
    std::vector<std::pair<Level, double>> scored;
    for (Level q : kAllLevels) {
      scored.emplace_back(q, c.at(q) * dot_oracle(arr(w), arr(t.rewards.at(q))) -
                                 dot_oracle(arr(w), arr(t.penalties.at(q))));
    }
    EXPECT_EQ(optimal_level(w, t, c, kAllLevels), exhaustive_argmax(scored));
  }
}

TEST(Properties, ShiftingAllScoresKeepsArgmax) {
  testgen::Rng rng(5);
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto w = testgen::weights(rng);
    auto t = random_table(rng);
    ContributionMap ones;
    for (Level q : kAllLevels) ones[q] = 1.0;
    std::vector<double> scores;
    for (Level q : kAllLevels) scores.push_back(satisfaction_score(w, t, ones, q).satisfaction);
    std::sort(scores.rbegin(), scores.rend());
    const Level before = optimal_level(w, t, ones, kAllLevels);
    // An equal extra reward on every factor of every level adds delta to each
    // score because the weights sum to one.
    const double delta = testgen::uniform(rng, -0.5, 0.5);
    for (auto& [q, r] : t.rewards) {
      for (auto f : kAllFactors) r[f] += delta;
    }
    // Floating-point rounding may reorder scores closer than this.
    if (scores[0] - scores[1] < 1e-9) continue;
    ++compared;
    EXPECT_EQ(optimal_level(w, t, ones, kAllLevels), before);
  }
  EXPECT_GT(compared, 990);
}

TEST(Properties, RaisingTheWinnersRewardKeepsIt) {
  testgen::Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    const auto w = testgen::weights(rng);
    auto t = random_table(rng);
    const auto c = random_contribution(rng);
    const Level q0 = optimal_level(w, t, c, kAllLevels);
    const Factor f = testgen::any<Factor>(rng);
    t.rewards[q0][f] += testgen::uniform(rng, 0.0, 0.5);
    EXPECT_EQ(optimal_level(w, t, c, kAllLevels), q0);
  }
}

TEST(Properties, UniformWeightsComplementGivesSignedMean) {
  testgen::Rng rng(8);
  const std::vector<Level> levels(kAllLevels.begin(), kAllLevels.end());
  for (int i = 0; i < 200; ++i) {
    const auto t = build_reward_penalty(testgen::perf_table(rng, levels));
    for (Level q : levels) {
      const auto& r = t.rewards.at(q);
      const double expected = 2.0 * ((r[Factor::kAccuracy] + r[Factor::kEnergy] + r[Factor::kLatency]) / 3.0) - 1.0;
      const double s = satisfaction_score(SensitivityWeights{}, t, {{q, 1.0}}, q).satisfaction;
      EXPECT_NEAR(s, expected, 1e-12);
      EXPECT_GE(s, -1.0);
      EXPECT_LE(s, 1.0);
    }
  }
}

InferredFactors point_mass(TaskCategory c) {
  InferredFactors inf;
  TaskValues d{};
  d[c] = 1.0;
  inf.data_distribution = d;
  return inf;
}

TEST(ContributionMultiplier, FedAvgIsNeutral) {
  testgen::Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(contribution_multiplier(Strategy::kFedAvg, testgen::inferred(rng), testgen::distribution(rng),
                                      testgen::any_level(rng), testgen::uniform(rng, 0, 5)),
              1.0);
  }
}

TEST(ContributionMultiplier, ClassEqualSmartHomeClient) {
  const auto g = default_task_distribution();
  const auto inf = point_mass(TaskCategory::kSmartHome);
  // Oracle: rarity as an explicit weighted sum over the four classes.
  const double g_arr[4] = {0.327, 0.160, 0.319, 0.194};
  const double d_arr[4] = {0, 1, 0, 0};
  double rarity = 0.0;
  for (int c = 0; c < 4; ++c) rarity += d_arr[c] * (1.0 - g_arr[c]);
  EXPECT_NEAR(1.0 + rarity, 1.84, 1e-15);
  EXPECT_NEAR(contribution_multiplier(Strategy::kClassEqual, inf, g, Level::kFp32), 1.0 + rarity, 1e-12);
  EXPECT_NEAR(contribution_multiplier(Strategy::kClassEqual, inf, g, Level::kInt4), 1.0 + rarity * 4.0 / 32.0,
              1e-12);
  EXPECT_NEAR(contribution_multiplier(Strategy::kClassEqual, inf, g, Level::kInt4), 1.105, 1e-12);
}

TEST(ContributionMultiplier, MajorityCentricUsesAlignment) {
  const auto g = default_task_distribution();
  const auto inf = point_mass(TaskCategory::kEntertainment);
  EXPECT_NEAR(contribution_multiplier(Strategy::kMajorityCentric, inf, g, Level::kFp32, 2.0), 1.0 + 2.0 * 0.327,
              1e-12);
}

TEST(ContributionMultiplier, AtLeastOneAndIncreasingInBitWidth) {
  testgen::Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const auto inf = testgen::inferred(rng);
    const auto g = testgen::distribution(rng);
    for (auto s : {Strategy::kClassEqual, Strategy::kMajorityCentric}) {
      double prev = 0.0;
      for (Level q : kAllLevels) {
        const double c = contribution_multiplier(s, inf, g, q);
        EXPECT_GE(c, 1.0);
        EXPECT_GE(c, prev);
        prev = c;
      }
    }
  }
  EXPECT_THROW(parse_label<Strategy>("greedy", "strategy"), ValidationError);
}

}  // namespace
}  // namespace qplan
