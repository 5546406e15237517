#include "qplan/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

#include "qplan/extraction.hpp"
#include "qplan/hardware_catalog.hpp"
#include "qplan/profiler.hpp"

namespace qplan {

namespace {

template <class E>
json enum_array_to_json(const EnumArray<E>& a) {
  json j = json::object();
  for (E e : all_values<E>()) j[std::string(label(e))] = a[e];
  return j;
}

template <class E>
EnumArray<E> enum_array_from_json(const json& j) {
  EnumArray<E> out;
  for (E e : all_values<E>()) out[e] = get_field<double>(j, label(e));
  return out;
}

template <class E>
void validate_prior(const EnumArray<E>& p, const std::string& field) {
  double total = 0.0;
  for (E e : all_values<E>()) {
    if (!(p[e] >= 0.0)) throw ValidationError(field + "." + std::string(label(e)), "must be >= 0");
    total += p[e];
  }
  if (!(total > 0.0)) throw ValidationError(field, "needs a positive entry");
}

template <class E>
E draw(std::mt19937_64& rng, const EnumArray<E>& prior) {
  std::discrete_distribution<std::size_t> d(prior.values.begin(), prior.values.end());
  return static_cast<E>(d(rng));
}

// Shortest text that parses back to the same double.
std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string_view factor_phrase(Factor f) {
  switch (f) {
    case Factor::kAccuracy:
      return "accuracy";
    case Factor::kEnergy:
      return "battery life";
    case Factor::kLatency:
      return "response speed";
  }
  return {};
}

std::string location_reply(Location l) {
  switch (l) {
    case Location::kBedroom:
      return "It's in my bedroom.";
    case Location::kLivingRoom:
      return "In the living room.";
    case Location::kKitchen:
      return "It sits in the kitchen.";
    case Location::kOffice:
      return "On my desk in the office.";
    case Location::kOther:
      return "Out in the hallway.";
  }
  return {};
}

std::string time_reply(InteractionTime t) {
  switch (t) {
    case InteractionTime::kDaytime:
      return "Mostly during the day.";
    case InteractionTime::kNighttime:
      return "Mostly at night.";
    case InteractionTime::kMixed:
      return "A mix of both, day and night.";
  }
  return {};
}

std::string frequency_reply(Frequency f) {
  switch (f) {
    case Frequency::kLow:
      return "Only a few times a week.";
    case Frequency::kMedium:
      return "A few times a day, every day.";
    case Frequency::kHigh:
      return "Pretty much all the time.";
  }
  return {};
}

std::string tasks_reply(const TaskDistribution& mix) {
  return "Entertainment " + shortest(mix[TaskCategory::kEntertainment]) + ", smart home " +
         shortest(mix[TaskCategory::kSmartHome]) + ", general questions " +
         shortest(mix[TaskCategory::kGeneralQuery]) + ", personal requests " +
         shortest(mix[TaskCategory::kPersonalRequest]) + ".";
}

std::string ranking_reply(const SensitivityWeights& w) {
  std::array<Factor, 3> order = kAllFactors;
  std::stable_sort(order.begin(), order.end(), [&](Factor a, Factor b) { return w[a] > w[b]; });
  return std::string(factor_phrase(order[0])) + " first, then " + std::string(factor_phrase(order[1])) + ", " +
         std::string(factor_phrase(order[2])) + " last.";
}

SensitivityWeights energy_override(const SensitivityWeights& w, double mass) {
  FactorValues out{};
  const double rest = w[Factor::kAccuracy] + w[Factor::kLatency];
  out[Factor::kEnergy] = mass;
  out[Factor::kAccuracy] = rest > 0.0 ? (1.0 - mass) * w[Factor::kAccuracy] / rest : (1.0 - mass) / 2.0;
  out[Factor::kLatency] = rest > 0.0 ? (1.0 - mass) * w[Factor::kLatency] / rest : (1.0 - mass) / 2.0;
  return validate_weights(out);
}

double utilization_of(const RoundPlan& plan, const SlotConfig& slots) {
  long long within = 0, total = 0;
  for (const auto& [level, cap] : slots.capacity) {
    total += cap;
    auto it = plan.slot_usage.find(level);
    within += std::min<long long>(cap, it == plan.slot_usage.end() ? 0 : it->second);
  }
  return total > 0 ? std::clamp(static_cast<double>(within) / static_cast<double>(total), 0.0, 1.0) : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void validate(const ExperimentConfig& c) {
  if (c.num_clients < 1) throw ValidationError("num_clients", "must be >= 1");
  if (c.num_rounds < 0) throw ValidationError("num_rounds", "must be >= 0");
  if (c.participation < 1 || c.participation > c.num_clients) {
    throw ValidationError("participation", "must be between 1 and num_clients");
  }
  for (auto f : kAllFactors) {
    if (!(c.weight_means[f] >= 0.0)) throw ValidationError("weight_means." + std::string(label(f)), "must be >= 0");
  }
  if (!(c.weight_stddev >= 0.0)) throw ValidationError("weight_stddev", "must be >= 0");
  validate_distribution(c.global_dist);
  validate(AccuracyModel{c.accuracy_kappa, c.accuracy_max});
  if (!(c.dirichlet_concentration > 0.0)) throw ValidationError("dirichlet_concentration", "must be > 0");
  if (!(c.vague_probability >= 0.0 && c.vague_probability <= 1.0)) {
    throw ValidationError("vague_probability", "must be in [0, 1]");
  }
  if (!(c.feedback_noise >= 0.0)) throw ValidationError("feedback_noise", "must be >= 0");
  if (!(c.energy_priority_mass >= 0.0 && c.energy_priority_mass <= 1.0)) {
    throw ValidationError("energy_priority_mass", "must be in [0, 1]");
  }
  validate_prior(c.priors.location, "priors.location");
  validate_prior(c.priors.time, "priors.time");
  validate_prior(c.priors.frequency, "priors.frequency");
  validate(c.slots);
  if (!(c.epsilon >= 0.0)) throw ValidationError("epsilon", "must be >= 0");
  validate(ProfilingOptions{c.k, c.hint_blend, c.strategy, c.beta, c.global_dist});
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"num_clients", c.num_clients},
           {"num_rounds", c.num_rounds},
           {"participation", c.participation},
           {"planner", label(c.planner)},
           {"strategy", label(c.strategy)},
           {"seed", c.seed},
           {"weight_means", c.weight_means},
           {"weight_stddev", c.weight_stddev},
           {"global_dist", c.global_dist},
           {"accuracy_kappa", c.accuracy_kappa},
           {"accuracy_max", c.accuracy_max},
           {"dirichlet_concentration", c.dirichlet_concentration},
           {"vague_probability", c.vague_probability},
           {"feedback_noise", c.feedback_noise},
           {"energy_priority_mass", c.energy_priority_mass},
           {"priors",
            {{"location", enum_array_to_json(c.priors.location)},
             {"time", enum_array_to_json(c.priors.time)},
             {"frequency", enum_array_to_json(c.priors.frequency)}}},
           {"slots", c.slots},
           {"epsilon", c.epsilon},
           {"k", c.k},
           {"hint_blend", c.hint_blend},
           {"beta", c.beta}};
}

void from_json(const json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ValidationError("config", "expected an object");
  c = ExperimentConfig{};
  auto opt = [&](std::string_view key, auto& target) {
    if (j.contains(key)) target = get_field<std::remove_reference_t<decltype(target)>>(j, key);
  };
  opt("num_clients", c.num_clients);
  opt("num_rounds", c.num_rounds);
  opt("participation", c.participation);
  if (j.contains("planner")) c.planner = parse_label<Planner>(get_field<std::string>(j, "planner"), "planner");
  if (j.contains("strategy")) c.strategy = parse_label<Strategy>(get_field<std::string>(j, "strategy"), "strategy");
  opt("seed", c.seed);
  opt("weight_means", c.weight_means);
  opt("weight_stddev", c.weight_stddev);
  if (j.contains("global_dist")) c.global_dist = validate_distribution(get_field<TaskValues>(j, "global_dist"));
  opt("accuracy_kappa", c.accuracy_kappa);
  opt("accuracy_max", c.accuracy_max);
  opt("dirichlet_concentration", c.dirichlet_concentration);
  opt("vague_probability", c.vague_probability);
  opt("feedback_noise", c.feedback_noise);
  opt("energy_priority_mass", c.energy_priority_mass);
  if (j.contains("priors")) {
    const json p = get_field<json>(j, "priors");
    try {
      if (p.contains("location")) c.priors.location = enum_array_from_json<Location>(p["location"]);
      if (p.contains("time")) c.priors.time = enum_array_from_json<InteractionTime>(p["time"]);
      if (p.contains("frequency")) c.priors.frequency = enum_array_from_json<Frequency>(p["frequency"]);
    } catch (const ValidationError& e) {
      throw ValidationError("priors." + e.field(), e.message());
    }
  }
  opt("slots", c.slots);
  opt("epsilon", c.epsilon);
  opt("k", c.k);
  opt("hint_blend", c.hint_blend);
  opt("beta", c.beta);
  validate(c);
}

// ---------------------------------------------------------------------------
// Population and interviews

std::vector<SimClient> spawn_population(const ExperimentConfig& config, const std::vector<HwPerfRecord>& tiers) {
  validate(config);
  if (tiers.empty()) throw ValidationError("tiers", "need at least one hardware tier");
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick_tier(0, tiers.size() - 1);
  std::normal_distribution<double> standard_normal(0.0, 1.0);

  std::vector<SimClient> out;
  out.reserve(static_cast<std::size_t>(config.num_clients));
  for (int i = 0; i < config.num_clients; ++i) {
    SimClient c;
    char id[32];
    std::snprintf(id, sizeof id, "sim-%04d", i);
    c.client_id = id;
    c.hardware = tiers[pick_tier(rng)].hardware;

    FactorValues raw{};
    for (auto f : kAllFactors) {
      raw[f] = std::clamp(config.weight_means[f] + config.weight_stddev * standard_normal(rng), 0.01, 1.0);
    }
    c.true_weights = validate_weights(raw);

    c.true_context.device_location = draw(rng, config.priors.location);
    c.true_context.interaction_time = draw(rng, config.priors.time);
    c.true_context.interaction_frequency = draw(rng, config.priors.frequency);
    // Dirichlet around the global distribution, sampled through gammas.
    TaskValues mix{};
    double total = 0.0;
    for (auto t : kAllTasks) {
      const double alpha = config.dirichlet_concentration * config.global_dist[t];
      if (alpha > 0.0) mix[t] = std::gamma_distribution<double>(alpha, 1.0)(rng);
      total += mix[t];
    }
    c.true_context.task_type_mix = total > 0.0 ? validate_distribution(mix) : config.global_dist;

    const bool high = infer_factors(c.true_context).data_quantity == DataQuantity::kHigh;
    c.data_quantity = high ? 2.0 : 1.0;
    c.noise_seed = rng();
    out.push_back(std::move(c));
  }
  return out;
}

Transcript simulate_interview(const SimClient& client, const ExperimentConfig& config) {
  std::mt19937_64 rng(client.noise_seed);
  std::bernoulli_distribution vague(config.vague_probability);
  InterviewSession session(client.client_id, Scenario::kInitialization);
  session.next();
  for (const auto& q : interview_script(Scenario::kInitialization)) {
    std::string reply;
    switch (q.slot) {
      case Slot::kLocation:
        reply = location_reply(client.true_context.device_location);
        break;
      case Slot::kUsageTime:
        reply = time_reply(client.true_context.interaction_time);
        break;
      case Slot::kFrequency:
        reply = frequency_reply(client.true_context.interaction_frequency);
        break;
      case Slot::kTaskTypes:
        reply = tasks_reply(client.true_context.task_type_mix);
        break;
      case Slot::kPriorityRanking:
        reply = ranking_reply(client.true_weights);
        break;
      default:
        reply = "Yes.";
        break;
    }
    if (vague(rng)) reply = "Not sure, to be honest.";
    session.next(std::move(reply));
  }
  return session.transcript();
}

double ground_truth_satisfaction(const SimClient& client, Level level, const PerfTable& perf) {
  if (!client.hardware.supports(level)) {
    throw ValidationError("level", std::string(label(level)) + " not available to " + client.client_id);
  }
  const auto table = build_reward_penalty(perf);
  return satisfaction_score(client.true_weights, table, ContributionMap{{level, 1.0}}, level).satisfaction;
}

Level unified_level(const HardwareSpec& hw) {
  validate(hw);
  const Level top = hw.highest_level();
  if (top == Level::kFp32) return Level::kFp16;
  if (hw.available_levels.size() == 1) return top;
  return hw.available_levels[hw.available_levels.size() - 2];
}

// ---------------------------------------------------------------------------
// Report

void to_json(json& j, const ExperimentReport& r) {
  json hist = json::array();
  for (const auto& b : r.satisfaction_histogram) hist.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  json series = json::array();
  for (const auto& s : r.per_round_series) {
    series.push_back({{"round", s.round},
                      {"mean_satisfaction", s.mean_satisfaction},
                      {"mean_relative_energy", s.mean_relative_energy},
                      {"utilization", s.utilization},
                      {"accuracy", s.accuracy}});
  }
  j = json{{"config", r.config},
           {"mean_satisfaction", r.mean_satisfaction},
           {"satisfaction_histogram", std::move(hist)},
           {"mean_relative_energy", r.mean_relative_energy},
           {"per_class_accuracy", r.per_class_accuracy},
           {"class_mass", r.class_mass},
           {"per_round_series", std::move(series)}};
}

void from_json(const json& j, ExperimentReport& r) {
  r.config = get_field<ExperimentConfig>(j, "config");
  r.mean_satisfaction = get_field<double>(j, "mean_satisfaction");
  r.satisfaction_histogram.clear();
  for (const auto& b : get_field<json>(j, "satisfaction_histogram")) {
    r.satisfaction_histogram.push_back(
        {get_field<double>(b, "lo"), get_field<double>(b, "hi"), get_field<std::size_t>(b, "count")});
  }
  r.mean_relative_energy = get_field<double>(j, "mean_relative_energy");
  r.per_class_accuracy = get_field<TaskValues>(j, "per_class_accuracy");
  r.class_mass = get_field<TaskValues>(j, "class_mass");
  r.per_round_series.clear();
  for (const auto& s : get_field<json>(j, "per_round_series")) {
    r.per_round_series.push_back({get_field<int>(s, "round"), get_field<double>(s, "mean_satisfaction"),
                                  get_field<double>(s, "mean_relative_energy"), get_field<double>(s, "utilization"),
                                  get_field<TaskValues>(s, "accuracy")});
  }
}

// ---------------------------------------------------------------------------
// Experiment loop

ExperimentReport run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, default_hardware_catalog());
}

ExperimentReport run_experiment(const ExperimentConfig& config, const std::vector<HwPerfRecord>& tiers) {
  validate(config);
  const auto population = spawn_population(config, tiers);

  HwPerfStore hwperf;
  for (const auto& t : tiers) hwperf.insert(t);
  CaseStore cases;

  std::map<std::string, const SimClient*> by_id;
  std::vector<std::string> ids;
  std::map<std::string, ClientProfile> truth;
  std::map<std::string, double> quantity;
  std::map<std::string, PerfTable> perf;
  for (const auto& c : population) {
    by_id[c.client_id] = &c;
    ids.push_back(c.client_id);
    ClientProfile t;
    t.client_id = c.client_id;
    t.hardware = c.hardware;
    t.context = c.true_context;
    t.inferred = infer_factors(c.true_context);
    truth[c.client_id] = t;
    quantity[c.client_id] = c.data_quantity;
    perf[c.client_id] = hwperf.lookup_performance(c.hardware);
  }

  const ProfilingOptions options{config.k, config.hint_blend, config.strategy, config.beta, config.global_dist};
  const AccuracyModel accuracy{config.accuracy_kappa, config.accuracy_max};
  std::map<std::string, Extraction> interviews;

  std::mt19937_64 feedback_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> standard_normal(0.0, 1.0);

  ExperimentReport report;
  report.config = config;
  for (int b = 0; b < kHistogramBins; ++b) {
    report.satisfaction_histogram.push_back(
        {-1.0 + 2.0 * b / kHistogramBins, -1.0 + 2.0 * (b + 1) / kHistogramBins, 0});
  }
  GlobalModelState state;
  state.accuracy = accuracy_proxy(state.class_mass, accuracy);
  double sat_sum = 0.0, energy_sum = 0.0;
  std::size_t entries = 0;

  for (int round = 0; round < config.num_rounds; ++round) {
    const auto selected = select_clients(round, ids, config.participation);
    RoundPlan plan;
    std::map<std::string, ClientProfile> estimated;

    if (config.planner == Planner::kUnified) {
      plan.round = round;
      for (const auto& id : selected) {
        const Level level = unified_level(by_id.at(id)->hardware);
        plan.assignments[id] = level;
        ++plan.slot_usage[level];
      }
      plan.utilization = utilization_of(plan, config.slots);
    } else {
      std::vector<ClientProfile> planning;
      for (const auto& id : selected) {
        const SimClient& client = *by_id.at(id);
        auto it = interviews.find(id);
        if (it == interviews.end()) {
          it = interviews
                   .emplace(id, extract_factors_rules(simulate_interview(client, config), Scenario::kInitialization))
                   .first;
        }
        auto built = build_profile(id, client.hardware, it->second.context, it->second.weight_hints, cases, hwperf,
                                   options);
        ClientProfile p = built.profile;
        if (config.planner == Planner::kEnergyPriority) {
          p.estimated_weights = energy_override(p.estimated_weights, config.energy_priority_mass);
        }
        planning.push_back(std::move(p));
        estimated.emplace(id, std::move(built.profile));
      }
      plan = plan_round(round, planning, perf, config.slots, config.epsilon);
    }

    RoundSummary summary;
    summary.round = round;
    summary.utilization = plan.utilization;
    std::vector<CaseRecord> new_cases;
    for (const auto& [id, level] : plan.assignments) {
      const SimClient& client = *by_id.at(id);
      const PerfTable& table = perf.at(id);
      const double s = ground_truth_satisfaction(client, level, table);
      const double e = table.at(level).relative_energy;
      summary.mean_satisfaction += s;
      summary.mean_relative_energy += e;
      sat_sum += s;
      energy_sum += e;
      ++entries;
      const int bin = std::clamp(static_cast<int>(std::floor((s + 1.0) / 2.0 * kHistogramBins)), 0,
                                 kHistogramBins - 1);
      ++report.satisfaction_histogram[static_cast<std::size_t>(bin)].count;

      auto est = estimated.find(id);
      if (est == estimated.end()) continue;
      // Users rate what they experienced: the true reward of each factor,
      // blurred by a little reporting noise.
      const auto rewards = build_reward_penalty(table).rewards.at(level);
      CaseRecord record;
      record.context = est->second.context;
      record.level = level;
      record.inferred_weights = est->second.estimated_weights;
      record.feedback.client_id = id;
      record.feedback.round = round;
      record.feedback.level = level;
      for (auto f : kAllFactors) {
        record.feedback.ratings[f] =
            std::clamp(rewards[f] + config.feedback_noise * standard_normal(feedback_rng), 0.0, 1.0);
      }
      new_cases.push_back(std::move(record));
    }
    for (auto& c : new_cases) cases.insert(std::move(c));

    const auto n = static_cast<double>(plan.assignments.size());
    if (n > 0) {
      summary.mean_satisfaction /= n;
      summary.mean_relative_energy /= n;
    }
    state = aggregate_round(plan, truth, state, quantity, accuracy);
    summary.accuracy = state.accuracy;
    report.per_round_series.push_back(summary);
  }

  if (entries > 0) {
    report.mean_satisfaction = sat_sum / static_cast<double>(entries);
    report.mean_relative_energy = energy_sum / static_cast<double>(entries);
  }
  report.per_class_accuracy = state.accuracy;
  report.class_mass = state.class_mass;
  return report;
}

std::string metrics_csv(const ExperimentReport& report) {
  std::string out = "round,mean_satisfaction,mean_relative_energy";
  for (auto t : kAllTasks) out += ",acc_" + std::string(label(t));
  out += '\n';
  for (const auto& s : report.per_round_series) {
    out += std::to_string(s.round) + ',' + shortest(s.mean_satisfaction) + ',' + shortest(s.mean_relative_energy);
    for (auto t : kAllTasks) out += ',' + shortest(s.accuracy[t]);
    out += '\n';
  }
  return out;
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + path.string());
  };
  write(dir / "report.json", json(report).dump(2) + "\n");
  write(dir / "metrics.csv", metrics_csv(report));
}

}  // namespace qplan
