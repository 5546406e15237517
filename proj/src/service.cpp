#include "qplan/service.hpp"

#include <cstdio>

#include "qplan/hardware_catalog.hpp"
#include "qplan/profiler.hpp"

namespace qplan {

namespace {

std::string numbered(const char* prefix, int n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%0*d", prefix, width, n);
  return buf;
}

// Satisfaction with C = 1 and the user's own per-factor ratings as rewards.
double rated_satisfaction(const SensitivityWeights& w, const FactorValues& ratings) {
  double reward = 0.0, penalty = 0.0;
  for (auto f : kAllFactors) {
    reward += w[f] * ratings[f];
    penalty += w[f] * (1.0 - ratings[f]);
  }
  return reward - penalty;
}

json stats_json(const RunningStats& s) { return json{{"count", s.count}, {"mean", s.mean()}, {"last", s.last}}; }

}  // namespace

void seed_hwperf(HwPerfStore& store, const std::string& fixture) {
  if (store.size() > 0) return;
  const auto records = fixture.empty() ? default_hardware_catalog() : catalog_from_json(read_json_file(fixture));
  for (const auto& r : records) store.insert(r);
}

PlanningService::PlanningService(ServerConfig config) : config_(std::move(config)) {
  validate(config_);
  kb_ = config_.data_dir.empty() ? std::make_unique<KnowledgeBase>()
                                 : std::make_unique<KnowledgeBase>(std::filesystem::path(config_.data_dir));
  seed_hwperf(kb_->hwperf, config_.hwperf_fixture);
  state_.accuracy = accuracy_proxy(state_.class_mass, config_.accuracy);
}

PlanningService::ClientState& PlanningService::client_locked(const std::string& client_id) {
  auto it = clients_.find(client_id);
  if (it == clients_.end()) throw NotFoundError("unknown client '" + client_id + "'");
  return it->second;
}

const PlanningService::ClientState& PlanningService::client_locked(const std::string& client_id) const {
  auto it = clients_.find(client_id);
  if (it == clients_.end()) throw NotFoundError("unknown client '" + client_id + "'");
  return it->second;
}

std::string PlanningService::register_client(const HardwareSpec& hw) {
  validate(hw);
  // Fail early if nothing in the store resembles this device.
  kb_->hwperf.lookup_performance(hw);
  std::lock_guard lock(mutex_);
  std::string id = numbered("client", next_client_++, 4);
  clients_[id].hardware = hw;
  return id;
}

PlanningService::InterviewStart PlanningService::start_interview(const std::string& client_id, Scenario scenario,
                                                                 const std::optional<HardwareSpec>& new_hardware) {
  if (new_hardware) {
    validate(*new_hardware);
    kb_->hwperf.lookup_performance(*new_hardware);
  }
  std::lock_guard lock(mutex_);
  const ClientState& client = client_locked(client_id);
  if (scenario == Scenario::kPreAggregation && !client.profile) {
    throw ConflictError("client '" + client_id + "' has no profile yet; run the initialization interview first");
  }
  if (scenario == Scenario::kHardwareChange && !new_hardware) {
    throw ValidationError("hardware", "required for the hardware_change scenario");
  }
  SessionState s;
  s.session = std::make_unique<InterviewSession>(client_id, scenario);
  s.new_hardware = new_hardware;
  const auto step = s.session->next();
  std::string sid = numbered("session", next_session_++, 6);
  sessions_.emplace(sid, std::move(s));
  return {sid, step.agent_message};
}

InterviewSession::Step PlanningService::send_message(const std::string& session_id, std::string text) {
  Transcript transcript;
  Scenario scenario;
  std::optional<ContextualFactors> prior;
  InterviewSession::Step step;
  {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw NotFoundError("unknown session '" + session_id + "'");
    InterviewSession& session = *it->second.session;
    step = session.next(std::move(text));
    if (!step.done) return step;
    transcript = session.transcript();
    scenario = session.scenario();
    const ClientState& client = client_locked(session.client_id());
    if (client.profile) prior = client.profile->context;
  }

  // The model call can be slow, so it runs without holding the lock. The
  // session is already done and cannot be advanced concurrently.
  const Extraction extraction = extract_factors(transcript, scenario, prior, {}, config_.llm);

  std::lock_guard lock(mutex_);
  auto& s = sessions_.at(session_id);
  s.session->extracted = extraction.context;
  s.session->weight_hints = extraction.weight_hints;
  complete_session(s, extraction);
  return step;
}

void PlanningService::complete_session(const SessionState& s, const Extraction& extraction) {
  const InterviewSession& session = *s.session;
  ClientState& client = client_locked(session.client_id());
  if (s.new_hardware) client.hardware = *s.new_hardware;
  if (extraction.weight_hints) client.hints = extraction.weight_hints;

  if (session.scenario() == Scenario::kPreAggregation && extraction.ratings && client.assignment) {
    FeedbackRecord fb;
    fb.client_id = session.client_id();
    fb.round = client.assignment->round;
    fb.level = client.assignment->level;
    fb.ratings = *extraction.ratings;
    for (const auto& turn : session.transcript()) {
      if (turn.role == Role::kUser) fb.free_text += (fb.free_text.empty() ? "" : " | ") + turn.text;
    }
    insert_feedback_locked(client, fb);
  }

  ProfilingOptions options = config_.profiling;
  auto built = build_profile(session.client_id(), client.hardware, extraction.context, client.hints, kb_->cases,
                             kb_->hwperf, options);
  client.profile = std::move(built.profile);
}

json PlanningService::session_json(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + session_id + "'");
  const InterviewSession& s = *it->second.session;
  json out{{"session_id", session_id},
           {"client_id", s.client_id()},
           {"scenario", label(s.scenario())},
           {"state", s.state()},
           {"done", s.done()},
           {"transcript", s.transcript()}};
  if (s.extracted) out["extracted"] = *s.extracted;
  if (s.weight_hints) out["weight_hints"] = *s.weight_hints;
  return out;
}

ClientProfile PlanningService::profile(const std::string& client_id) const {
  std::lock_guard lock(mutex_);
  const ClientState& client = client_locked(client_id);
  if (!client.profile) throw NotFoundError("client '" + client_id + "' has no profile yet");
  return *client.profile;
}

std::optional<Assignment> PlanningService::assignment(const std::string& client_id) const {
  std::lock_guard lock(mutex_);
  return client_locked(client_id).assignment;
}

RoundPlan PlanningService::plan_round(std::optional<int> round) {
  std::lock_guard lock(mutex_);
  const int r = round.value_or(state_.round);
  if (r < 0) throw ValidationError("round", "must be >= 0");

  std::vector<std::string> population;
  for (const auto& [id, c] : clients_) {
    if (c.profile) population.push_back(id);
  }
  if (population.empty()) throw ConflictError("no profiled clients to plan for");
  const int participation = std::min<int>(config_.participation, static_cast<int>(population.size()));
  const auto selected = select_clients(r, population, participation);

  std::vector<ClientProfile> profiles;
  std::map<std::string, ClientProfile> by_id;
  std::map<std::string, PerfTable> perf;
  std::map<std::string, double> quantity;
  for (const auto& id : selected) {
    const ClientProfile& p = *clients_.at(id).profile;
    profiles.push_back(p);
    by_id.emplace(id, p);
    perf.emplace(id, kb_->hwperf.lookup_performance(p.hardware));
    quantity.emplace(id, p.inferred.data_quantity == DataQuantity::kHigh ? 2.0 : 1.0);
  }
  RoundPlan plan = qplan::plan_round(r, profiles, perf, config_.slots, config_.epsilon);

  for (const auto& p : profiles) {
    const Level level = plan.assignments.at(p.client_id);
    const auto scored = score_client(p, perf.at(p.client_id));
    planned_satisfaction_.add(scored.satisfaction(level));
    planned_energy_.add(perf.at(p.client_id).at(level).relative_energy);
    clients_.at(p.client_id).assignment = Assignment{r, level};
  }
  state_ = aggregate_round(plan, by_id, state_, quantity, config_.accuracy);
  ++rounds_planned_;
  return plan;
}

std::uint64_t PlanningService::insert_feedback_locked(const ClientState& client, const FeedbackRecord& feedback) {
  CaseRecord record;
  record.context = client.profile->context;
  record.level = feedback.level;
  record.feedback = feedback;
  record.inferred_weights = client.profile->estimated_weights;
  const auto id = kb_->cases.insert(std::move(record));
  feedback_satisfaction_.add(rated_satisfaction(client.profile->estimated_weights, feedback.ratings));
  return id;
}

std::uint64_t PlanningService::submit_feedback(const std::string& client_id, FeedbackRecord feedback) {
  if (feedback.client_id != client_id) throw ValidationError("client_id", "does not match the client in the path");
  validate(feedback);
  std::lock_guard lock(mutex_);
  const ClientState& client = client_locked(client_id);
  if (!client.profile) throw ConflictError("client '" + client_id + "' has no profile yet");
  if (!client.hardware.supports(feedback.level)) {
    throw ValidationError("level", "not available on this client's hardware");
  }
  return insert_feedback_locked(client, feedback);
}

json PlanningService::metrics() const {
  std::lock_guard lock(mutex_);
  std::size_t profiled = 0;
  for (const auto& [id, c] : clients_) profiled += c.profile ? 1 : 0;
  return json{{"state", state_},
              {"rounds_planned", rounds_planned_},
              {"clients", clients_.size()},
              {"profiled_clients", profiled},
              {"case_count", kb_->cases.size()},
              {"feedback_satisfaction", stats_json(feedback_satisfaction_)},
              {"planned_satisfaction", stats_json(planned_satisfaction_)},
              {"planned_relative_energy", stats_json(planned_energy_)}};
}

}  // namespace qplan
