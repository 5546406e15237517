#pragma once

// Planning server state and operations behind the REST API. All mutations go
// through one mutex; language-model extraction runs outside it.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qplan/config.hpp"
#include "qplan/extraction.hpp"
#include "qplan/interview.hpp"
#include "qplan/knowledge_store.hpp"
#include "qplan/planner.hpp"

namespace qplan {

struct Assignment {
  int round = 0;
  Level level = Level::kInt4;
};

struct RunningStats {
  std::size_t count = 0;
  double sum = 0.0;
  double last = 0.0;

  void add(double x) {
    ++count;
    sum += x;
    last = x;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

class PlanningService {
 public:
  explicit PlanningService(ServerConfig config);

  const ServerConfig& config() const { return config_; }

  std::string register_client(const HardwareSpec& hw);

  struct InterviewStart {
    std::string session_id;
    std::string agent_message;
  };
  // hardware_change needs the new spec; it replaces the old one when the
  // session completes.
  InterviewStart start_interview(const std::string& client_id, Scenario scenario,
                                 const std::optional<HardwareSpec>& new_hardware = std::nullopt);
  InterviewSession::Step send_message(const std::string& session_id, std::string text);
  json session_json(const std::string& session_id) const;

  ClientProfile profile(const std::string& client_id) const;
  std::optional<Assignment> assignment(const std::string& client_id) const;

  // Selects, plans and aggregates one round.
  RoundPlan plan_round(std::optional<int> round);

  std::uint64_t submit_feedback(const std::string& client_id, FeedbackRecord feedback);

  json metrics() const;
  std::size_t case_count() const { return kb_->cases.size(); }

 private:
  struct ClientState {
    HardwareSpec hardware;
    std::optional<ClientProfile> profile;
    std::optional<FactorValues> hints;
    std::optional<Assignment> assignment;
  };
  struct SessionState {
    std::unique_ptr<InterviewSession> session;
    std::optional<HardwareSpec> new_hardware;
  };

  ClientState& client_locked(const std::string& client_id);
  const ClientState& client_locked(const std::string& client_id) const;
  void complete_session(const SessionState& s, const Extraction& extraction);
  std::uint64_t insert_feedback_locked(const ClientState& client, const FeedbackRecord& feedback);

  ServerConfig config_;
  std::unique_ptr<KnowledgeBase> kb_;
  mutable std::mutex mutex_;
  std::map<std::string, ClientState> clients_;
  std::map<std::string, SessionState> sessions_;
  GlobalModelState state_;
  RunningStats feedback_satisfaction_;
  RunningStats planned_satisfaction_;
  RunningStats planned_energy_;
  int rounds_planned_ = 0;
  int next_client_ = 1;
  int next_session_ = 1;
};

// Seeds an empty hardware store from a catalog file, or the built-in catalog
// when `fixture` is empty.
void seed_hwperf(HwPerfStore& store, const std::string& fixture);

}  // namespace qplan
