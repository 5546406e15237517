#pragma once

// Scripted interview sessions. Each scenario is a fixed list of questions;
// the session is a small state machine that alternates agent questions and
// user replies until the script is exhausted.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qplan/domain.hpp"

namespace qplan {

enum class Scenario : std::uint8_t { kInitialization, kPreAggregation, kHardwareChange };

template <>
struct EnumLabels<Scenario> {
  static constexpr std::array names{std::string_view{"initialization"}, std::string_view{"pre_aggregation"},
                                    std::string_view{"hardware_change"}};
  static constexpr std::size_t size = names.size();
};

// What a question asks for.
enum class Slot : std::uint8_t {
  kConfirmHardware,
  kLocation,
  kUsageTime,
  kFrequency,
  kTaskTypes,
  kPriorityRanking,
  kRateAccuracy,
  kRateLatency,
  kRateEnergy,
  kContextChange,
};

template <>
struct EnumLabels<Slot> {
  static constexpr std::array names{
      std::string_view{"confirm_hardware"}, std::string_view{"device_location"}, std::string_view{"usage_time"},
      std::string_view{"interaction_frequency"}, std::string_view{"task_types"},
      std::string_view{"priority_ranking"}, std::string_view{"rate_accuracy"}, std::string_view{"rate_latency"},
      std::string_view{"rate_energy"}, std::string_view{"context_change"}};
  static constexpr std::size_t size = names.size();
};

struct Question {
  Slot slot;
  std::string_view text;
};

std::span<const Question> interview_script(Scenario scenario);
std::string_view closing_message(Scenario scenario);

// Looks a question text up across all scripts.
std::optional<Slot> slot_for_question(std::string_view text);

enum class Role : std::uint8_t { kAgent, kUser };

template <>
struct EnumLabels<Role> {
  static constexpr std::array names{std::string_view{"agent"}, std::string_view{"user"}};
  static constexpr std::size_t size = names.size();
};

struct Turn {
  Role role = Role::kAgent;
  std::string text;

  bool operator==(const Turn&) const = default;
};

using Transcript = std::vector<Turn>;

void to_json(json& j, const Turn& t);
void from_json(const json& j, Turn& t);

class SessionFinishedError : public ConflictError {
 public:
  using ConflictError::ConflictError;
};

class InterviewSession {
 public:
  struct Step {
    std::string agent_message;
    bool done = false;
  };

  InterviewSession(std::string client_id, Scenario scenario);

  // First call takes no reply and returns the opening question. Every later
  // call needs the user's reply to the last question.
  Step next(std::optional<std::string> user_reply = std::nullopt);

  const std::string& client_id() const { return client_id_; }
  Scenario scenario() const { return scenario_; }
  const Transcript& transcript() const { return transcript_; }
  bool done() const { return done_; }
  bool started() const { return !transcript_.empty(); }
  // "not_started", "ask_<slot>", or "done".
  std::string state() const;

  std::optional<ContextualFactors> extracted;
  std::optional<FactorValues> weight_hints;

 private:
  std::string client_id_;
  Scenario scenario_;
  Transcript transcript_;
  std::size_t asked_ = 0;
  bool done_ = false;
};

// (slot, reply) pairs of a transcript, in order; later answers to the same
// slot replace earlier ones.
std::vector<std::pair<Slot, std::string>> answered_slots(const Transcript& transcript);

}  // namespace qplan
