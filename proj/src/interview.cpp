#include "qplan/interview.hpp"

#include <array>

namespace qplan {

namespace {

constexpr std::string_view kAskLocation =
    "Hi! Let's get your assistant set up. Where will the device live, for example the bedroom, living room, "
    "kitchen or an office?";
constexpr std::string_view kAskUsageTime =
    "When do you expect to talk to it most: during the day, at night, or a mix of both?";
constexpr std::string_view kAskFrequency = "Roughly how often do you think you will use it?";
constexpr std::string_view kAskTasks =
    "What will you mostly ask it to do? For example music and entertainment, smart home control, general "
    "questions, or personal requests like reminders. Rough shares are welcome.";
constexpr std::string_view kAskRanking =
    "Last question: please rank what matters most to you between accuracy, response speed and battery life.";

constexpr std::array kInitialization{
    Question{Slot::kLocation, kAskLocation},   Question{Slot::kUsageTime, kAskUsageTime},
    Question{Slot::kFrequency, kAskFrequency}, Question{Slot::kTaskTypes, kAskTasks},
    Question{Slot::kPriorityRanking, kAskRanking},
};

constexpr std::array kPreAggregation{
    Question{Slot::kRateAccuracy,
             "Quick check-in before the next update. How satisfied were you with how accurately it understood you "
             "recently?"},
    Question{Slot::kRateLatency, "How satisfied were you with its response speed?"},
    Question{Slot::kRateEnergy, "And how satisfied were you with its battery or power use?"},
    Question{Slot::kContextChange,
             "Has anything changed since your last feedback, such as where the device is, when or how often you "
             "use it?"},
};

constexpr std::array kHardwareChange{
    Question{Slot::kConfirmHardware,
             "It looks like your device hardware has changed. Can you confirm the new device is the one you are "
             "using now?"},
    Question{Slot::kLocation, "Where is the new device located?"},
    Question{Slot::kUsageTime, kAskUsageTime},
    Question{Slot::kFrequency, kAskFrequency},
    Question{Slot::kTaskTypes, kAskTasks},
    Question{Slot::kPriorityRanking, kAskRanking},
};

}  // namespace

std::span<const Question> interview_script(Scenario scenario) {
  switch (scenario) {
    case Scenario::kInitialization:
      return kInitialization;
    case Scenario::kPreAggregation:
      return kPreAggregation;
    case Scenario::kHardwareChange:
      return kHardwareChange;
  }
  return {};
}

std::string_view closing_message(Scenario scenario) {
  switch (scenario) {
    case Scenario::kInitialization:
      return "Thanks! That's everything I need. Your device profile is being prepared.";
    case Scenario::kPreAggregation:
      return "Thanks for the feedback! It will be taken into account for the next round.";
    case Scenario::kHardwareChange:
      return "Thanks! Your profile will be updated for the new device.";
  }
  return {};
}

std::optional<Slot> slot_for_question(std::string_view text) {
  for (auto scenario : all_values<Scenario>()) {
    for (const auto& q : interview_script(scenario)) {
      if (q.text == text) return q.slot;
    }
  }
  return std::nullopt;
}

void to_json(json& j, const Turn& t) { j = json{{"role", label(t.role)}, {"text", t.text}}; }

void from_json(const json& j, Turn& t) {
  t.role = parse_label<Role>(get_field<std::string>(j, "role"), "role");
  t.text = get_field<std::string>(j, "text");
}

InterviewSession::InterviewSession(std::string client_id, Scenario scenario)
    : client_id_(std::move(client_id)), scenario_(scenario) {}

InterviewSession::Step InterviewSession::next(std::optional<std::string> user_reply) {
  if (done_) throw SessionFinishedError("interview session already finished");
  const auto script = interview_script(scenario_);
  if (!started()) {
    if (user_reply) throw ValidationError("text", "the session has not asked anything yet");
    transcript_.push_back({Role::kAgent, std::string(script[0].text)});
    asked_ = 1;
    return {transcript_.back().text, false};
  }
  if (!user_reply) throw ValidationError("text", "a reply is required");
  transcript_.push_back({Role::kUser, std::move(*user_reply)});
  if (asked_ < script.size()) {
    transcript_.push_back({Role::kAgent, std::string(script[asked_].text)});
    ++asked_;
    return {transcript_.back().text, false};
  }
  done_ = true;
  transcript_.push_back({Role::kAgent, std::string(closing_message(scenario_))});
  return {transcript_.back().text, true};
}

std::string InterviewSession::state() const {
  if (done_) return "done";
  if (!started()) return "not_started";
  return "ask_" + std::string(label(interview_script(scenario_)[asked_ - 1].slot));
}

std::vector<std::pair<Slot, std::string>> answered_slots(const Transcript& transcript) {
  std::vector<std::pair<Slot, std::string>> out;
  for (std::size_t i = 0; i + 1 < transcript.size(); ++i) {
    if (transcript[i].role != Role::kAgent || transcript[i + 1].role != Role::kUser) continue;
    auto slot = slot_for_question(transcript[i].text);
    if (!slot) continue;
    std::erase_if(out, [&](const auto& p) { return p.first == *slot; });
    out.emplace_back(*slot, transcript[i + 1].text);
  }
  return out;
}

}  // namespace qplan
