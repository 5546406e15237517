#pragma once

// Shared domain types for precision planning. Every other module builds on
// these; the canonical JSON encoding lives here as well.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace qplan {

using json = nlohmann::json;

// Bad input. `field()` names the offending field or label so that API layers
// can report it verbatim.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)), message_(message) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string field_;
  std::string message_;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Labelled enums

enum class Level : std::uint8_t { kInt4, kInt8, kFp16, kFp32 };
enum class Factor : std::uint8_t { kAccuracy, kEnergy, kLatency };
enum class TaskCategory : std::uint8_t { kEntertainment, kSmartHome, kGeneralQuery, kPersonalRequest };
enum class PowerState : std::uint8_t { kMains, kBatteryHigh, kBatteryLow };
enum class Location : std::uint8_t { kBedroom, kLivingRoom, kKitchen, kOffice, kOther };
enum class InteractionTime : std::uint8_t { kDaytime, kNighttime, kMixed };
enum class Frequency : std::uint8_t { kLow, kMedium, kHigh };
enum class NoiseLevel : std::uint8_t { kLow, kHigh };
enum class DataQuantity : std::uint8_t { kLow, kHigh };

template <class E>
struct EnumLabels;

#define QPLAN_ENUM_LABELS(E, ...)                                         \
  template <>                                                             \
  struct EnumLabels<E> {                                                  \
    static constexpr std::array names{__VA_ARGS__};                       \
    static constexpr std::size_t size = names.size();                     \
  }

QPLAN_ENUM_LABELS(Level, std::string_view{"INT4"}, std::string_view{"INT8"}, std::string_view{"FP16"},
                  std::string_view{"FP32"});
QPLAN_ENUM_LABELS(Factor, std::string_view{"accuracy"}, std::string_view{"energy"},
                  std::string_view{"latency"});
QPLAN_ENUM_LABELS(TaskCategory, std::string_view{"entertainment"}, std::string_view{"smart_home"},
                  std::string_view{"general_query"}, std::string_view{"personal_request"});
QPLAN_ENUM_LABELS(PowerState, std::string_view{"mains"}, std::string_view{"battery_high"},
                  std::string_view{"battery_low"});
QPLAN_ENUM_LABELS(Location, std::string_view{"bedroom"}, std::string_view{"living_room"},
                  std::string_view{"kitchen"}, std::string_view{"office"}, std::string_view{"other"});
QPLAN_ENUM_LABELS(InteractionTime, std::string_view{"daytime"}, std::string_view{"nighttime"},
                  std::string_view{"mixed"});
QPLAN_ENUM_LABELS(Frequency, std::string_view{"low"}, std::string_view{"medium"}, std::string_view{"high"});
QPLAN_ENUM_LABELS(NoiseLevel, std::string_view{"low"}, std::string_view{"high"});
QPLAN_ENUM_LABELS(DataQuantity, std::string_view{"low"}, std::string_view{"high"});

#undef QPLAN_ENUM_LABELS

template <class E>
constexpr std::size_t enum_size() {
  return EnumLabels<E>::size;
}

template <class E>
constexpr std::size_t index_of(E e) {
  return static_cast<std::size_t>(e);
}

template <class E>
constexpr std::array<E, EnumLabels<E>::size> all_values() {
  std::array<E, EnumLabels<E>::size> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<E>(i);
  return out;
}

template <class E>
constexpr std::string_view label(E e) {
  return EnumLabels<E>::names[index_of(e)];
}

template <class E>
std::optional<E> try_parse_label(std::string_view text) {
  for (std::size_t i = 0; i < EnumLabels<E>::size; ++i) {
    if (EnumLabels<E>::names[i] == text) return static_cast<E>(i);
  }
  return std::nullopt;
}

// Throws ValidationError(field) when `text` is not a member label.
template <class E>
E parse_label(std::string_view text, std::string_view field) {
  if (auto v = try_parse_label<E>(text)) return *v;
  throw ValidationError(std::string(field), "unknown label '" + std::string(text) + "'");
}

constexpr int bit_width(Level level) {
  constexpr std::array<int, 4> widths{4, 8, 16, 32};
  return widths[index_of(level)];
}

inline constexpr auto kAllLevels = all_values<Level>();
inline constexpr auto kAllFactors = all_values<Factor>();
inline constexpr auto kAllTasks = all_values<TaskCategory>();

// Dense map keyed by a closed enum; every key is always present.
template <class E, class V = double>
struct EnumArray {
  std::array<V, EnumLabels<E>::size> values{};

  constexpr V& operator[](E e) { return values[index_of(e)]; }
  constexpr const V& operator[](E e) const { return values[index_of(e)]; }

  auto begin() const { return values.begin(); }
  auto end() const { return values.end(); }

  bool operator==(const EnumArray&) const = default;
};

using FactorValues = EnumArray<Factor>;
using TaskValues = EnumArray<TaskCategory>;
// A probability distribution over task categories (validated where used).
using TaskDistribution = TaskValues;

// Global usage distribution of smart voice assistant task categories.
TaskDistribution default_task_distribution();
TaskDistribution uniform_task_distribution();

// ---------------------------------------------------------------------------
// Weights

class SensitivityWeights {
 public:
  // Uniform weights.
  SensitivityWeights();

  double operator[](Factor f) const { return values_[f]; }
  const FactorValues& values() const { return values_; }

  bool operator==(const SensitivityWeights&) const = default;

 private:
  explicit SensitivityWeights(const FactorValues& normalized) : values_(normalized) {}
  friend SensitivityWeights validate_weights(const FactorValues& raw);

  FactorValues values_;
};

// Rescales non-negative raw weights so they sum to one. Inputs that already
// sum to one within 1e-12 are returned untouched, so the operation is
// idempotent bit-for-bit.
SensitivityWeights validate_weights(const FactorValues& raw);

TaskDistribution validate_distribution(const TaskValues& raw);

// ---------------------------------------------------------------------------
// Records

struct HardwareSpec {
  std::string processor_class;
  int ram_mb = 0;
  PowerState power_state = PowerState::kMains;
  std::vector<Level> available_levels;

  bool supports(Level level) const;
  Level highest_level() const { return available_levels.back(); }

  bool operator==(const HardwareSpec&) const = default;
};

// Available levels must be non-empty, strictly ascending, contiguous, and
// start at the lowest level.
void validate(const HardwareSpec& hw);

struct ContextualFactors {
  Location device_location = Location::kOther;
  InteractionTime interaction_time = InteractionTime::kMixed;
  Frequency interaction_frequency = Frequency::kMedium;
  TaskDistribution task_type_mix = uniform_task_distribution();

  bool operator==(const ContextualFactors&) const = default;
};

void validate(const ContextualFactors& ctx);

struct InferredFactors {
  NoiseLevel noise_level = NoiseLevel::kLow;
  DataQuantity data_quantity = DataQuantity::kLow;
  TaskDistribution data_distribution = uniform_task_distribution();

  bool operator==(const InferredFactors&) const = default;
};

void validate(const InferredFactors& inferred);

struct PerformanceEstimate {
  double accuracy = 0.0;
  double relative_energy = 1.0;
  double latency_norm = 1.0;

  bool operator==(const PerformanceEstimate&) const = default;
};

using PerfTable = std::map<Level, PerformanceEstimate>;

// Range checks per entry plus non-decreasing accuracy, energy and latency in
// bit width.
void validate(const PerfTable& table);

struct FeedbackRecord {
  std::string client_id;
  int round = 0;
  Level level = Level::kInt8;
  FactorValues ratings;
  std::string free_text;

  bool operator==(const FeedbackRecord&) const = default;
};

void validate(const FeedbackRecord& fb);

using ContributionMap = std::map<Level, double>;

struct ClientProfile {
  std::string client_id;
  HardwareSpec hardware;
  ContextualFactors context;
  InferredFactors inferred;
  SensitivityWeights estimated_weights;
  ContributionMap contribution_estimate;

  bool operator==(const ClientProfile&) const = default;
};

void validate(const ClientProfile& profile);

struct RoundPlan {
  int round = 0;
  std::map<std::string, Level> assignments;
  std::map<Level, int> slot_usage;
  double utilization = 0.0;
  // Clients that run at their optimum although no slot was left for it.
  std::vector<std::string> over_capacity;

  bool operator==(const RoundPlan&) const = default;
};

// ---------------------------------------------------------------------------
// Canonical JSON. Maps keyed by an enum use the label string as key.

void to_json(json& j, Level level);
void from_json(const json& j, Level& level);

void to_json(json& j, const FactorValues& v);
void from_json(const json& j, FactorValues& v);
void to_json(json& j, const TaskValues& v);
void from_json(const json& j, TaskValues& v);

void to_json(json& j, const SensitivityWeights& w);
void from_json(const json& j, SensitivityWeights& w);

void to_json(json& j, const HardwareSpec& hw);
void from_json(const json& j, HardwareSpec& hw);
void to_json(json& j, const ContextualFactors& ctx);
void from_json(const json& j, ContextualFactors& ctx);
void to_json(json& j, const InferredFactors& inf);
void from_json(const json& j, InferredFactors& inf);
void to_json(json& j, const PerformanceEstimate& p);
void from_json(const json& j, PerformanceEstimate& p);
void to_json(json& j, const FeedbackRecord& fb);
void from_json(const json& j, FeedbackRecord& fb);
void to_json(json& j, const ClientProfile& p);
void from_json(const json& j, ClientProfile& p);
void to_json(json& j, const RoundPlan& plan);
void from_json(const json& j, RoundPlan& plan);

json perf_table_to_json(const PerfTable& table);
PerfTable perf_table_from_json(const json& j);

json contribution_to_json(const ContributionMap& c);
ContributionMap contribution_from_json(const json& j);

// Reads `name` from object `j`, converting library type errors into
// ValidationError(name).
template <class T>
T get_field(const json& j, std::string_view name) {
  if (!j.is_object()) throw ValidationError(std::string(name), "expected an object");
  auto it = j.find(name);
  if (it == j.end()) throw ValidationError(std::string(name), "missing field");
  try {
    return it->template get<T>();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(name) + "." + e.field(), e.message());
  } catch (const json::exception& e) {
    throw ValidationError(std::string(name), e.what());
  }
}

}  // namespace qplan
