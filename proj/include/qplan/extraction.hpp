#pragma once

// Turns interview transcripts into contextual factors, weight hints and
// per-factor ratings. The rule-based extractor is deterministic and always
// available; an optional language-model path is tried first when configured
// and falls back to the rules on any failure.

#include <optional>
#include <string>
#include <string_view>

#include "qplan/domain.hpp"
#include "qplan/interview.hpp"
#include "qplan/llm_client.hpp"

namespace qplan {

// Labels used when a reply is vague ("not sure") or unrecognised.
struct ExtractorDefaults {
  Location location = Location::kOther;
  InteractionTime time = InteractionTime::kMixed;
  Frequency frequency = Frequency::kMedium;
  TaskDistribution tasks = uniform_task_distribution();
  double rating = 0.5;
};

struct Extraction {
  ContextualFactors context;
  std::optional<FactorValues> weight_hints;
  std::optional<FactorValues> ratings;
  std::string source = "rules";
};

// Weight hints handed out by rank.
inline constexpr std::array<double, 3> kRankHints{0.5, 0.3, 0.2};

bool is_vague(std::string_view reply);
std::optional<Location> match_location(std::string_view reply);
std::optional<InteractionTime> match_interaction_time(std::string_view reply);
std::optional<Frequency> match_frequency(std::string_view reply);
std::optional<TaskDistribution> match_task_mix(std::string_view reply);
// Factors in order of stated priority; nullopt when no factor is mentioned.
std::optional<std::array<Factor, 3>> match_ranking(std::string_view reply);
std::optional<double> match_rating(std::string_view reply);

FactorValues hints_from_ranking(const std::array<Factor, 3>& ranking);

// `prior` supplies the context for scenarios that do not re-ask it
// (pre_aggregation). Throws ValidationError("transcript") listing the slots
// that are unanswered.
Extraction extract_factors_rules(const Transcript& transcript, Scenario scenario,
                                 const std::optional<ContextualFactors>& prior = std::nullopt,
                                 const ExtractorDefaults& defaults = {});

// The fixed instruction sent to the language model.
std::string_view extraction_prompt();

// Parses and validates a model reply; throws ValidationError when it does not
// match the schema.
Extraction parse_llm_extraction(std::string_view reply);

// Language-model path when `llm` is enabled and the scenario collects context,
// rule-based otherwise or after the model fails validation max_retries + 1
// times or errors out.
Extraction extract_factors(const Transcript& transcript, Scenario scenario,
                           const std::optional<ContextualFactors>& prior, const ExtractorDefaults& defaults,
                           const LlmClientConfig& llm);

std::string render_transcript(const Transcript& transcript);

}  // namespace qplan
