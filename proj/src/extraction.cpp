#include "qplan/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>
#include <set>

namespace qplan {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

using Keywords = std::vector<std::string_view>;

bool contains_any(const std::string& text, const Keywords& needles) {
  return std::any_of(needles.begin(), needles.end(),
                     [&](std::string_view n) { return text.find(n) != std::string::npos; });
}

// Position of the earliest keyword hit, npos when none.
std::size_t first_hit(const std::string& text, const Keywords& needles) {
  std::size_t best = std::string::npos;
  for (auto n : needles) best = std::min(best, text.find(n));
  return best;
}

std::vector<std::string> split_segments(const std::string& text) {
  static const std::regex separators(R"(,|;|\n| and | then |\. )");
  std::vector<std::string> out;
  std::sregex_token_iterator it(text.begin(), text.end(), separators, -1), end;
  for (; it != end; ++it) {
    if (!it->str().empty()) out.push_back(it->str());
  }
  return out;
}

std::vector<double> numbers_in(const std::string& text) {
  static const std::regex number(R"((\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)");
  std::vector<double> out;
  for (std::sregex_iterator it(text.begin(), text.end(), number), end; it != end; ++it) {
    const std::string s = it->str();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{}) out.push_back(v);
  }
  return out;
}

const std::array<Keywords, 4>& task_keywords() {
  static const std::array<Keywords, 4> table{{
      {"entertain", "music", "song", "podcast", "radio", "movie", "game", "joke", "audiobook"},
      {"smart home", "smart-home", "light", "thermostat", "heating", "plug", "home control", "door lock"},
      {"general", "question", "weather", "news", "fact", "search", "trivia"},
      {"personal", "reminder", "calendar", "timer", "alarm", "shopping list", "to-do", "todo"},
  }};
  return table;
}

const Keywords& factor_keywords(Factor f) {
  static const std::array<Keywords, 3> table{{
      {"accura", "correct", "understand", "precis", "mistake"},
      {"battery", "energy", "power", "charg"},
      {"speed", "fast", "quick", "latency", "respon", "delay", "wait"},
  }};
  return table[index_of(f)];
}

}  // namespace

bool is_vague(std::string_view reply) {
  const std::string t = lower(reply);
  return contains_any(t, {"not sure", "don't know", "dont know", "no idea", "dunno", "unsure", "can't say",
                          "hard to say"});
}

std::optional<Location> match_location(std::string_view reply) {
  const std::string t = lower(reply);
  if (is_vague(t)) return std::nullopt;
  if (contains_any(t, {"bedroom", "bed room", "bedside", "nightstand"})) return Location::kBedroom;
  if (contains_any(t, {"living room", "living-room", "lounge", "sofa", "next to the tv"})) return Location::kLivingRoom;
  if (contains_any(t, {"kitchen"})) return Location::kKitchen;
  if (contains_any(t, {"office", "study", "desk", "workspace"})) return Location::kOffice;
  if (contains_any(t, {"hallway", "garage", "garden", "bathroom", "elsewhere", "somewhere else"})) {
    return Location::kOther;
  }
  return std::nullopt;
}

std::optional<InteractionTime> match_interaction_time(std::string_view reply) {
  const std::string t = lower(reply);
  if (is_vague(t)) return std::nullopt;
  if (contains_any(t, {"both", "mix", "all day", "day and night", "any time", "anytime", "whenever",
                       "round the clock"})) {
    return InteractionTime::kMixed;
  }
  if (contains_any(t, {"night", "evening", "bedtime", "late"})) return InteractionTime::kNighttime;
  if (contains_any(t, {"day", "morning", "afternoon", "lunch", "work hours"})) return InteractionTime::kDaytime;
  return std::nullopt;
}

std::optional<Frequency> match_frequency(std::string_view reply) {
  const std::string t = lower(reply);
  if (is_vague(t)) return std::nullopt;
  if (contains_any(t, {"all day", "constantly", "all the time", "many times a day", "very often", "hourly",
                       "non-stop", "nonstop"})) {
    return Frequency::kHigh;
  }
  if (contains_any(t, {"few times a week", "rarely", "occasionally", "once a week", "weekly", "seldom",
                       "now and then", "hardly"})) {
    return Frequency::kLow;
  }
  if (contains_any(t, {"daily", "once a day", "every day", "few times a day", "sometimes", "regularly"})) {
    return Frequency::kMedium;
  }
  return std::nullopt;
}

std::optional<TaskDistribution> match_task_mix(std::string_view reply) {
  const std::string t = lower(reply);
  if (is_vague(t)) return std::nullopt;
  const auto& keywords = task_keywords();

  TaskValues numbered{};
  bool any_number = false;
  std::set<std::size_t> mentioned;
  for (const auto& segment : split_segments(t)) {
    std::vector<std::size_t> cats;
    for (std::size_t c = 0; c < keywords.size(); ++c) {
      if (contains_any(segment, keywords[c])) cats.push_back(c);
    }
    mentioned.insert(cats.begin(), cats.end());
    const auto nums = numbers_in(segment);
    if (cats.size() == 1 && !nums.empty()) {
      numbered.values[cats.front()] += nums.front();
      any_number = true;
    }
  }
  if (mentioned.empty()) return std::nullopt;
  TaskValues raw{};
  if (any_number) {
    raw = numbered;
  } else {
    for (std::size_t c : mentioned) raw.values[c] = 1.0;
  }
  try {
    return validate_distribution(raw);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

std::optional<std::array<Factor, 3>> match_ranking(std::string_view reply) {
  const std::string t = lower(reply);
  if (is_vague(t)) return std::nullopt;

  struct Mention {
    Factor factor;
    std::size_t position;
    bool last;
  };
  std::vector<Mention> mentions;
  const auto segments = split_segments(t);
  for (auto f : kAllFactors) {
    const std::size_t pos = first_hit(t, factor_keywords(f));
    if (pos == std::string::npos) continue;
    bool last = false;
    for (const auto& segment : segments) {
      if (first_hit(segment, factor_keywords(f)) != std::string::npos &&
          contains_any(segment, {"last", "least", "don't care", "doesn't matter"})) {
        last = true;
      }
    }
    mentions.push_back({f, pos, last});
  }
  if (mentions.empty()) return std::nullopt;
  std::stable_sort(mentions.begin(), mentions.end(), [](const Mention& a, const Mention& b) {
    if (a.last != b.last) return !a.last;
    return a.position < b.position;
  });

  std::vector<Factor> head, tail;
  for (const auto& m : mentions) (m.last ? tail : head).push_back(m.factor);
  for (auto f : kAllFactors) {
    if (std::none_of(mentions.begin(), mentions.end(), [&](const Mention& m) { return m.factor == f; })) {
      head.push_back(f);
    }
  }
  head.insert(head.end(), tail.begin(), tail.end());
  return std::array<Factor, 3>{head[0], head[1], head[2]};
}

std::optional<double> match_rating(std::string_view reply) {
  const std::string t = lower(reply);
  if (is_vague(t)) return std::nullopt;

  static const std::regex fraction(R"((\d+(?:\.\d+)?)\s*(/|out of)\s*(\d+(?:\.\d+)?))");
  static const std::regex percent(R"((\d+(?:\.\d+)?)\s*%)");
  static const std::regex plain(R"((^|[^\d.])(0?\.\d+|[01](?:\.0+)?)($|[^\d.]))");
  std::smatch m;
  if (std::regex_search(t, m, fraction)) {
    const double den = std::stod(m[3].str());
    if (den > 0) return std::clamp(std::stod(m[1].str()) / den, 0.0, 1.0);
  }
  if (std::regex_search(t, m, percent)) return std::clamp(std::stod(m[1].str()) / 100.0, 0.0, 1.0);
  if (std::regex_search(t, m, plain)) return std::clamp(std::stod(m[2].str()), 0.0, 1.0);

  if (contains_any(t, {"not bad"})) return 0.75;
  if (contains_any(t, {"very unsatisfied", "very dissatisfied", "terrible", "awful", "useless", "hate"})) return 0.0;
  if (contains_any(t, {"unsatisfied", "dissatisfied", "not satisfied", "unhappy", "poor", "bad",
                       "disappoint"})) {
    return 0.25;
  }
  if (contains_any(t, {"very satisfied", "very happy", "excellent", "perfect", "love", "fantastic"})) return 1.0;
  if (contains_any(t, {"satisfied", "good", "happy", "great", "pleased"})) return 0.75;
  if (contains_any(t, {"okay", "ok", "fine", "alright", "average", "neutral", "so-so"})) return 0.5;
  return std::nullopt;
}

FactorValues hints_from_ranking(const std::array<Factor, 3>& ranking) {
  FactorValues hints{};
  for (std::size_t rank = 0; rank < ranking.size(); ++rank) hints[ranking[rank]] = kRankHints[rank];
  return hints;
}

Extraction extract_factors_rules(const Transcript& transcript, Scenario scenario,
                                 const std::optional<ContextualFactors>& prior,
                                 const ExtractorDefaults& defaults) {
  const auto answers = answered_slots(transcript);
  auto answer = [&](Slot slot) -> const std::string* {
    for (const auto& [s, text] : answers) {
      if (s == slot) return &text;
    }
    return nullptr;
  };

  std::vector<Slot> required;
  for (const auto& q : interview_script(scenario)) required.push_back(q.slot);
  if (scenario == Scenario::kPreAggregation && !prior) {
    for (Slot s : {Slot::kLocation, Slot::kUsageTime, Slot::kFrequency, Slot::kTaskTypes}) required.push_back(s);
  }
  std::string missing;
  for (Slot s : required) {
    if (answer(s) == nullptr) missing += (missing.empty() ? "" : ", ") + std::string(label(s));
  }
  if (!missing.empty()) throw ValidationError("transcript", "missing answers for: " + missing);

  Extraction out;
  out.context = prior.value_or(ContextualFactors{});
  if (const auto* a = answer(Slot::kLocation)) out.context.device_location = match_location(*a).value_or(defaults.location);
  if (const auto* a = answer(Slot::kUsageTime)) {
    out.context.interaction_time = match_interaction_time(*a).value_or(defaults.time);
  }
  if (const auto* a = answer(Slot::kFrequency)) {
    out.context.interaction_frequency = match_frequency(*a).value_or(defaults.frequency);
  }
  if (const auto* a = answer(Slot::kTaskTypes)) out.context.task_type_mix = match_task_mix(*a).value_or(defaults.tasks);
  if (const auto* a = answer(Slot::kPriorityRanking)) {
    if (auto ranking = match_ranking(*a)) out.weight_hints = hints_from_ranking(*ranking);
  }
  if (const auto* a = answer(Slot::kContextChange)) {
    // Only labels the user actually mentions change.
    if (auto v = match_location(*a)) out.context.device_location = *v;
    if (auto v = match_interaction_time(*a)) out.context.interaction_time = *v;
    if (auto v = match_frequency(*a)) out.context.interaction_frequency = *v;
  }
  if (scenario == Scenario::kPreAggregation) {
    FactorValues ratings{};
    ratings[Factor::kAccuracy] = match_rating(*answer(Slot::kRateAccuracy)).value_or(defaults.rating);
    ratings[Factor::kLatency] = match_rating(*answer(Slot::kRateLatency)).value_or(defaults.rating);
    ratings[Factor::kEnergy] = match_rating(*answer(Slot::kRateEnergy)).value_or(defaults.rating);
    out.ratings = ratings;
  }
  validate(out.context);
  return out;
}

std::string_view extraction_prompt() {
  return "You read an interview between a voice-assistant setup agent and a user. Extract the user's usage "
         "context and priorities. Reply with exactly one JSON object and no other text, shaped as:\n"
         "{\"context\": {\"device_location\": \"bedroom|living_room|kitchen|office|other\", "
         "\"interaction_time\": \"daytime|nighttime|mixed\", \"interaction_frequency\": \"low|medium|high\", "
         "\"task_type_mix\": {\"entertainment\": p, \"smart_home\": p, \"general_query\": p, "
         "\"personal_request\": p}}, "
         "\"weight_hints\": {\"accuracy\": w, \"energy\": w, \"latency\": w}}\n"
         "All p are non-negative and sum to 1. All w are non-negative and sum to 1; a larger w means the user "
         "cares more about that factor (energy = battery life, latency = response speed).";
}

Extraction parse_llm_extraction(std::string_view reply) {
  const auto open = reply.find('{');
  const auto close = reply.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw ValidationError("reply", "no JSON object found");
  }
  json j;
  try {
    j = json::parse(reply.substr(open, close - open + 1));
  } catch (const json::exception& e) {
    throw ValidationError("reply", e.what());
  }
  json ctx = get_field<json>(j, "context");
  if (ctx.is_object() && ctx.contains("task_type_mix")) {
    ctx["task_type_mix"] = validate_distribution(get_field<TaskValues>(ctx, "task_type_mix"));
  }
  Extraction out;
  out.source = "llm";
  out.context = ctx.get<ContextualFactors>();
  if (j.contains("weight_hints") && !j["weight_hints"].is_null()) {
    out.weight_hints = validate_weights(get_field<FactorValues>(j, "weight_hints")).values();
  }
  return out;
}

std::string render_transcript(const Transcript& transcript) {
  std::string out;
  for (const auto& turn : transcript) {
    out += label(turn.role);
    out += ": ";
    out += turn.text;
    out += '\n';
  }
  return out;
}

Extraction extract_factors(const Transcript& transcript, Scenario scenario,
                           const std::optional<ContextualFactors>& prior, const ExtractorDefaults& defaults,
                           const LlmClientConfig& llm) {
  // Rules first so that incomplete transcripts are rejected on either path.
  Extraction rules = extract_factors_rules(transcript, scenario, prior, defaults);
  if (!llm.enabled() || scenario == Scenario::kPreAggregation) return rules;

  const ChatMessage message{"user", render_transcript(transcript)};
  LlmClientConfig single_shot = llm;
  single_shot.max_retries = 0;
  for (int attempt = 0; attempt <= llm.max_retries; ++attempt) {
    try {
      // Transport retries are handled inside llm_complete; validation
      // retries here.
      const std::string reply = llm_complete(attempt == 0 ? llm : single_shot, extraction_prompt(), {&message, 1});
      Extraction parsed = parse_llm_extraction(reply);
      if (!parsed.weight_hints) parsed.weight_hints = rules.weight_hints;
      return parsed;
    } catch (const ValidationError&) {
      continue;
    } catch (const LlmError&) {
      break;
    }
  }
  return rules;
}

}  // namespace qplan
