#include <gtest/gtest.h>

#include <fstream>

#include "generators.hpp"
#include "mock_llm.hpp"
#include "qplan/extraction.hpp"
#include "qplan/hardware_catalog.hpp"
#include "qplan/interview.hpp"
#include "qplan/llm_client.hpp"
#include "qplan/profiler.hpp"

namespace qplan {
namespace {

FactorValues fv(double a, double e, double l) {
  FactorValues v;
  v[Factor::kAccuracy] = a;
  v[Factor::kEnergy] = e;
  v[Factor::kLatency] = l;
  return v;
}

Transcript run_script(Scenario scenario, const std::vector<std::string>& replies) {
  InterviewSession s("client-0001", scenario);
  s.next();
  for (const auto& r : replies) s.next(r);
  return s.transcript();
}

const std::vector<std::string> kBedroomReplies{
    "It's in my bedroom, on the nightstand.", "Mostly at night, before I sleep.", "Just a few times a week.",
    "Mostly music and a few reminders.", "Accuracy first, then battery, speed last."};

// ---------------------------------------------------------------------------
// Interview

TEST(Interview, InitializationOpensWithLocation) {
  InterviewSession s("c", Scenario::kInitialization);
  EXPECT_EQ(s.state(), "not_started");
  const auto first = s.next();
  EXPECT_FALSE(first.done);
  EXPECT_NE(first.agent_message.find("Where will the device live"), std::string::npos);
  EXPECT_EQ(s.state(), "ask_device_location");
}

TEST(Interview, ScriptsAreTotalAndRolesAlternate) {
  for (auto scenario : all_values<Scenario>()) {
    InterviewSession s("c", scenario);
    auto step = s.next();
    std::size_t replies = 0;
    while (!step.done) {
      step = s.next("whatever " + std::to_string(replies));
      ++replies;
    }
    EXPECT_EQ(replies, interview_script(scenario).size());
    EXPECT_EQ(step.agent_message, closing_message(scenario));
    EXPECT_EQ(s.state(), "done");
    const auto& t = s.transcript();
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t[i].role, i % 2 == 0 ? Role::kAgent : Role::kUser);
    EXPECT_THROW(s.next("more"), SessionFinishedError);
  }
}

TEST(Interview, PreAggregationFinishesAfterFourAnswers) {
  InterviewSession s("c", Scenario::kPreAggregation);
  s.next();
  for (int i = 0; i < 3; ++i) EXPECT_FALSE(s.next("fine").done);
  EXPECT_TRUE(s.next("no change").done);
}

TEST(Interview, ReplyRules) {
  InterviewSession s("c", Scenario::kInitialization);
  EXPECT_THROW(s.next("too early"), ValidationError);
  s.next();
  EXPECT_THROW(s.next(), ValidationError);
}

TEST(Interview, HardwareChangeConfirmsSpecAndReasksContext) {
  const auto script = interview_script(Scenario::kHardwareChange);
  EXPECT_EQ(script.front().slot, Slot::kConfirmHardware);
  std::vector<Slot> slots;
  for (const auto& q : script) slots.push_back(q.slot);
  EXPECT_NE(std::find(slots.begin(), slots.end(), Slot::kLocation), slots.end());
  EXPECT_NE(std::find(slots.begin(), slots.end(), Slot::kUsageTime), slots.end());
}

TEST(Interview, GoldenTranscriptReplaysByteIdentical) {
  const json golden = json::parse(std::ifstream(QPLAN_SOURCE_DIR "/tests/fixtures/golden_initialization.json"));
  const Transcript expected = golden.at("transcript").get<Transcript>();
  std::vector<std::string> replies;
  for (const auto& t : expected) {
    if (t.role == Role::kUser) replies.push_back(t.text);
  }
  const Transcript replayed = run_script(Scenario::kInitialization, replies);
  EXPECT_EQ(json(replayed).dump(), json(expected).dump());
}

// ---------------------------------------------------------------------------
// Rule-based extraction

TEST(Extraction, KeywordHits) {
  const auto e = extract_factors_rules(run_script(Scenario::kInitialization, kBedroomReplies),
                                       Scenario::kInitialization);
  EXPECT_EQ(e.context.device_location, Location::kBedroom);
  EXPECT_EQ(e.context.interaction_time, InteractionTime::kNighttime);
  EXPECT_EQ(e.context.interaction_frequency, Frequency::kLow);
  EXPECT_EQ(e.source, "rules");
}

TEST(Extraction, RankingReplyGivesRankHints) {
  const auto r = match_ranking("accuracy first, then battery, speed last");
  ASSERT_TRUE(r);
  EXPECT_EQ(hints_from_ranking(*r), fv(0.5, 0.3, 0.2));
  const auto r2 = match_ranking("Response speed matters most, then accuracy. Battery least.");
  ASSERT_TRUE(r2);
  EXPECT_EQ(hints_from_ranking(*r2), fv(0.3, 0.2, 0.5));
  // Unmentioned factors go between the named ones and the explicit last.
  const auto r3 = match_ranking("battery first, accuracy last");
  ASSERT_TRUE(r3);
  EXPECT_EQ((*r3)[0], Factor::kEnergy);
  EXPECT_EQ((*r3)[1], Factor::kLatency);
  EXPECT_EQ((*r3)[2], Factor::kAccuracy);
  EXPECT_FALSE(match_ranking("no idea"));
}

TEST(Extraction, FrequencyAndTimeTables) {
  EXPECT_EQ(match_frequency("pretty much all day"), Frequency::kHigh);
  EXPECT_EQ(match_frequency("constantly"), Frequency::kHigh);
  EXPECT_EQ(match_frequency("a few times a week"), Frequency::kLow);
  EXPECT_EQ(match_frequency("daily"), Frequency::kMedium);
  EXPECT_EQ(match_interaction_time("both day and night"), InteractionTime::kMixed);
  EXPECT_EQ(match_interaction_time("in the evening"), InteractionTime::kNighttime);
  EXPECT_EQ(match_interaction_time("mornings"), InteractionTime::kDaytime);
  EXPECT_EQ(match_location("living room, next to the TV"), Location::kLivingRoom);
  EXPECT_EQ(match_location("in the garage"), Location::kOther);
  EXPECT_FALSE(match_location("not sure"));
}

TEST(Extraction, TaskMix) {
  const auto mix = match_task_mix("music 60%, smart home 20%, reminders 20%");
  ASSERT_TRUE(mix);
  EXPECT_NEAR((*mix)[TaskCategory::kEntertainment], 0.6, 1e-12);
  EXPECT_NEAR((*mix)[TaskCategory::kSmartHome], 0.2, 1e-12);
  EXPECT_NEAR((*mix)[TaskCategory::kGeneralQuery], 0.0, 1e-12);
  EXPECT_NEAR((*mix)[TaskCategory::kPersonalRequest], 0.2, 1e-12);
  const auto eq = match_task_mix("mostly music and the weather");
  ASSERT_TRUE(eq);
  EXPECT_DOUBLE_EQ((*eq)[TaskCategory::kEntertainment], 0.5);
  EXPECT_DOUBLE_EQ((*eq)[TaskCategory::kGeneralQuery], 0.5);
  EXPECT_FALSE(match_task_mix("hmm"));
}

TEST(Extraction, Ratings) {
  EXPECT_DOUBLE_EQ(*match_rating("0.8"), 0.8);
  EXPECT_DOUBLE_EQ(*match_rating("8/10"), 0.8);
  EXPECT_DOUBLE_EQ(*match_rating("about 80%"), 0.8);
  EXPECT_DOUBLE_EQ(*match_rating("very satisfied"), 1.0);
  EXPECT_DOUBLE_EQ(*match_rating("not bad"), 0.75);
  EXPECT_DOUBLE_EQ(*match_rating("pretty unsatisfied"), 0.25);
  EXPECT_DOUBLE_EQ(*match_rating("it's okay"), 0.5);
  EXPECT_DOUBLE_EQ(*match_rating("terrible"), 0.0);
  EXPECT_FALSE(match_rating("dunno"));
}

TEST(Extraction, VagueRepliesUseDefaults) {
  const std::vector<std::string> vague(5, "Not sure, to be honest.");
  ExtractorDefaults d;
  d.location = Location::kOffice;
  const auto e = extract_factors_rules(run_script(Scenario::kInitialization, vague), Scenario::kInitialization,
                                       std::nullopt, d);
  EXPECT_EQ(e.context.device_location, Location::kOffice);
  EXPECT_EQ(e.context.interaction_time, d.time);
  EXPECT_EQ(e.context.task_type_mix, d.tasks);
  EXPECT_FALSE(e.weight_hints);
}

TEST(Extraction, MissingSlotsAreListed) {
  InterviewSession s("c", Scenario::kInitialization);
  s.next();
  s.next("bedroom");
  s.next("night");
  try {
    extract_factors_rules(s.transcript(), Scenario::kInitialization);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "transcript");
    const std::string msg = e.what();
    EXPECT_NE(msg.find("interaction_frequency"), std::string::npos);
    EXPECT_NE(msg.find("task_types"), std::string::npos);
    EXPECT_NE(msg.find("priority_ranking"), std::string::npos);
  }
}

TEST(Extraction, PreAggregationRatingsAndContextChange) {
  ContextualFactors prior;
  prior.device_location = Location::kBedroom;
  prior.interaction_time = InteractionTime::kNighttime;
  const auto t = run_script(Scenario::kPreAggregation,
                            {"8/10", "a bit slow, unsatisfied", "not sure", "I moved it to the kitchen."});
  const auto e = extract_factors_rules(t, Scenario::kPreAggregation, prior);
  ASSERT_TRUE(e.ratings);
  EXPECT_DOUBLE_EQ((*e.ratings)[Factor::kAccuracy], 0.8);
  EXPECT_DOUBLE_EQ((*e.ratings)[Factor::kLatency], 0.25);
  EXPECT_DOUBLE_EQ((*e.ratings)[Factor::kEnergy], 0.5);
  EXPECT_EQ(e.context.device_location, Location::kKitchen);
  EXPECT_EQ(e.context.interaction_time, InteractionTime::kNighttime);

  const auto same = extract_factors_rules(
      run_script(Scenario::kPreAggregation, {"good", "good", "good", "No, nothing changed."}),
      Scenario::kPreAggregation, prior);
  EXPECT_EQ(same.context, prior);
}

TEST(Extraction, DeterministicWhenRunTwice) {
  const auto t = run_script(Scenario::kInitialization, kBedroomReplies);
  const auto a = extract_factors(t, Scenario::kInitialization, std::nullopt, {}, LlmClientConfig{});
  const auto b = extract_factors(t, Scenario::kInitialization, std::nullopt, {}, LlmClientConfig{});
  EXPECT_EQ(a.context, b.context);
  EXPECT_EQ(a.weight_hints, b.weight_hints);
}

// Round trip over a generated corpus: replies written from a known context
// through the keyword tables are extracted back to that context.
TEST(Extraction, GeneratedCorpusRoundTrip) {
  const std::array<std::string, 5> loc{"bedroom", "living room", "kitchen", "office", "hallway"};
  const std::array<std::string, 3> time{"during the day", "at night", "a mix of both"};
  const std::array<std::string, 3> freq{"a few times a week", "every day", "all the time"};
  const std::array<std::string, 3> factor{"accuracy", "battery", "speed"};
  testgen::Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    const auto ctx = testgen::context(rng);
    const auto w = testgen::weights(rng);
    std::array<Factor, 3> order = kAllFactors;
    std::stable_sort(order.begin(), order.end(), [&](Factor a, Factor b) { return w[a] > w[b]; });
    char mix[256];
    std::snprintf(mix, sizeof mix, "music %.17g, smart home %.17g, questions %.17g, reminders %.17g",
                  ctx.task_type_mix[TaskCategory::kEntertainment], ctx.task_type_mix[TaskCategory::kSmartHome],
                  ctx.task_type_mix[TaskCategory::kGeneralQuery], ctx.task_type_mix[TaskCategory::kPersonalRequest]);
    const std::vector<std::string> replies{
        "in the " + loc[index_of(ctx.device_location)], time[index_of(ctx.interaction_time)],
        freq[index_of(ctx.interaction_frequency)], mix,
        factor[index_of(order[0])] + " first, then " + factor[index_of(order[1])] + ", " +
            factor[index_of(order[2])] + " last"};
    const auto e = extract_factors_rules(run_script(Scenario::kInitialization, replies), Scenario::kInitialization);
    EXPECT_EQ(e.context.device_location, ctx.device_location);
    EXPECT_EQ(e.context.interaction_time, ctx.interaction_time);
    EXPECT_EQ(e.context.interaction_frequency, ctx.interaction_frequency);
    for (auto t : kAllTasks) EXPECT_NEAR(e.context.task_type_mix[t], ctx.task_type_mix[t], 1e-12);
    ASSERT_TRUE(e.weight_hints);
    for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ((*e.weight_hints)[order[r]], kRankHints[r]);
  }
}

// ---------------------------------------------------------------------------
// Context inference rules

TEST(InferFactors, ExhaustiveRuleTable) {
  int combos = 0;
  for (auto l : all_values<Location>()) {
    for (auto t : all_values<InteractionTime>()) {
      for (auto f : all_values<Frequency>()) {
        ContextualFactors c{l, t, f, default_task_distribution()};
        const auto inf = infer_factors(c);
        const bool noisy =
            l == Location::kLivingRoom || l == Location::kKitchen || t == InteractionTime::kDaytime;
        const bool lots = f == Frequency::kHigh || t == InteractionTime::kDaytime;
        EXPECT_EQ(inf.noise_level, noisy ? NoiseLevel::kHigh : NoiseLevel::kLow);
        EXPECT_EQ(inf.data_quantity, lots ? DataQuantity::kHigh : DataQuantity::kLow);
        EXPECT_EQ(inf.data_distribution, c.task_type_mix);
        ++combos;
      }
    }
  }
  EXPECT_EQ(combos, 45);
}

TEST(InferFactors, TableRows) {
  const auto a = infer_factors({Location::kBedroom, InteractionTime::kNighttime, Frequency::kLow, {}});
  EXPECT_EQ(a.noise_level, NoiseLevel::kLow);
  EXPECT_EQ(a.data_quantity, DataQuantity::kLow);
  const auto b = infer_factors({Location::kLivingRoom, InteractionTime::kDaytime, Frequency::kHigh, {}});
  EXPECT_EQ(b.noise_level, NoiseLevel::kHigh);
  EXPECT_EQ(b.data_quantity, DataQuantity::kHigh);
  const auto c = infer_factors({Location::kOffice, InteractionTime::kMixed, Frequency::kMedium, {}});
  EXPECT_EQ(c.noise_level, NoiseLevel::kLow);
  EXPECT_EQ(c.data_quantity, DataQuantity::kLow);
}

// ---------------------------------------------------------------------------
// build_profile

struct Stores {
  Stores() {
    for (const auto& r : default_hardware_catalog()) hwperf.insert(r);
  }
  CaseStore cases;
  HwPerfStore hwperf;
};

TEST(BuildProfile, NoPriorUsesHints) {
  Stores s;
  const auto hw = default_hardware_catalog()[2].hardware;
  const auto built = build_profile("c1", hw, ContextualFactors{}, fv(0.5, 0.3, 0.2), s.cases, s.hwperf);
  EXPECT_EQ(built.profile.estimated_weights, validate_weights(fv(0.5, 0.3, 0.2)));
  EXPECT_TRUE(built.neighbours.empty());
  EXPECT_EQ(built.performance, default_hardware_catalog()[2].table);
}

TEST(BuildProfile, BlendsHintsWithRetrievedCase) {
  Stores s;
  ContextualFactors ctx{Location::kKitchen, InteractionTime::kDaytime, Frequency::kHigh, default_task_distribution()};
  CaseRecord r;
  r.context = ctx;
  r.inferred_weights = validate_weights(fv(0.2, 0.5, 0.3));
  s.cases.insert(r);
  const auto hw = default_hardware_catalog()[1].hardware;
  const auto built = build_profile("c1", hw, ctx, fv(0.4, 0.4, 0.2), s.cases, s.hwperf);
  // Oracle: blend by hand then divide by the sum.
  const double raw[3] = {0.5 * 0.4 + 0.5 * 0.2, 0.5 * 0.4 + 0.5 * 0.5, 0.5 * 0.2 + 0.5 * 0.3};
  const double sum = raw[0] + raw[1] + raw[2];
  EXPECT_NEAR(built.profile.estimated_weights[Factor::kAccuracy], raw[0] / sum, 1e-12);
  EXPECT_NEAR(built.profile.estimated_weights[Factor::kEnergy], raw[1] / sum, 1e-12);
  EXPECT_NEAR(built.profile.estimated_weights[Factor::kLatency], raw[2] / sum, 1e-12);
  ASSERT_EQ(built.neighbours.size(), 1u);
  EXPECT_EQ(built.neighbours[0].similarity, 1.0);
}

TEST(BuildProfile, NeitherHintsNorCasesGivesUniform) {
  Stores s;
  const auto built =
      build_profile("c1", default_hardware_catalog()[0].hardware, ContextualFactors{}, std::nullopt, s.cases, s.hwperf);
  EXPECT_EQ(built.profile.estimated_weights, SensitivityWeights{});
}

TEST(BuildProfile, FedAvgContributionIsOne) {
  Stores s;
  const auto hw = default_hardware_catalog()[3].hardware;
  const auto built = build_profile("c1", hw, ContextualFactors{}, std::nullopt, s.cases, s.hwperf);
  ASSERT_EQ(built.profile.contribution_estimate.size(), hw.available_levels.size());
  for (const auto& [q, c] : built.profile.contribution_estimate) EXPECT_EQ(c, 1.0);
}

TEST(BuildProfile, MissingPerformanceFails) {
  CaseStore cases;
  HwPerfStore empty;
  EXPECT_THROW(build_profile("c1", default_hardware_catalog()[0].hardware, ContextualFactors{}, std::nullopt, cases,
                             empty),
               NotFoundError);
}

TEST(BuildProfile, RandomInputsSatisfyProfileInvariants) {
  Stores s;
  testgen::Rng rng(21);
  for (int i = 0; i < 30; ++i) s.cases.insert(testgen::case_record(rng));
  for (int i = 0; i < 200; ++i) {
    ProfilingOptions o;
    o.strategy = testgen::any<Strategy>(rng);
    o.k = std::uniform_int_distribution<int>(1, 10)(rng);
    o.hint_blend = testgen::uniform(rng);
    std::optional<FactorValues> hints;
    if (i % 3) hints = testgen::weights(rng).values();
    const auto built =
        build_profile("c" + std::to_string(i), testgen::hardware(rng), testgen::context(rng), hints, s.cases, s.hwperf, o);
    EXPECT_NO_THROW(validate(built.profile));
    double sum = 0.0;
    for (auto f : kAllFactors) sum += built.profile.estimated_weights[f];
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

// ---------------------------------------------------------------------------
// LLM client

LlmClientConfig fast_config(const std::string& url, int retries = 2) {
  LlmClientConfig c;
  c.endpoint_url = url;
  c.model_name = "test-model";
  c.timeout_ms = 2000;
  c.max_retries = retries;
  c.backoff_base_ms = 1;
  return c;
}

TEST(LlmClient, StubRoundTrip) {
  json seen;
  MockLlm mock([&](int, const json& req, httplib::Response& res) {
    seen = req;
    res.set_content(MockLlm::completion(R"({"ok": true})"), "application/json");
  });
  const ChatMessage m{"user", "hello"};
  EXPECT_EQ(llm_complete(fast_config(mock.url()), "sys", {&m, 1}), R"({"ok": true})");
  EXPECT_EQ(seen["model"], "test-model");
  EXPECT_EQ(seen["messages"][0]["role"], "system");
  EXPECT_EQ(seen["messages"][1]["content"], "hello");
}

TEST(LlmClient, RetriesServerErrors) {
  MockLlm mock([](int n, const json&, httplib::Response& res) {
    if (n < 2) {
      res.status = 500;
      return;
    }
    res.set_content(MockLlm::completion("fine"), "application/json");
  });
  EXPECT_EQ(llm_complete(fast_config(mock.url(), 2), "", {}), "fine");
  EXPECT_EQ(mock.calls(), 3);
}

TEST(LlmClient, ExhaustedRetriesIsTransportError) {
  MockLlm mock([](int, const json&, httplib::Response& res) { res.status = 503; });
  EXPECT_THROW(llm_complete(fast_config(mock.url(), 1), "", {}), LlmTransportError);
  EXPECT_EQ(mock.calls(), 2);
}

TEST(LlmClient, MalformedBodyIsProtocolError) {
  MockLlm mock([](int, const json&, httplib::Response& res) { res.set_content("{\"nope\": 1}", "application/json"); });
  EXPECT_THROW(llm_complete(fast_config(mock.url()), "", {}), LlmProtocolError);
}

TEST(LlmClient, DisabledIsConfigError) {
  EXPECT_THROW(llm_complete(LlmClientConfig{}, "", {}), LlmConfigError);
  EXPECT_THROW(llm_complete(fast_config("https://example.invalid/x"), "", {}), LlmConfigError);
}

TEST(LlmClient, ConnectionRefusedIsTransportError) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  EXPECT_THROW(llm_complete(fast_config("http://127.0.0.1:" + std::to_string(port) + "/v1", 0), "", {}),
               LlmTransportError);
}

TEST(LlmClient, ConfigValidationAndJson) {
  LlmClientConfig c;
  c.timeout_ms = 0;
  EXPECT_THROW(validate(c), ValidationError);
  const auto back = json(fast_config("http://x/y")).get<LlmClientConfig>();
  EXPECT_EQ(back.endpoint_url, "http://x/y");
  EXPECT_EQ(back.backoff_base_ms, 1);
}

const char* kModelReply =
    R"(Here you go: {"context": {"device_location": "office", "interaction_time": "daytime",
    "interaction_frequency": "high", "task_type_mix": {"entertainment": 1, "smart_home": 1,
    "general_query": 2, "personal_request": 0}}, "weight_hints": {"accuracy": 0.2, "energy": 0.2, "latency": 0.6}})";

TEST(LlmExtraction, ValidReplyIsUsed) {
  MockLlm mock([](int, const json& req, httplib::Response& res) {
    EXPECT_EQ(req["messages"][0]["content"], std::string(extraction_prompt()));
    res.set_content(MockLlm::completion(kModelReply), "application/json");
  });
  const auto t = run_script(Scenario::kInitialization, kBedroomReplies);
  const auto e = extract_factors(t, Scenario::kInitialization, std::nullopt, {}, fast_config(mock.url()));
  EXPECT_EQ(e.source, "llm");
  EXPECT_EQ(e.context.device_location, Location::kOffice);
  EXPECT_DOUBLE_EQ(e.context.task_type_mix[TaskCategory::kGeneralQuery], 0.5);
  EXPECT_EQ(*e.weight_hints, fv(0.2, 0.2, 0.6));
}

TEST(LlmExtraction, InvalidRepliesRetryThenFallBack) {
  MockLlm mock([](int, const json&, httplib::Response& res) {
    res.set_content(MockLlm::completion(R"({"context": {"device_location": "moon"}})"), "application/json");
  });
  const auto t = run_script(Scenario::kInitialization, kBedroomReplies);
  const auto e = extract_factors(t, Scenario::kInitialization, std::nullopt, {}, fast_config(mock.url(), 2));
  EXPECT_EQ(e.source, "rules");
  EXPECT_EQ(e.context.device_location, Location::kBedroom);
  EXPECT_EQ(mock.calls(), 3);
}

TEST(LlmExtraction, SecondAttemptCanSucceed) {
  MockLlm mock([](int n, const json&, httplib::Response& res) {
    res.set_content(MockLlm::completion(n == 0 ? "not json at all" : kModelReply), "application/json");
  });
  const auto t = run_script(Scenario::kInitialization, kBedroomReplies);
  const auto e = extract_factors(t, Scenario::kInitialization, std::nullopt, {}, fast_config(mock.url()));
  EXPECT_EQ(e.source, "llm");
  EXPECT_EQ(mock.calls(), 2);
}

TEST(LlmExtraction, TransportFailureFallsBack) {
  MockLlm mock([](int, const json&, httplib::Response& res) { res.status = 500; });
  const auto t = run_script(Scenario::kInitialization, kBedroomReplies);
  const auto e = extract_factors(t, Scenario::kInitialization, std::nullopt, {}, fast_config(mock.url(), 1));
  EXPECT_EQ(e.source, "rules");
  EXPECT_EQ(e.context.interaction_frequency, Frequency::kLow);
}

TEST(LlmExtraction, ParseRejectsBadMix) {
  EXPECT_THROW(parse_llm_extraction("{}"), ValidationError);
  EXPECT_THROW(parse_llm_extraction("nothing here"), ValidationError);
  EXPECT_THROW(parse_llm_extraction(
                   R"({"context": {"device_location": "office", "interaction_time": "daytime",
                   "interaction_frequency": "high", "task_type_mix": {"entertainment": 0, "smart_home": 0,
                   "general_query": 0, "personal_request": 0}}})"),
               ValidationError);
}

}  // namespace
}  // namespace qplan
