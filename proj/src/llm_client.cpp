#include "qplan/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"

namespace qplan {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw LlmConfigError("endpoint_url must include a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http") throw LlmConfigError("unsupported endpoint scheme '" + scheme + "' (only http)");
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (out.origin.size() <= scheme_end + 3) throw LlmConfigError("endpoint_url has no host: " + url);
  return out;
}

}  // namespace

void validate(const LlmClientConfig& config) {
  if (config.timeout_ms <= 0) throw ValidationError("timeout_ms", "must be > 0");
  if (config.max_retries < 0) throw ValidationError("max_retries", "must be >= 0");
  if (config.backoff_base_ms < 0) throw ValidationError("backoff_base_ms", "must be >= 0");
}

LlmClientConfig apply_llm_env(LlmClientConfig config) {
  if (const char* endpoint = std::getenv("LLM_ENDPOINT")) config.endpoint_url = endpoint;
  if (const char* model = std::getenv("LLM_MODEL")) config.model_name = model;
  return config;
}

void to_json(json& j, const LlmClientConfig& c) {
  j = json{{"endpoint_url", c.endpoint_url},
           {"model_name", c.model_name},
           {"timeout_ms", c.timeout_ms},
           {"max_retries", c.max_retries},
           {"backoff_base_ms", c.backoff_base_ms}};
}

void from_json(const json& j, LlmClientConfig& c) {
  c = LlmClientConfig{};
  if (j.contains("endpoint_url")) c.endpoint_url = get_field<std::string>(j, "endpoint_url");
  if (j.contains("model_name")) c.model_name = get_field<std::string>(j, "model_name");
  if (j.contains("timeout_ms")) c.timeout_ms = get_field<int>(j, "timeout_ms");
  if (j.contains("max_retries")) c.max_retries = get_field<int>(j, "max_retries");
  if (j.contains("backoff_base_ms")) c.backoff_base_ms = get_field<int>(j, "backoff_base_ms");
  validate(c);
}

std::string llm_complete(const LlmClientConfig& config, std::string_view system_prompt,
                         std::span<const ChatMessage> messages) {
  if (!config.enabled()) throw LlmConfigError("LLM client is disabled (empty endpoint_url)");
  validate(config);
  const ParsedUrl url = parse_url(config.endpoint_url);

  json body{{"model", config.model_name}, {"messages", json::array()}};
  if (!system_prompt.empty()) body["messages"].push_back({{"role", "system"}, {"content", system_prompt}});
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  const std::string payload = body.dump();

  httplib::Client client(url.origin);
  const auto timeout = std::chrono::milliseconds(config.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  std::string last_failure;
  auto delay = std::chrono::milliseconds(config.backoff_base_ms);
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    auto res = client.Post(url.path, payload, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_failure = "HTTP status " + std::to_string(res->status);
      continue;
    }
    try {
      const json reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw LlmProtocolError(std::string("malformed chat-completion response: ") + e.what());
    }
  }
  throw LlmTransportError("chat completion failed after " + std::to_string(config.max_retries + 1) +
                          " attempt(s): " + last_failure);
}

}  // namespace qplan
