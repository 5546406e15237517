#pragma once

// Minimal client for an HTTP chat-completion endpoint
// (request {model, messages:[{role, content}]}, reply choices[0].message.content).

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qplan/domain.hpp"

namespace qplan {

struct LlmClientConfig {
  // Full URL of the chat-completion endpoint; empty disables the client.
  std::string endpoint_url;
  std::string model_name;
  int timeout_ms = 30000;
  int max_retries = 2;
  // First retry delay; doubles on every further attempt.
  int backoff_base_ms = 500;

  bool enabled() const { return !endpoint_url.empty(); }
};

void validate(const LlmClientConfig& config);

// LLM_ENDPOINT and LLM_MODEL override the configured values when set.
LlmClientConfig apply_llm_env(LlmClientConfig config);

void to_json(json& j, const LlmClientConfig& c);
void from_json(const json& j, LlmClientConfig& c);

class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Client disabled or its configuration is unusable.
class LlmConfigError : public LlmError {
 public:
  using LlmError::LlmError;
};

// Retries exhausted on connection failures or non-success statuses.
class LlmTransportError : public LlmError {
 public:
  using LlmError::LlmError;
};

// The endpoint answered 2xx but the body is not a chat completion.
class LlmProtocolError : public LlmError {
 public:
  using LlmError::LlmError;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

// One chat-completion round trip with retry and exponential backoff.
// Safe to call concurrently.
std::string llm_complete(const LlmClientConfig& config, std::string_view system_prompt,
                         std::span<const ChatMessage> messages);

}  // namespace qplan
