#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agora/domain.hpp"

namespace agora {

enum class MsgRole { System, User, Assistant };

struct ChatMessage {
  MsgRole role = MsgRole::System;
  std::string content;
};

// Per-request routing metadata. Not part of the wire payload; the mock backend
// keys its deterministic output on it.
struct RequestMeta {
  enum class Kind { UserTurn, FacilitatorTurn, Annotation, Probe };
  std::string actor_id;
  int turn_index = 0;
  Kind kind = Kind::Probe;
  RoleKind role_hint = RoleKind::Neutral;  // meaningful for UserTurn only
};

struct ChatRequest {
  std::string model_ref;
  std::vector<ChatMessage> messages;  // non-empty; first message is System
  std::optional<std::uint64_t> sampling_seed;
  int max_tokens = 512;
  double temperature = 0.7;
  RequestMeta meta;
};

struct ChatResponse {
  std::string text;  // may be empty (facilitator silence)
  std::string model_ref;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  std::chrono::milliseconds latency{0};
  int attempts = 1;  // network attempts actually made
};

const char* to_string(MsgRole r);

// One line per completed call: model, actor, attempts, latency, token usage.
class AuditSink {
 public:
  virtual ~AuditSink() = default;
  virtual void record(const ChatRequest& request, const ChatResponse& response) = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;

  // Returns the backend's completion. Validates the request shape before any
  // network activity; transient failures are retried by HTTP backends.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// Deterministic backend for tests and desk-scale dry runs. Output is a pure
// function of (actor_id, turn_index, sampling_seed) plus the policy below, so
// whole pipelines reproduce byte-identically.
struct MockPolicy {
  enum class FacilitatorMode { Always, Never, Alternate, Hashed };

  FacilitatorMode facilitator_mode = FacilitatorMode::Hashed;
  double facilitator_speak_prob = 0.85;  // used by Hashed
  // Probability that a user comment carries the toxicity marker, by role.
  double troll_marker_prob = 0.8;
  double veteran_marker_prob = 0.05;
  double neutral_marker_prob = 0.15;
  std::string toxicity_marker = "flamebait";
  // Probability that an annotation response is an unparseable refusal.
  double annotator_refusal_prob = 0.0;
};

class MockBackend final : public Backend {
 public:
  MockBackend() = default;
  explicit MockBackend(MockPolicy policy) : policy_(policy) {}

  // FIFO of fixed responses; once exhausted, falls back to keyed generation.
  static std::unique_ptr<MockBackend> with_script(std::vector<std::string> script);

  ChatResponse complete(const ChatRequest& request) override;

  const MockPolicy& policy() const { return policy_; }
  std::uint64_t calls() const { return calls_; }

 private:
  std::string generate(const ChatRequest& request) const;

  MockPolicy policy_;
  std::deque<std::string> script_;
  std::uint64_t calls_ = 0;
  std::mutex mutex_;
};

struct HttpBackendConfig {
  std::string base_url = "http://localhost:8000";
  std::string api_key_env = "LLM_API_KEY";
  int max_attempts = 5;
  std::chrono::milliseconds backoff_base{1000};  // doubled after each failure
  std::chrono::seconds request_timeout{120};
};

// OpenAI-compatible chat-completions client: POST {base_url}/v1/chat/completions.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config, AuditSink* audit = nullptr);

  ChatResponse complete(const ChatRequest& request) override;

 private:
  HttpBackendConfig config_;
  AuditSink* audit_;
  std::string api_key_;
};

// Validates the ChatRequest invariants; throws Error(InvalidRequest).
void check_request(const ChatRequest& request);

// Builds the OpenAI-compatible JSON body (exposed for --dry-run and tests).
nlohmann::json wire_payload(const ChatRequest& request);

}  // namespace agora
