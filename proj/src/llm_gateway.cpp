#include "agora/llm_gateway.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <thread>

#include "agora/errors.hpp"
#include "agora/rng.hpp"
#include "httplib.h"

namespace agora {

const char* to_string(MsgRole r) {
  switch (r) {
    case MsgRole::System: return "system";
    case MsgRole::User: return "user";
    case MsgRole::Assistant: return "assistant";
  }
  return "system";
}

void check_request(const ChatRequest& request) {
  if (request.messages.empty()) {
    throw Error(Errc::InvalidRequest, "messages list is empty");
  }
  if (request.messages.front().role != MsgRole::System) {
    throw Error(Errc::InvalidRequest, "first message must have role System");
  }
  if (request.max_tokens <= 0) {
    throw Error(Errc::InvalidRequest, "max_tokens must be positive");
  }
  if (request.temperature < 0.0) {
    throw Error(Errc::InvalidRequest, "temperature must be non-negative");
  }
}

nlohmann::json wire_payload(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  nlohmann::json body{
      {"model", request.model_ref},
      {"messages", messages},
      {"max_tokens", request.max_tokens},
      {"temperature", request.temperature},
  };
  if (request.sampling_seed) body["seed"] = *request.sampling_seed;
  return body;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int approx_tokens(const std::string& s) { return static_cast<int>(s.size() / 4) + 1; }

const std::array<const char*, 48> kVocab = {
    "honestly",  "the",      "policy",   "argument",  "people",   "never",
    "always",    "wrong",    "right",    "evidence",  "source",   "claim",
    "community", "moderate", "extreme",  "point",     "agree",    "disagree",
    "because",   "history",  "shows",    "nobody",    "everyone", "thinks",
    "actually",  "really",   "matters",  "problem",   "solution", "simple",
    "complex",   "facts",    "feelings", "debate",    "listen",   "read",
    "again",     "before",   "posting",  "thread",    "topic",    "online",
    "platform",  "rules",    "respect",  "ignore",    "obvious",  "nonsense"};

// Last "@name" mentioned in the rendered context, if any.
std::string last_mentioned_author(const ChatRequest& request) {
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role != MsgRole::User) continue;
    const std::string& body = it->content;
    auto pos = body.rfind("\n@");
    if (pos == std::string::npos && !body.empty() && body[0] == '@') pos = 0;
    else if (pos != std::string::npos) pos += 1;
    if (pos == std::string::npos) return {};
    auto end = body.find_first_of(": \n", pos + 1);
    if (end == std::string::npos) return {};
    return body.substr(pos, end - pos);
  }
  return {};
}

// Final rendered comment line of the context (the annotation target).
std::string last_context_line(const ChatRequest& request) {
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role != MsgRole::User) continue;
    std::string body = it->content;
    while (!body.empty() && body.back() == '\n') body.pop_back();
    auto pos = body.rfind('\n');
    return pos == std::string::npos ? body : body.substr(pos + 1);
  }
  return {};
}

}  // namespace

std::unique_ptr<MockBackend> MockBackend::with_script(std::vector<std::string> script) {
  auto backend = std::make_unique<MockBackend>();
  backend->script_.assign(script.begin(), script.end());
  return backend;
}

ChatResponse MockBackend::complete(const ChatRequest& request) {
  check_request(request);
  {
    std::lock_guard lock(mutex_);
    ++calls_;
    if (!script_.empty()) {
      std::string text = std::move(script_.front());
      script_.pop_front();
      ChatResponse r;
      r.text = std::move(text);
      r.model_ref = request.model_ref;
      r.prompt_tokens = approx_tokens(request.messages.back().content);
      r.completion_tokens = approx_tokens(r.text);
      return r;
    }
  }
  ChatResponse r;
  r.text = generate(request);
  r.model_ref = request.model_ref;
  int prompt = 0;
  for (const auto& m : request.messages) prompt += approx_tokens(m.content);
  r.prompt_tokens = prompt;
  r.completion_tokens = approx_tokens(r.text);
  return r;
}

std::string MockBackend::generate(const ChatRequest& request) const {
  const std::uint64_t seed = request.sampling_seed.value_or(0);
  const std::uint64_t key =
      splitmix64(fnv1a(request.meta.actor_id) ^
                 splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(
                                                                request.meta.turn_index + 1))));
  std::mt19937_64 rng(key);

  switch (request.meta.kind) {
    case RequestMeta::Kind::FacilitatorTurn: {
      bool speak = true;
      switch (policy_.facilitator_mode) {
        case MockPolicy::FacilitatorMode::Always: speak = true; break;
        case MockPolicy::FacilitatorMode::Never: speak = false; break;
        case MockPolicy::FacilitatorMode::Alternate:
          speak = (request.meta.turn_index % 2) == 1;
          break;
        case MockPolicy::FacilitatorMode::Hashed:
          speak = uniform_real01(rng) < policy_.facilitator_speak_prob;
          break;
      }
      if (!speak) return "";
      std::string target = last_mentioned_author(request);
      std::string text = target.empty() ? "Please keep things civil, everyone."
                                        : target + " please keep the discussion civil.";
      return text;
    }
    case RequestMeta::Kind::Annotation: {
      if (uniform_real01(rng) < policy_.annotator_refusal_prob) {
        return "I cannot annotate this.";
      }
      const std::string target = last_context_line(request);
      const bool toxic = !policy_.toxicity_marker.empty() &&
                         target.find(policy_.toxicity_marker) != std::string::npos;
      const int tox = toxic ? 4 + static_cast<int>(uniform_index(rng, 2))
                            : 1 + static_cast<int>(uniform_index(rng, 2));
      const int aq = toxic ? 1 + static_cast<int>(uniform_index(rng, 2))
                           : 3 + static_cast<int>(uniform_index(rng, 3));
      return "Toxicity=" + std::to_string(tox) + "\nArgumentQuality=" + std::to_string(aq);
    }
    case RequestMeta::Kind::UserTurn:
    case RequestMeta::Kind::Probe: {
      double marker_prob = policy_.neutral_marker_prob;
      if (request.meta.role_hint == RoleKind::Troll) marker_prob = policy_.troll_marker_prob;
      if (request.meta.role_hint == RoleKind::CommunityVeteran)
        marker_prob = policy_.veteran_marker_prob;

      std::string text;
      const std::string mention = last_mentioned_author(request);
      if (!mention.empty() && uniform_real01(rng) < 0.5) text = mention + " ";
      const std::size_t words = 8 + uniform_index(rng, 12);
      for (std::size_t i = 0; i < words; ++i) {
        if (i) text += ' ';
        text += kVocab[uniform_index(rng, kVocab.size())];
      }
      if (uniform_real01(rng) < marker_prob) {
        text += ' ';
        text += policy_.toxicity_marker;
      }
      text += '.';
      return text;
    }
  }
  return {};
}

HttpBackend::HttpBackend(HttpBackendConfig config, AuditSink* audit)
    : config_(std::move(config)), audit_(audit) {
  if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
  check_request(request);
  const nlohmann::json body = wire_payload(request);
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const auto started = std::chrono::steady_clock::now();
  std::string last_failure;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.request_timeout.count(), 0);
    client.set_read_timeout(config_.request_timeout.count(), 0);

    auto res = client.Post("/v1/chat/completions", headers, payload, "application/json");
    if (!res) {
      last_failure = "connection failed: " + httplib::to_string(res.error());
    } else if (res->status >= 500 || res->status == 429) {
      last_failure = "HTTP " + std::to_string(res->status);
    } else if (res->status == 413 ||
               (res->status == 400 && res->body.find("context") != std::string::npos)) {
      throw Error(Errc::ContextTooLong, "backend rejected prompt size: " + res->body);
    } else if (res->status >= 400) {
      throw Error(Errc::MalformedResponse,
                  "backend rejected request: HTTP " + std::to_string(res->status));
    } else {
      ChatResponse out;
      try {
        const auto parsed = nlohmann::json::parse(res->body);
        out.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        if (parsed.contains("usage")) {
          out.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
          out.completion_tokens = parsed["usage"].value("completion_tokens", 0);
        }
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::MalformedResponse, std::string("bad completion payload: ") + e.what());
      }
      out.model_ref = request.model_ref;
      out.attempts = attempt;
      out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started);
      if (audit_) audit_->record(request, out);
      return out;
    }
    if (attempt < config_.max_attempts) {
      std::this_thread::sleep_for(config_.backoff_base * (1LL << (attempt - 1)));
    }
  }
  throw Error(Errc::BackendUnreachable, "retries exhausted after " +
                                            std::to_string(config_.max_attempts) +
                                            " attempts; last failure: " + last_failure);
}

}  // namespace agora
