#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agora/config.hpp"
#include "agora/domain.hpp"
#include "agora/llm_gateway.hpp"
#include "agora/rng.hpp"
#include "agora/store.hpp"
#include "agora/time_util.hpp"

namespace spdlog {
class logger;
}

namespace agora {

// Mutable per-discussion state. chain_target is the author being replied to,
// i.e. the author of the second-most-recent user comment; it never equals
// last_speaker when both are present.
struct TurnState {
  std::vector<Comment> comments;  // visible transcript so far
  std::optional<std::string> last_speaker;
  std::optional<std::string> chain_target;
  CountingRng rng;
  int user_comments = 0;
  int user_turns_taken = 0;  // includes silent user turns
  int facilitator_opportunities = 0;
  std::uint64_t event_ordinal = 0;

  explicit TurnState(std::uint64_t seed) : rng(seed) {}
};

struct SpeakerChoice {
  std::string actor_id;
  bool chained = false;  // true iff the chain branch selected the reply target
};

// Chain rule: with probability p_chain the author being replied to speaks
// next (when such a target exists); otherwise a uniform draw over the other
// participants, never re-selecting the last speaker. The first user turn is a
// uniform draw over all participants.
SpeakerChoice next_speaker(TurnState& state, const std::vector<std::string>& participants,
                           double p_chain);

// The h most recent visible comments, excluding the seed post.
std::vector<const Comment*> context_window(const std::vector<Comment>& comments, int h);

// Renders the seed opinion plus the window as "@username: text" lines.
std::string render_context(const std::string& seed_opinion,
                           const std::vector<const Comment*>& window);

struct PromptContext {
  std::uint64_t sampling_seed = 0;
  int turn_index = 0;  // user-turn attempt or facilitator opportunity ordinal
  SamplingConfig sampling;
};

ChatRequest build_user_prompt(const ActorSpec& actor, const std::vector<const Comment*>& window,
                              const std::string& seed_opinion, const PromptContext& ctx);

ChatRequest build_facilitator_prompt(const ActorSpec& actor,
                                     const std::vector<const Comment*>& window,
                                     const std::string& seed_opinion, const PromptContext& ctx);

struct RunOptions {
  int context_window_h = 3;
  double chain_probability = 0.4;
  SamplingConfig sampling;
  Clock* clock = nullptr;  // defaults to a SimulatedClock when null
  std::shared_ptr<spdlog::logger> logger;
};

// Runs (or resumes) one discussion to completion, checkpointing every event.
// A completed transcript is returned as-is. On a backend error the transcript
// is persisted as Failed with its cursor intact, then the error propagates.
Transcript run_discussion(const DiscussionPlan& plan, Backend& backend, EventStore& store,
                          const RunOptions& options);

// Whitespace-only output counts as silence.
std::string normalize_output(const std::string& text);

}  // namespace agora
