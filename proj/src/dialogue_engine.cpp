#include "agora/dialogue_engine.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "agora/errors.hpp"
#include "agora/prompts.hpp"
#include "spdlog/spdlog.h"

namespace agora {

std::string normalize_output(const std::string& text) {
  const bool all_space = std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
  return all_space ? std::string{} : text;
}

SpeakerChoice next_speaker(TurnState& state, const std::vector<std::string>& participants,
                           double p_chain) {
  if (!state.last_speaker) {
    return {participants[uniform_index(state.rng, participants.size())], false};
  }
  const double u = uniform_real01(state.rng);
  const bool target_available =
      state.chain_target.has_value() && *state.chain_target != *state.last_speaker;
  if (u < p_chain && target_available) {
    return {*state.chain_target, true};
  }
  std::vector<const std::string*> others;
  others.reserve(participants.size());
  for (const auto& p : participants) {
    if (p != *state.last_speaker) others.push_back(&p);
  }
  return {*others[uniform_index(state.rng, others.size())], false};
}

std::vector<const Comment*> context_window(const std::vector<Comment>& comments, int h) {
  std::vector<const Comment*> window;
  for (auto it = comments.rbegin(); it != comments.rend() && window.size() < static_cast<std::size_t>(h);
       ++it) {
    if (it->author_kind == AuthorKind::SeedPost) continue;
    window.push_back(&*it);
  }
  std::reverse(window.begin(), window.end());
  return window;
}

std::string render_context(const std::string& seed_opinion,
                           const std::vector<const Comment*>& window) {
  std::ostringstream out;
  out << "Original post by @" << kSeedAuthorId << ": " << seed_opinion << "\n";
  if (!window.empty()) {
    out << "\nRecent comments:\n";
    for (const Comment* c : window) {
      out << "@" << c->author_id << ": " << c->text << "\n";
    }
  }
  return out.str();
}

namespace {

ChatRequest base_request(const ActorSpec& actor, const std::string& system,
                         const std::vector<const Comment*>& window,
                         const std::string& seed_opinion, const PromptContext& ctx,
                         RequestMeta::Kind kind) {
  ChatRequest request;
  request.model_ref = actor.model_ref;
  request.messages = {{MsgRole::System, system}, {MsgRole::User, render_context(seed_opinion, window)}};
  request.sampling_seed = ctx.sampling_seed;
  request.max_tokens = ctx.sampling.max_tokens;
  request.temperature = ctx.sampling.temperature;
  request.meta.actor_id = actor.actor_id;
  request.meta.turn_index = ctx.turn_index;
  request.meta.kind = kind;
  if (actor.role) request.meta.role_hint = actor.role->kind;
  return request;
}

}  // namespace

ChatRequest build_user_prompt(const ActorSpec& actor, const std::vector<const Comment*>& window,
                              const std::string& seed_opinion, const PromptContext& ctx) {
  if (!actor.is_user()) throw Error(Errc::InvalidRequest, "actor has no role: " + actor.actor_id);
  std::string system = actor.base_instruction;
  if (actor.persona) {
    system += "\n\n" + prompts::render_sdb(*actor.persona);
  }
  if (!actor.role->instruction_text.empty()) {
    system += "\n" + actor.role->instruction_text;
  }
  return base_request(actor, system, window, seed_opinion, ctx, RequestMeta::Kind::UserTurn);
}

ChatRequest build_facilitator_prompt(const ActorSpec& actor,
                                     const std::vector<const Comment*>& window,
                                     const std::string& seed_opinion, const PromptContext& ctx) {
  if (!actor.is_facilitator() || actor.strategy->kind == StrategyKind::NoModerator) {
    throw Error(Errc::InvalidRequest, "actor is not a facilitator: " + actor.actor_id);
  }
  const std::string system = actor.base_instruction + "\n\n" + actor.strategy->prompt_text;
  return base_request(actor, system, window, seed_opinion, ctx, RequestMeta::Kind::FacilitatorTurn);
}

namespace {

struct EngineRun {
  const DiscussionPlan& plan;
  Backend& backend;
  EventStore& store;
  const RunOptions& options;
  Clock& clock;
  std::string stream;
  TurnState state;

  EngineRun(const DiscussionPlan& p, Backend& b, EventStore& s, const RunOptions& o, Clock& c)
      : plan(p), backend(b), store(s), options(o), clock(c),
        stream("transcripts/" + p.plan_id + ".jsonl"), state(p.rng_seed) {}

  const ActorSpec& user_by_id(const std::string& actor_id) const {
    for (const auto& u : plan.users) {
      if (u.actor_id == actor_id) return u;
    }
    throw Error(Errc::CorruptStream, plan.plan_id + ": unknown speaker " + actor_id);
  }

  void append(nlohmann::json event) {
    event["draws"] = state.rng.draws();
    store.checkpoint_append(stream, event);
    ++state.event_ordinal;
  }

  Comment make_comment(const std::string& author_id, AuthorKind kind, std::string text) {
    Comment c;
    c.index = static_cast<int>(state.comments.size());
    c.author_id = author_id;
    c.author_kind = kind;
    c.text = std::move(text);
    c.timestamp = clock.at_event(state.event_ordinal);
    return c;
  }

  void post_seed() {
    Comment seed = make_comment(kSeedAuthorId, AuthorKind::SeedPost, plan.seed_opinion);
    append({{"type", "seed"}, {"comment", seed}});
    state.comments.push_back(std::move(seed));
  }

  void user_turn() {
    std::vector<std::string> participants;
    participants.reserve(plan.users.size());
    for (const auto& u : plan.users) participants.push_back(u.actor_id);

    const SpeakerChoice choice = next_speaker(state, participants, options.chain_probability);
    const ActorSpec& actor = user_by_id(choice.actor_id);

    PromptContext ctx{plan.rng_seed, state.user_turns_taken + 1,
                      options.sampling};
    const auto window = context_window(state.comments, options.context_window_h);
    const ChatRequest request = build_user_prompt(actor, window, plan.seed_opinion, ctx);
    const ChatResponse response = backend.complete(request);
    const std::string text = normalize_output(response.text);

    ++state.user_turns_taken;
    if (text.empty()) {
      append({{"type", "user_silence"},
              {"author_id", actor.actor_id},
              {"turn", state.user_turns_taken},
              {"timestamp", to_iso8601(clock.at_event(state.event_ordinal))}});
      log_turn(actor.actor_id, response, false);
      return;
    }
    Comment comment = make_comment(actor.actor_id, AuthorKind::User, text);
    append({{"type", "user_comment"}, {"comment", comment}});
    state.comments.push_back(std::move(comment));
    ++state.user_comments;
    state.chain_target = state.last_speaker;
    state.last_speaker = choice.actor_id;
    log_turn(actor.actor_id, response, true);
  }

  void facilitator_opportunity() {
    const ActorSpec& actor = *plan.facilitator;
    PromptContext ctx{plan.rng_seed, state.facilitator_opportunities + 1,
                      options.sampling};
    const auto window = context_window(state.comments, options.context_window_h);
    const ChatRequest request = build_facilitator_prompt(actor, window, plan.seed_opinion, ctx);
    const ChatResponse response = backend.complete(request);
    const std::string text = normalize_output(response.text);

    ++state.facilitator_opportunities;
    if (text.empty()) {
      append({{"type", "facilitator_silence"},
              {"author_id", actor.actor_id},
              {"opportunity", state.facilitator_opportunities},
              {"timestamp", to_iso8601(clock.at_event(state.event_ordinal))}});
      log_turn(actor.actor_id, response, false);
      return;
    }
    Comment comment = make_comment(actor.actor_id, AuthorKind::Facilitator, text);
    append({{"type", "facilitator_comment"}, {"comment", comment}});
    state.comments.push_back(std::move(comment));
    log_turn(actor.actor_id, response, true);
  }

  void set_status(TranscriptStatus status) {
    append({{"type", "status"}, {"status", to_string(status)}});
  }

  void log_turn(const std::string& actor_id, const ChatResponse& response, bool spoke) {
    if (!options.logger) return;
    options.logger->info("plan={} turn={} actor={} latency_ms={} intervention={}", plan.plan_id,
                         state.user_turns_taken, actor_id, response.latency.count(),
                         spoke ? 1 : 0);
  }
};

}  // namespace

Transcript run_discussion(const DiscussionPlan& plan, Backend& backend, EventStore& store,
                          const RunOptions& options) {
  SimulatedClock fallback_clock;
  Clock& clock = options.clock ? *options.clock : static_cast<Clock&>(fallback_clock);

  EngineRun run(plan, backend, store, options, clock);

  DiscussionProgress progress = load_progress(store, plan.plan_id);
  if (progress.transcript.status == TranscriptStatus::Complete) {
    return progress.transcript;  // resume of a finished discussion is a no-op
  }

  // Rebuild in-memory state from the durable events, then fast-forward the
  // RNG by replaying the recorded draw count.
  run.state.comments = progress.transcript.comments;
  run.state.user_comments = progress.user_comments;
  run.state.user_turns_taken = progress.user_turns_taken;
  run.state.facilitator_opportunities = progress.facilitator_opportunities;
  run.state.event_ordinal = progress.event_count;
  run.state.rng.discard_to(progress.rng_draws);
  const Comment* prev = nullptr;
  for (const auto& c : run.state.comments) {
    if (c.author_kind != AuthorKind::User) continue;
    if (prev) run.state.chain_target = prev->author_id;
    run.state.last_speaker = c.author_id;
    prev = &c;
  }

  // Silent user turns consume budget without producing a comment; the factor
  // bounds total attempts so an always-silent backend still terminates.
  const int max_attempts = plan.max_user_turns * 4;

  try {
    if (!progress.seed_posted) run.post_seed();
    // A kill between a user comment and its facilitator opportunity leaves
    // opportunities < comments; settle the pending opportunity first.
    if (plan.facilitator && run.state.facilitator_opportunities < run.state.user_comments) {
      run.facilitator_opportunity();
    }
    while (run.state.user_comments < plan.max_user_turns &&
           run.state.user_turns_taken < max_attempts) {
      const int before = run.state.user_comments;
      run.user_turn();
      if (plan.facilitator && run.state.user_comments > before) {
        run.facilitator_opportunity();
      }
    }
    run.set_status(TranscriptStatus::Complete);
  } catch (...) {
    try {
      run.set_status(TranscriptStatus::Failed);
    } catch (...) {
      // the stream itself is failing; the original error matters more
    }
    throw;
  }

  Transcript transcript;
  transcript.plan_id = plan.plan_id;
  transcript.comments = std::move(run.state.comments);
  transcript.status = TranscriptStatus::Complete;
  transcript.checkpoint_cursor = static_cast<int>(run.state.event_ordinal);
  return transcript;
}

}  // namespace agora
