#include "agora/experiment_plan.hpp"

#include <cstdio>

#include "agora/prompts.hpp"
#include "agora/rng.hpp"

namespace agora {

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t plan_ordinal) {
  return splitmix64(master_seed ^ splitmix64(plan_ordinal));
}

namespace {

ActorSpec make_user(const Persona& persona, RoleKind role, const std::string& model_ref) {
  ActorSpec actor;
  actor.actor_id = persona.username;
  actor.persona = persona;
  actor.role = prompts::make_role(role);
  actor.model_ref = model_ref;
  actor.base_instruction = prompts::user_base();
  return actor;
}

ActorSpec make_facilitator(StrategyKind strategy, const std::string& model_ref) {
  ActorSpec actor;
  actor.actor_id = "facilitator";
  actor.strategy = prompts::make_strategy(strategy);
  actor.model_ref = model_ref;
  actor.base_instruction = prompts::facilitator_base();
  return actor;
}

}  // namespace

std::vector<DiscussionPlan> generate_plans(const ExperimentConfig& config) {
  config.validate();

  std::vector<DiscussionPlan> plans;
  plans.reserve(config.models.size() * config.strategies.size() *
                static_cast<std::size_t>(config.discussions_per_cell));

  std::uint64_t ordinal = 0;
  for (const std::string& model : config.models) {
    for (StrategyKind strategy : config.strategies) {
      for (int i = 0; i < config.discussions_per_cell; ++i, ++ordinal) {
        DiscussionPlan plan;
        plan.rng_seed = derive_seed(config.master_seed, ordinal);
        // Separate stream for setup sampling so the discussion itself starts
        // from plan.rng_seed untouched.
        std::mt19937_64 rng(splitmix64(plan.rng_seed));

        char id[32];
        std::snprintf(id, sizeof(id), "plan_%04llu", static_cast<unsigned long long>(ordinal));
        plan.plan_id = id;
        plan.model_ref = model;
        plan.strategy_kind = strategy;
        plan.max_user_turns = config.max_user_turns;

        const auto persona_idx = sample_indices(rng, config.persona_catalog.size(),
                                                static_cast<std::size_t>(config.users_per_discussion));
        // Roles attach to the sampled order: trolls first, then veterans,
        // remainder neutral; the final user order is re-shuffled afterwards.
        plan.users.reserve(persona_idx.size());
        for (std::size_t u = 0; u < persona_idx.size(); ++u) {
          RoleKind role = RoleKind::Neutral;
          if (u < static_cast<std::size_t>(config.troll_count)) {
            role = RoleKind::Troll;
          } else if (u < static_cast<std::size_t>(config.troll_count + config.veteran_count)) {
            role = RoleKind::CommunityVeteran;
          }
          plan.users.push_back(make_user(config.persona_catalog[persona_idx[u]], role, model));
        }
        shuffle_in_place(rng, plan.users);

        plan.seed_opinion =
            config.seed_opinions[uniform_index(rng, config.seed_opinions.size())];

        if (strategy != StrategyKind::NoModerator) {
          plan.facilitator = make_facilitator(strategy, model);
        }
        plans.push_back(std::move(plan));
      }
    }
  }
  return plans;
}

}  // namespace agora
