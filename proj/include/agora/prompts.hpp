#pragma once

#include "agora/domain.hpp"

namespace agora::prompts {

// Base instruction shared by every user agent.
const std::string& user_base();

// Base instruction shared by every facilitator agent.
const std::string& facilitator_base();

// Full instruction for annotator agents, including both rating scales and the
// worked example.
const std::string& annotator_instruction();

// Extra role instruction; empty for Neutral.
Role make_role(RoleKind kind);

// Strategy prompt; empty for NoModerator (no facilitator is instantiated).
FacilitationStrategy make_strategy(StrategyKind kind);

// Renders a persona as prompt text ("Your profile: ..." block).
std::string render_sdb(const Persona& persona);

}  // namespace agora::prompts
