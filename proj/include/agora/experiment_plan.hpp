#pragma once

#include <cstdint>
#include <vector>

#include "agora/config.hpp"
#include "agora/domain.hpp"

namespace agora {

// Deterministic per-plan seed: splitmix-style avalanche over master_seed and
// the plan's ordinal. Distinct ordinals yield distinct seeds with
// overwhelming probability.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t plan_ordinal);

// Expands the configured cross-product (models x strategies x N_d) into
// concrete discussion plans. Personas and the seed opinion are sampled
// uniformly without replacement per plan; output order is deterministic and
// two calls with the same config are identical.
std::vector<DiscussionPlan> generate_plans(const ExperimentConfig& config);

}  // namespace agora
