#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agora/time_util.hpp"
#include "json.hpp"

namespace agora {

// A sociodemographic backstory card used to condition user and annotator
// agents. All fields must be present; only special_instructions may be empty.
struct Persona {
  std::string username;
  int age = 0;
  std::string gender;
  std::string education_level;
  std::string sexual_orientation;
  std::string demographic_group;
  std::string current_employment;
  std::string special_instructions;
  std::vector<std::string> personality_characteristics;

  bool operator==(const Persona&) const = default;
};

enum class RoleKind { Neutral, Troll, CommunityVeteran };

struct Role {
  RoleKind kind = RoleKind::Neutral;
  std::string instruction_text;

  bool operator==(const Role&) const = default;
};

enum class StrategyKind {
  NoModerator,
  NoInstructions,
  RulesOnly,
  RegulationRoom,
  ConstructiveCommunications,
  ModerationGame,
};

struct FacilitationStrategy {
  StrategyKind kind = StrategyKind::NoModerator;
  std::string prompt_text;  // empty iff kind == NoModerator

  bool operator==(const FacilitationStrategy&) const = default;
};

// A runnable agent: persona + role for users, strategy for facilitators.
// Exactly one of {role, strategy} is present.
struct ActorSpec {
  std::string actor_id;
  std::optional<Persona> persona;
  std::optional<Role> role;
  std::optional<FacilitationStrategy> strategy;
  std::string model_ref;
  std::string base_instruction;

  bool is_user() const { return role.has_value(); }
  bool is_facilitator() const { return strategy.has_value(); }

  bool operator==(const ActorSpec&) const = default;
};

struct DiscussionPlan {
  std::string plan_id;
  std::string seed_opinion;
  std::vector<ActorSpec> users;
  std::optional<ActorSpec> facilitator;  // absent iff strategy_kind == NoModerator
  StrategyKind strategy_kind = StrategyKind::NoModerator;
  std::string model_ref;
  std::uint64_t rng_seed = 0;
  int max_user_turns = 15;

  bool operator==(const DiscussionPlan&) const = default;
};

enum class AuthorKind { User, Facilitator, SeedPost };

struct Comment {
  int index = 0;  // dense 0-based ordinal within the visible transcript
  std::string author_id;
  AuthorKind author_kind = AuthorKind::User;
  std::string text;
  EpochSeconds timestamp = 0;

  bool operator==(const Comment&) const = default;
};

enum class TranscriptStatus { InProgress, Complete, Failed };

struct Transcript {
  std::string plan_id;
  std::vector<Comment> comments;
  TranscriptStatus status = TranscriptStatus::InProgress;
  int checkpoint_cursor = 0;  // count of durably persisted events

  bool operator==(const Transcript&) const = default;
};

// One annotator's verdict on one comment. Scores outside [1,5] or unparseable
// responses are stored as Invalid (nullopt); such records keep their raw
// response but never enter any statistic.
struct AnnotationRecord {
  std::string plan_id;
  int comment_index = 0;
  std::string annotator_id;
  std::optional<int> toxicity;
  std::optional<int> argument_quality;
  std::string raw_response;

  bool valid() const { return toxicity.has_value() && argument_quality.has_value(); }

  bool operator==(const AnnotationRecord&) const = default;
};

// Enum <-> string spellings used in every serialized form.
const char* to_string(RoleKind k);
const char* to_string(StrategyKind k);
const char* to_string(AuthorKind k);
const char* to_string(TranscriptStatus s);
RoleKind role_kind_from_string(const std::string& s);
StrategyKind strategy_kind_from_string(const std::string& s);
AuthorKind author_kind_from_string(const std::string& s);
TranscriptStatus transcript_status_from_string(const std::string& s);

void to_json(nlohmann::json& j, const Persona& p);
void from_json(const nlohmann::json& j, Persona& p);
void to_json(nlohmann::json& j, const Role& r);
void from_json(const nlohmann::json& j, Role& r);
void to_json(nlohmann::json& j, const FacilitationStrategy& s);
void from_json(const nlohmann::json& j, FacilitationStrategy& s);
void to_json(nlohmann::json& j, const ActorSpec& a);
void from_json(const nlohmann::json& j, ActorSpec& a);
void to_json(nlohmann::json& j, const DiscussionPlan& p);
void from_json(const nlohmann::json& j, DiscussionPlan& p);
void to_json(nlohmann::json& j, const Comment& c);
void from_json(const nlohmann::json& j, Comment& c);
void to_json(nlohmann::json& j, const Transcript& t);
void from_json(const nlohmann::json& j, Transcript& t);
void to_json(nlohmann::json& j, const AnnotationRecord& r);
void from_json(const nlohmann::json& j, AnnotationRecord& r);

// Canonical single-line encoding used by every JSONL stream.
template <typename T>
std::string encode_jsonl(const T& value) {
  nlohmann::json j = value;
  return j.dump();
}

template <typename T>
T decode_jsonl(const std::string& line) {
  return nlohmann::json::parse(line).get<T>();
}

struct CatalogViolation {
  std::string username;  // offending persona (may be empty if unknown)
  std::string field;
  std::string code;  // DuplicateUsername | MissingField | NonPositiveAge
  std::string detail;
};

// Returns the empty list iff every persona invariant holds and usernames are
// unique within the catalog.
std::vector<CatalogViolation> validate_persona_catalog(const std::vector<Persona>& catalog);

// The seed post's synthetic author.
inline constexpr const char* kSeedAuthorId = "original_poster";

}  // namespace agora
