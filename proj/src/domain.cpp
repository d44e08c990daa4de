#include "agora/domain.hpp"

#include <unordered_set>

#include "agora/errors.hpp"

namespace agora {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::DuplicateUsername: return "DuplicateUsername";
    case Errc::MissingField: return "MissingField";
    case Errc::NonPositiveAge: return "NonPositiveAge";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::InvalidRequest: return "InvalidRequest";
    case Errc::BackendUnreachable: return "BackendUnreachable";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::ContextTooLong: return "ContextTooLong";
    case Errc::TooFewComments: return "TooFewComments";
    case Errc::EmptyHistogram: return "EmptyHistogram";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::StorageFull: return "StorageFull";
    case Errc::PermissionDenied: return "PermissionDenied";
    case Errc::CorruptStream: return "CorruptStream";
    case Errc::NoCompletedDiscussions: return "NoCompletedDiscussions";
    case Errc::SerializationError: return "SerializationError";
    case Errc::UsageError: return "UsageError";
  }
  return "UnknownError";
}

const char* to_string(RoleKind k) {
  switch (k) {
    case RoleKind::Neutral: return "Neutral";
    case RoleKind::Troll: return "Troll";
    case RoleKind::CommunityVeteran: return "CommunityVeteran";
  }
  return "Neutral";
}

const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::NoModerator: return "NoModerator";
    case StrategyKind::NoInstructions: return "NoInstructions";
    case StrategyKind::RulesOnly: return "RulesOnly";
    case StrategyKind::RegulationRoom: return "RegulationRoom";
    case StrategyKind::ConstructiveCommunications: return "ConstructiveCommunications";
    case StrategyKind::ModerationGame: return "ModerationGame";
  }
  return "NoModerator";
}

const char* to_string(AuthorKind k) {
  switch (k) {
    case AuthorKind::User: return "User";
    case AuthorKind::Facilitator: return "Facilitator";
    case AuthorKind::SeedPost: return "SeedPost";
  }
  return "User";
}

const char* to_string(TranscriptStatus s) {
  switch (s) {
    case TranscriptStatus::InProgress: return "InProgress";
    case TranscriptStatus::Complete: return "Complete";
    case TranscriptStatus::Failed: return "Failed";
  }
  return "InProgress";
}

namespace {

[[noreturn]] void bad_enum(const char* type, const std::string& value) {
  throw Error(Errc::SerializationError, std::string("unknown ") + type + " value '" + value + "'");
}

}  // namespace

RoleKind role_kind_from_string(const std::string& s) {
  if (s == "Neutral") return RoleKind::Neutral;
  if (s == "Troll") return RoleKind::Troll;
  if (s == "CommunityVeteran") return RoleKind::CommunityVeteran;
  bad_enum("RoleKind", s);
}

StrategyKind strategy_kind_from_string(const std::string& s) {
  if (s == "NoModerator") return StrategyKind::NoModerator;
  if (s == "NoInstructions") return StrategyKind::NoInstructions;
  if (s == "RulesOnly") return StrategyKind::RulesOnly;
  if (s == "RegulationRoom") return StrategyKind::RegulationRoom;
  if (s == "ConstructiveCommunications") return StrategyKind::ConstructiveCommunications;
  if (s == "ModerationGame") return StrategyKind::ModerationGame;
  bad_enum("StrategyKind", s);
}

AuthorKind author_kind_from_string(const std::string& s) {
  if (s == "User") return AuthorKind::User;
  if (s == "Facilitator") return AuthorKind::Facilitator;
  if (s == "SeedPost") return AuthorKind::SeedPost;
  bad_enum("AuthorKind", s);
}

TranscriptStatus transcript_status_from_string(const std::string& s) {
  if (s == "InProgress") return TranscriptStatus::InProgress;
  if (s == "Complete") return TranscriptStatus::Complete;
  if (s == "Failed") return TranscriptStatus::Failed;
  bad_enum("TranscriptStatus", s);
}

void to_json(nlohmann::json& j, const Persona& p) {
  j = nlohmann::json{
      {"username", p.username},
      {"age", p.age},
      {"gender", p.gender},
      {"education_level", p.education_level},
      {"sexual_orientation", p.sexual_orientation},
      {"demographic_group", p.demographic_group},
      {"current_employment", p.current_employment},
      {"special_instructions", p.special_instructions},
      {"personality_characteristics", p.personality_characteristics},
  };
}

void from_json(const nlohmann::json& j, Persona& p) {
  j.at("username").get_to(p.username);
  j.at("age").get_to(p.age);
  j.at("gender").get_to(p.gender);
  j.at("education_level").get_to(p.education_level);
  j.at("sexual_orientation").get_to(p.sexual_orientation);
  j.at("demographic_group").get_to(p.demographic_group);
  j.at("current_employment").get_to(p.current_employment);
  j.at("special_instructions").get_to(p.special_instructions);
  j.at("personality_characteristics").get_to(p.personality_characteristics);
}

void to_json(nlohmann::json& j, const Role& r) {
  j = nlohmann::json{{"kind", to_string(r.kind)}, {"instruction_text", r.instruction_text}};
}

void from_json(const nlohmann::json& j, Role& r) {
  r.kind = role_kind_from_string(j.at("kind").get<std::string>());
  j.at("instruction_text").get_to(r.instruction_text);
}

void to_json(nlohmann::json& j, const FacilitationStrategy& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)}, {"prompt_text", s.prompt_text}};
}

void from_json(const nlohmann::json& j, FacilitationStrategy& s) {
  s.kind = strategy_kind_from_string(j.at("kind").get<std::string>());
  j.at("prompt_text").get_to(s.prompt_text);
}

void to_json(nlohmann::json& j, const ActorSpec& a) {
  j = nlohmann::json{
      {"actor_id", a.actor_id},
      {"model_ref", a.model_ref},
      {"base_instruction", a.base_instruction},
  };
  if (a.persona) j["persona"] = *a.persona;
  if (a.role) j["role"] = *a.role;
  if (a.strategy) j["strategy"] = *a.strategy;
}

void from_json(const nlohmann::json& j, ActorSpec& a) {
  j.at("actor_id").get_to(a.actor_id);
  j.at("model_ref").get_to(a.model_ref);
  j.at("base_instruction").get_to(a.base_instruction);
  a.persona.reset();
  a.role.reset();
  a.strategy.reset();
  if (j.contains("persona")) a.persona = j.at("persona").get<Persona>();
  if (j.contains("role")) a.role = j.at("role").get<Role>();
  if (j.contains("strategy")) a.strategy = j.at("strategy").get<FacilitationStrategy>();
}

void to_json(nlohmann::json& j, const DiscussionPlan& p) {
  j = nlohmann::json{
      {"plan_id", p.plan_id},
      {"seed_opinion", p.seed_opinion},
      {"users", p.users},
      {"strategy_kind", to_string(p.strategy_kind)},
      {"model_ref", p.model_ref},
      {"rng_seed", p.rng_seed},
      {"max_user_turns", p.max_user_turns},
  };
  if (p.facilitator) j["facilitator"] = *p.facilitator;
}

void from_json(const nlohmann::json& j, DiscussionPlan& p) {
  j.at("plan_id").get_to(p.plan_id);
  j.at("seed_opinion").get_to(p.seed_opinion);
  j.at("users").get_to(p.users);
  p.strategy_kind = strategy_kind_from_string(j.at("strategy_kind").get<std::string>());
  j.at("model_ref").get_to(p.model_ref);
  j.at("rng_seed").get_to(p.rng_seed);
  j.at("max_user_turns").get_to(p.max_user_turns);
  p.facilitator.reset();
  if (j.contains("facilitator")) p.facilitator = j.at("facilitator").get<ActorSpec>();
}

void to_json(nlohmann::json& j, const Comment& c) {
  j = nlohmann::json{
      {"index", c.index},
      {"author_id", c.author_id},
      {"author_kind", to_string(c.author_kind)},
      {"text", c.text},
      {"timestamp", to_iso8601(c.timestamp)},
  };
}

void from_json(const nlohmann::json& j, Comment& c) {
  j.at("index").get_to(c.index);
  j.at("author_id").get_to(c.author_id);
  c.author_kind = author_kind_from_string(j.at("author_kind").get<std::string>());
  j.at("text").get_to(c.text);
  c.timestamp = from_iso8601(j.at("timestamp").get<std::string>());
}

void to_json(nlohmann::json& j, const Transcript& t) {
  j = nlohmann::json{
      {"plan_id", t.plan_id},
      {"comments", t.comments},
      {"status", to_string(t.status)},
      {"checkpoint_cursor", t.checkpoint_cursor},
  };
}

void from_json(const nlohmann::json& j, Transcript& t) {
  j.at("plan_id").get_to(t.plan_id);
  j.at("comments").get_to(t.comments);
  t.status = transcript_status_from_string(j.at("status").get<std::string>());
  j.at("checkpoint_cursor").get_to(t.checkpoint_cursor);
}

void to_json(nlohmann::json& j, const AnnotationRecord& r) {
  j = nlohmann::json{
      {"plan_id", r.plan_id},
      {"comment_index", r.comment_index},
      {"annotator_id", r.annotator_id},
      {"toxicity", r.toxicity ? nlohmann::json(*r.toxicity) : nlohmann::json(nullptr)},
      {"argument_quality",
       r.argument_quality ? nlohmann::json(*r.argument_quality) : nlohmann::json(nullptr)},
      {"raw_response", r.raw_response},
  };
}

void from_json(const nlohmann::json& j, AnnotationRecord& r) {
  j.at("plan_id").get_to(r.plan_id);
  j.at("comment_index").get_to(r.comment_index);
  j.at("annotator_id").get_to(r.annotator_id);
  r.toxicity.reset();
  r.argument_quality.reset();
  if (!j.at("toxicity").is_null()) r.toxicity = j.at("toxicity").get<int>();
  if (!j.at("argument_quality").is_null()) r.argument_quality = j.at("argument_quality").get<int>();
  j.at("raw_response").get_to(r.raw_response);
}

std::vector<CatalogViolation> validate_persona_catalog(const std::vector<Persona>& catalog) {
  std::vector<CatalogViolation> violations;
  std::unordered_set<std::string> seen;

  auto require = [&](const Persona& p, const std::string& value, const char* field) {
    if (value.empty()) {
      violations.push_back({p.username, field, "MissingField", std::string(field) + " is empty"});
    }
  };

  for (const Persona& p : catalog) {
    if (p.username.empty()) {
      violations.push_back({"", "username", "MissingField", "username is empty"});
    } else if (!seen.insert(p.username).second) {
      violations.push_back(
          {p.username, "username", "DuplicateUsername", "username appears more than once"});
    }
    if (p.age <= 0) {
      violations.push_back({p.username, "age", "NonPositiveAge", "age must be positive"});
    }
    require(p, p.gender, "gender");
    require(p, p.education_level, "education_level");
    require(p, p.sexual_orientation, "sexual_orientation");
    require(p, p.demographic_group, "demographic_group");
    require(p, p.current_employment, "current_employment");
    // special_instructions may be empty; personality_characteristics must exist
    if (p.personality_characteristics.empty()) {
      violations.push_back({p.username, "personality_characteristics", "MissingField",
                            "personality_characteristics is empty"});
    }
  }
  return violations;
}

}  // namespace agora
