#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "agora/domain.hpp"
#include "agora/llm_gateway.hpp"

namespace agora {

// Minimal TOML value: scalar or homogeneous array of scalars.
struct TomlValue {
  enum class Type { Bool, Int, Float, String, Array };
  Type type = Type::String;
  bool b = false;
  long long i = 0;
  double d = 0.0;
  std::string s;
  std::vector<TomlValue> array;
};

// Parses the TOML subset used by config files: comments, [section] headers,
// and `key = scalar|array` lines. Keys are returned dotted ("section.key").
std::map<std::string, TomlValue> parse_toml(const std::string& text);

// Everything generate_plans needs. Defaults mirror the reference experiment
// grid: 30 personas, 7 seed opinions, 6 strategies, 3 models, 8 discussions
// per cell, 7 users each, master seed 42, h=3, 40% chain probability.
struct ExperimentConfig {
  std::vector<Persona> persona_catalog;
  std::vector<std::string> seed_opinions;
  std::vector<StrategyKind> strategies;
  std::vector<std::string> models;
  int discussions_per_cell = 8;
  int users_per_discussion = 7;
  int troll_count = 1;
  int veteran_count = 1;
  std::uint64_t master_seed = 42;
  int max_user_turns = 15;
  int context_window_h = 3;
  double chain_probability = 0.4;

  static ExperimentConfig defaults();

  // Throws Error(ConfigInvalid) naming the offending field.
  void validate() const;
};

struct SamplingConfig {
  double temperature = 0.7;
  int max_tokens = 512;
};

struct AnnotationConfig {
  int count = 10;
  std::string model_ref;  // empty: first experiment model
  bool use_sdb = true;    // condition annotators on personas from the catalog
};

struct AppConfig {
  ExperimentConfig experiment = ExperimentConfig::defaults();
  HttpBackendConfig http;
  SamplingConfig sampling;
  AnnotationConfig annotation;
  MockPolicy mock;

  static AppConfig from_file(const std::string& path);
  static AppConfig from_toml(const std::string& text, const std::string& source_dir = ".");
};

// The built-in 30-persona catalog used when no personas file is configured.
const std::vector<Persona>& default_persona_catalog();

// The built-in seven seed opinions.
const std::vector<std::string>& default_seed_opinions();

std::vector<Persona> load_personas_jsonl(const std::string& path);

inline std::vector<StrategyKind> all_strategies() {
  return {StrategyKind::NoModerator,     StrategyKind::NoInstructions,
          StrategyKind::RulesOnly,       StrategyKind::RegulationRoom,
          StrategyKind::ConstructiveCommunications, StrategyKind::ModerationGame};
}

}  // namespace agora
