#include "agora/config.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "agora/errors.hpp"

namespace agora {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& detail) {
  throw Error(Errc::ConfigInvalid, "config line " + std::to_string(line_no) + ": " + detail);
}

// Parses one scalar token (string/bool/number). `rest` is advanced past it.
TomlValue parse_scalar(const std::string& text, std::size_t& pos, std::size_t line_no) {
  TomlValue v;
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos >= text.size()) parse_fail(line_no, "missing value");

  if (text[pos] == '"') {
    v.type = TomlValue::Type::String;
    ++pos;
    std::string out;
    while (pos < text.size() && text[pos] != '"') {
      if (text[pos] == '\\' && pos + 1 < text.size()) {
        ++pos;
        switch (text[pos]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: parse_fail(line_no, "unsupported escape");
        }
      } else {
        out += text[pos];
      }
      ++pos;
    }
    if (pos >= text.size()) parse_fail(line_no, "unterminated string");
    ++pos;  // closing quote
    v.s = out;
    return v;
  }

  std::size_t end = pos;
  while (end < text.size() && text[end] != ',' && text[end] != ']' && text[end] != '#') ++end;
  std::string token = trim(text.substr(pos, end - pos));
  pos = end;
  if (token == "true" || token == "false") {
    v.type = TomlValue::Type::Bool;
    v.b = (token == "true");
    return v;
  }
  if (token.empty()) parse_fail(line_no, "empty value");
  const bool is_float = token.find_first_of(".eE") != std::string::npos;
  try {
    if (is_float) {
      v.type = TomlValue::Type::Float;
      v.d = std::stod(token);
    } else {
      v.type = TomlValue::Type::Int;
      v.i = std::stoll(token);
    }
  } catch (const std::exception&) {
    parse_fail(line_no, "cannot parse value '" + token + "'");
  }
  return v;
}

}  // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text) {
  std::map<std::string, TomlValue> out;
  std::istringstream in(text);
  std::string raw;
  std::string prefix;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (line[0] == '[') {
      auto close = line.find(']');
      if (close == std::string::npos) parse_fail(line_no, "unterminated section header");
      prefix = trim(line.substr(1, close - 1));
      if (prefix.empty()) parse_fail(line_no, "empty section name");
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) parse_fail(line_no, "empty key");
    std::string value_text = line.substr(eq + 1);

    TomlValue value;
    std::size_t pos = 0;
    std::string vt = trim(value_text);
    if (!vt.empty() && vt[0] == '[') {
      value.type = TomlValue::Type::Array;
      pos = value_text.find('[') + 1;
      for (;;) {
        while (pos < value_text.size() &&
               std::isspace(static_cast<unsigned char>(value_text[pos])))
          ++pos;
        if (pos < value_text.size() && value_text[pos] == ']') break;
        value.array.push_back(parse_scalar(value_text, pos, line_no));
        while (pos < value_text.size() &&
               std::isspace(static_cast<unsigned char>(value_text[pos])))
          ++pos;
        if (pos < value_text.size() && value_text[pos] == ',') {
          ++pos;
          continue;
        }
        if (pos < value_text.size() && value_text[pos] == ']') break;
        parse_fail(line_no, "expected ',' or ']' in array");
      }
    } else {
      value = parse_scalar(value_text, pos, line_no);
      std::string tail = trim(value_text.substr(pos));
      if (!tail.empty() && tail[0] != '#') parse_fail(line_no, "trailing characters after value");
    }

    const std::string full_key = prefix.empty() ? key : prefix + "." + key;
    out[full_key] = std::move(value);
  }
  return out;
}

namespace {

struct PersonaRow {
  const char* username;
  int age;
  const char* gender;
  const char* education;
  const char* orientation;
  const char* demographic;
  const char* employment;
  const char* special;
  const char* traits;  // comma separated
};

// Built-in sociodemographic cards. These are configuration data: any catalog
// supplied via personas_file replaces them wholesale.
constexpr PersonaRow kDefaultPersonas[] = {
    {"CynicalInvestor88", 52, "male", "MBA", "heterosexual", "white American", "hedge fund analyst",
     "", "cynical,sarcastic,contrarian"},
    {"SunnySideSarah", 29, "female", "bachelor's degree", "heterosexual", "white American",
     "elementary school teacher", "", "optimistic,warm,patient"},
    {"TechGuru88", 34, "male", "master's degree", "heterosexual", "Asian American",
     "software engineer", "", "analytical,blunt,curious"},
    {"QuietObserver7", 41, "non-binary", "associate degree", "bisexual", "white Canadian",
     "librarian", "Prefers to lurk before commenting.", "reserved,thoughtful,precise"},
    {"MamaBear2010", 38, "female", "high school diploma", "heterosexual", "Latina American",
     "stay-at-home parent", "", "protective,emotional,direct"},
    {"GrizzledVet", 64, "male", "high school diploma", "heterosexual", "white American",
     "retired army mechanic", "", "gruff,loyal,traditional"},
    {"UrbanFarmerJoe", 31, "male", "bachelor's degree", "gay", "Black American",
     "community garden coordinator", "", "practical,earnest,stubborn"},
    {"PixelPainter", 24, "female", "art school dropout", "pansexual", "white European",
     "freelance illustrator", "", "creative,impulsive,defensive"},
    {"DataDrivenDan", 45, "male", "PhD", "heterosexual", "white American", "statistician",
     "Cites numbers whenever possible.", "pedantic,rational,dry"},
    {"AbuelaRosa", 67, "female", "primary school", "heterosexual", "Mexican immigrant",
     "retired seamstress", "", "kind,devout,firm"},
    {"CampusRadical", 20, "female", "undergraduate student", "lesbian", "mixed-race American",
     "student activist", "", "passionate,combative,idealistic"},
    {"SteadyEddie", 55, "male", "trade certification", "heterosexual", "white Australian",
     "electrician", "", "calm,methodical,skeptical"},
    {"NightShiftNina", 33, "female", "nursing degree", "bisexual", "Filipina immigrant",
     "ICU nurse", "Often tired and short-tempered.", "caring,exhausted,sharp"},
    {"CryptoKid2001", 23, "male", "some college", "heterosexual", "white American",
     "day trader", "", "brash,overconfident,energetic"},
    {"ProfHumanities", 58, "female", "PhD", "heterosexual", "Jewish American",
     "literature professor", "", "verbose,nuanced,condescending"},
    {"DesertNomad", 36, "male", "self-taught", "heterosexual", "Arab immigrant",
     "long-haul truck driver", "", "independent,wry,observant"},
    {"SoccerMomTina", 42, "female", "bachelor's degree", "heterosexual", "white American",
     "real estate agent", "", "chatty,competitive,status-conscious"},
    {"ZenGardener", 49, "non-binary", "master's degree", "asexual", "Japanese American",
     "landscape designer", "Avoids direct confrontation.", "serene,indirect,principled"},
    {"FactoryFloorFred", 51, "male", "high school diploma", "heterosexual", "white American",
     "assembly line worker", "", "plainspoken,suspicious,proud"},
    {"GenZGamer", 19, "male", "high school student", "questioning", "Black British",
     "part-time barista", "", "ironic,meme-fluent,restless"},
    {"PolicyWonkPriya", 30, "female", "master's degree", "heterosexual", "Indian American",
     "think tank researcher", "", "earnest,technical,diplomatic"},
    {"OldSchoolOscar", 71, "male", "bachelor's degree", "heterosexual", "Cuban American",
     "retired journalist", "", "formal,nostalgic,argumentative"},
    {"WildernessWill", 27, "male", "associate degree", "heterosexual", "Native American",
     "park ranger", "", "laconic,grounded,protective"},
    {"BookClubBeth", 46, "female", "bachelor's degree", "heterosexual", "white American",
     "dental hygienist", "", "friendly,gossipy,conflict-averse"},
    {"StartupSteve", 35, "male", "dropped out of college", "heterosexual", "white American",
     "serial entrepreneur", "Relates everything to business.", "hustling,dismissive,optimistic"},
    {"UnionRep42", 48, "female", "trade certification", "lesbian", "white American",
     "union shop steward", "", "tough,organized,fair"},
    {"QuietFaith", 26, "female", "bachelor's degree", "heterosexual", "Korean American",
     "church youth coordinator", "", "gentle,sincere,firm-on-values"},
    {"SaltyFisherman", 60, "male", "vocational school", "heterosexual", "Norwegian immigrant",
     "commercial fisherman", "", "blunt,weathered,superstitious"},
    {"MedStudentMia", 25, "female", "medical student", "bisexual", "Nigerian immigrant",
     "medical student", "Very little free time.", "driven,precise,impatient"},
    {"RuralRoots", 44, "male", "high school diploma", "heterosexual", "white American",
     "soybean farmer", "", "conservative,courteous,stubborn"},
};

std::vector<std::string> split_traits(const char* csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

const std::vector<Persona>& default_persona_catalog() {
  static const std::vector<Persona> catalog = [] {
    std::vector<Persona> out;
    for (const PersonaRow& row : kDefaultPersonas) {
      Persona p;
      p.username = row.username;
      p.age = row.age;
      p.gender = row.gender;
      p.education_level = row.education;
      p.sexual_orientation = row.orientation;
      p.demographic_group = row.demographic;
      p.current_employment = row.employment;
      p.special_instructions = row.special;
      p.personality_characteristics = split_traits(row.traits);
      out.push_back(std::move(p));
    }
    return out;
  }();
  return catalog;
}

const std::vector<std::string>& default_seed_opinions() {
  static const std::vector<std::string> opinions = {
      "Social media platforms should be legally responsible for the content their users post.",
      "Remote work has made most office buildings obsolete and cities should repurpose them.",
      "College degrees are no longer worth the cost for the majority of students.",
      "Governments should heavily tax meat to fight climate change.",
      "Professional athletes are paid far too much compared to teachers and nurses.",
      "Self-driving cars should be banned from city streets until they are perfect.",
      "Voting should be mandatory for every adult citizen.",
  };
  return opinions;
}

std::vector<Persona> load_personas_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) {
    throw Error(Errc::ConfigInvalid, "personas_file not readable: " + path);
  }
  std::vector<Persona> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(decode_jsonl<Persona>(line));
    } catch (const std::exception& e) {
      throw Error(Errc::ConfigInvalid,
                  path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.persona_catalog = default_persona_catalog();
  cfg.seed_opinions = default_seed_opinions();
  cfg.strategies = all_strategies();
  cfg.models = {"llama-3.1-70b-instruct", "qwen-2.5-32b-instruct", "mistral-nemo-12b-instruct"};
  return cfg;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& detail) {
    throw Error(Errc::ConfigInvalid, field + ": " + detail);
  };
  if (persona_catalog.empty()) fail("persona_catalog", "must not be empty");
  if (seed_opinions.empty()) fail("seed_opinions", "must not be empty");
  if (strategies.empty()) fail("strategies", "must not be empty");
  if (models.empty()) fail("models", "must not be empty");
  if (discussions_per_cell <= 0) fail("discussions_per_cell", "must be positive");
  if (users_per_discussion <= 0) fail("users_per_discussion", "must be positive");
  if (static_cast<std::size_t>(users_per_discussion) > persona_catalog.size()) {
    fail("users_per_discussion", "exceeds persona catalog size");
  }
  if (troll_count < 0) fail("troll_count", "must be non-negative");
  if (veteran_count < 0) fail("veteran_count", "must be non-negative");
  if (troll_count + veteran_count > users_per_discussion) {
    fail("troll_count", "troll_count + veteran_count exceeds users_per_discussion");
  }
  if (max_user_turns <= 0) fail("max_user_turns", "must be positive");
  if (context_window_h <= 0) fail("context_window_h", "must be positive");
  if (chain_probability < 0.0 || chain_probability > 1.0) {
    fail("chain_probability", "must lie in [0, 1]");
  }
  const auto violations = validate_persona_catalog(persona_catalog);
  if (!violations.empty()) {
    fail("persona_catalog", violations.front().code + " for persona '" +
                                violations.front().username + "' field " +
                                violations.front().field);
  }
}

namespace {

struct Binder {
  const std::map<std::string, TomlValue>& kv;

  const TomlValue* find(const std::string& key) const {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    const TomlValue* v = find(key);
    if (!v) return fallback;
    if (v->type != TomlValue::Type::String)
      throw Error(Errc::ConfigInvalid, key + ": expected string");
    return v->s;
  }

  long long integer(const std::string& key, long long fallback) const {
    const TomlValue* v = find(key);
    if (!v) return fallback;
    if (v->type != TomlValue::Type::Int)
      throw Error(Errc::ConfigInvalid, key + ": expected integer");
    return v->i;
  }

  double real(const std::string& key, double fallback) const {
    const TomlValue* v = find(key);
    if (!v) return fallback;
    if (v->type == TomlValue::Type::Int) return static_cast<double>(v->i);
    if (v->type != TomlValue::Type::Float)
      throw Error(Errc::ConfigInvalid, key + ": expected number");
    return v->d;
  }

  std::vector<std::string> str_array(const std::string& key,
                                     const std::vector<std::string>& fallback) const {
    const TomlValue* v = find(key);
    if (!v) return fallback;
    if (v->type != TomlValue::Type::Array)
      throw Error(Errc::ConfigInvalid, key + ": expected array");
    std::vector<std::string> out;
    for (const auto& item : v->array) {
      if (item.type != TomlValue::Type::String)
        throw Error(Errc::ConfigInvalid, key + ": expected array of strings");
      out.push_back(item.s);
    }
    return out;
  }
};

MockPolicy::FacilitatorMode facilitator_mode_from_string(const std::string& s) {
  if (s == "always") return MockPolicy::FacilitatorMode::Always;
  if (s == "never") return MockPolicy::FacilitatorMode::Never;
  if (s == "alternate") return MockPolicy::FacilitatorMode::Alternate;
  if (s == "hashed") return MockPolicy::FacilitatorMode::Hashed;
  throw Error(Errc::ConfigInvalid, "mock.facilitator_mode: unknown mode '" + s + "'");
}

}  // namespace

AppConfig AppConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw Error(Errc::ConfigInvalid, "config file not readable: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_toml(buf.str(), std::filesystem::path(path).parent_path().string());
}

AppConfig AppConfig::from_toml(const std::string& text, const std::string& source_dir) {
  const auto kv = parse_toml(text);
  Binder bind{kv};
  AppConfig cfg;

  ExperimentConfig& exp = cfg.experiment;
  const std::string personas_file = bind.str("experiment.personas_file", "");
  if (!personas_file.empty()) {
    std::filesystem::path p(personas_file);
    if (p.is_relative()) p = std::filesystem::path(source_dir) / p;
    exp.persona_catalog = load_personas_jsonl(p.string());
  }
  exp.seed_opinions = bind.str_array("experiment.seed_opinions", exp.seed_opinions);
  exp.models = bind.str_array("experiment.models", exp.models);
  const auto strategy_names = bind.str_array("experiment.strategies", {});
  if (!strategy_names.empty()) {
    exp.strategies.clear();
    for (const auto& name : strategy_names) exp.strategies.push_back(strategy_kind_from_string(name));
  }
  exp.discussions_per_cell =
      static_cast<int>(bind.integer("experiment.discussions_per_cell", exp.discussions_per_cell));
  exp.users_per_discussion =
      static_cast<int>(bind.integer("experiment.users_per_discussion", exp.users_per_discussion));
  exp.troll_count = static_cast<int>(bind.integer("experiment.troll_count", exp.troll_count));
  exp.veteran_count = static_cast<int>(bind.integer("experiment.veteran_count", exp.veteran_count));
  exp.master_seed =
      static_cast<std::uint64_t>(bind.integer("experiment.master_seed", static_cast<long long>(exp.master_seed)));
  exp.max_user_turns = static_cast<int>(bind.integer("experiment.max_user_turns", exp.max_user_turns));
  exp.context_window_h =
      static_cast<int>(bind.integer("experiment.context_window_h", exp.context_window_h));
  exp.chain_probability = bind.real("experiment.chain_probability", exp.chain_probability);

  cfg.http.base_url = bind.str("backend.base_url", cfg.http.base_url);
  cfg.http.api_key_env = bind.str("backend.api_key_env", cfg.http.api_key_env);
  cfg.http.max_attempts = static_cast<int>(bind.integer("backend.max_attempts", cfg.http.max_attempts));
  cfg.http.backoff_base =
      std::chrono::milliseconds(bind.integer("backend.backoff_base_ms", cfg.http.backoff_base.count()));
  cfg.http.request_timeout =
      std::chrono::seconds(bind.integer("backend.request_timeout_s", cfg.http.request_timeout.count()));

  cfg.sampling.temperature = bind.real("sampling.temperature", cfg.sampling.temperature);
  cfg.sampling.max_tokens = static_cast<int>(bind.integer("sampling.max_tokens", cfg.sampling.max_tokens));

  cfg.annotation.count = static_cast<int>(bind.integer("annotation.count", cfg.annotation.count));
  cfg.annotation.model_ref = bind.str("annotation.model", cfg.annotation.model_ref);
  if (const TomlValue* v = bind.find("annotation.use_sdb")) {
    if (v->type != TomlValue::Type::Bool)
      throw Error(Errc::ConfigInvalid, "annotation.use_sdb: expected boolean");
    cfg.annotation.use_sdb = v->b;
  }

  MockPolicy& mock = cfg.mock;
  const std::string mode = bind.str("mock.facilitator_mode", "");
  if (!mode.empty()) mock.facilitator_mode = facilitator_mode_from_string(mode);
  mock.facilitator_speak_prob = bind.real("mock.facilitator_speak_prob", mock.facilitator_speak_prob);
  mock.troll_marker_prob = bind.real("mock.troll_marker_prob", mock.troll_marker_prob);
  mock.veteran_marker_prob = bind.real("mock.veteran_marker_prob", mock.veteran_marker_prob);
  mock.neutral_marker_prob = bind.real("mock.neutral_marker_prob", mock.neutral_marker_prob);
  mock.toxicity_marker = bind.str("mock.toxicity_marker", mock.toxicity_marker);
  mock.annotator_refusal_prob = bind.real("mock.annotator_refusal_prob", mock.annotator_refusal_prob);

  return cfg;
}

}  // namespace agora
