#include <fstream>

#include "agora/config.hpp"
#include "agora/errors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace agora;

TEST_CASE("toml subset parses sections, scalars and arrays") {
  const auto kv = parse_toml(R"(
# comment
top = 1
[experiment]
master_seed = 42
chain_probability = 0.4
models = ["a", "b,with comma", "c"]
flag = true
name = "hello \"world\""
)");
  CHECK(kv.at("top").i == 1);
  CHECK(kv.at("experiment.master_seed").i == 42);
  CHECK(kv.at("experiment.chain_probability").d == doctest::Approx(0.4));
  REQUIRE(kv.at("experiment.models").array.size() == 3);
  CHECK(kv.at("experiment.models").array[1].s == "b,with comma");
  CHECK(kv.at("experiment.flag").b == true);
  CHECK(kv.at("experiment.name").s == "hello \"world\"");
}

TEST_CASE("toml errors carry the line number") {
  try {
    parse_toml("ok = 1\nbroken line\n");
    FAIL("expected ConfigInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConfigInvalid);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("defaults mirror the reference experiment grid") {
  const ExperimentConfig cfg = ExperimentConfig::defaults();
  CHECK(cfg.persona_catalog.size() == 30);
  CHECK(cfg.seed_opinions.size() == 7);
  CHECK(cfg.strategies.size() == 6);
  CHECK(cfg.models.size() == 3);
  CHECK(cfg.discussions_per_cell == 8);
  CHECK(cfg.users_per_discussion == 7);
  CHECK(cfg.troll_count == 1);
  CHECK(cfg.veteran_count == 1);
  CHECK(cfg.master_seed == 42);
  CHECK(cfg.context_window_h == 3);
  CHECK(cfg.chain_probability == doctest::Approx(0.4));
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config overrides apply and the rest keeps defaults") {
  const AppConfig cfg = AppConfig::from_toml(R"(
[experiment]
discussions_per_cell = 2
models = ["m0"]
strategies = ["NoModerator", "RulesOnly"]
master_seed = 7
[backend]
base_url = "http://example:9999"
max_attempts = 2
[mock]
facilitator_mode = "alternate"
[annotation]
count = 4
use_sdb = false
)");
  CHECK(cfg.experiment.discussions_per_cell == 2);
  CHECK(cfg.experiment.models == std::vector<std::string>{"m0"});
  REQUIRE(cfg.experiment.strategies.size() == 2);
  CHECK(cfg.experiment.strategies[1] == StrategyKind::RulesOnly);
  CHECK(cfg.experiment.master_seed == 7);
  CHECK(cfg.experiment.users_per_discussion == 7);  // untouched default
  CHECK(cfg.http.base_url == "http://example:9999");
  CHECK(cfg.http.max_attempts == 2);
  CHECK(cfg.mock.facilitator_mode == MockPolicy::FacilitatorMode::Alternate);
  CHECK(cfg.annotation.count == 4);
  CHECK(cfg.annotation.use_sdb == false);
}

TEST_CASE("unknown strategy names are rejected") {
  CHECK_THROWS_AS(AppConfig::from_toml("[experiment]\nstrategies = [\"Rules\"]\n"), Error);
}

TEST_CASE("personas_file replaces the built-in catalog") {
  test::TempDir dir("config");
  const auto path = dir.path() / "personas.jsonl";
  {
    std::ofstream out(path);
    for (const auto& p : test::make_catalog(9)) out << encode_jsonl(p) << "\n";
  }
  const AppConfig cfg = AppConfig::from_toml(
      "[experiment]\npersonas_file = \"personas.jsonl\"\nusers_per_discussion = 7\n",
      dir.path().string());
  CHECK(cfg.experiment.persona_catalog.size() == 9);
  CHECK(cfg.experiment.persona_catalog[0].username == "user_0");
}

TEST_CASE("validation names the offending field") {
  ExperimentConfig cfg = test::tiny_config();
  cfg.persona_catalog = test::make_catalog(5);
  cfg.users_per_discussion = 7;
  try {
    cfg.validate();
    FAIL("expected ConfigInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConfigInvalid);
    CHECK(std::string(e.what()).find("users_per_discussion") != std::string::npos);
  }

  cfg = test::tiny_config();
  cfg.troll_count = 4;
  cfg.veteran_count = 4;
  CHECK_THROWS_AS(cfg.validate(), Error);

  cfg = test::tiny_config();
  cfg.chain_probability = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("built-in catalog passes its own validation") {
  CHECK(validate_persona_catalog(default_persona_catalog()).empty());
}
