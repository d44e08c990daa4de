#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "agora/config.hpp"
#include "agora/domain.hpp"

namespace agora::test {

// Self-deleting temp directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("agora_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Persona make_persona(const std::string& username, int age = 30) {
  Persona p;
  p.username = username;
  p.age = age;
  p.gender = "female";
  p.education_level = "bachelor's degree";
  p.sexual_orientation = "heterosexual";
  p.demographic_group = "white American";
  p.current_employment = "teacher";
  p.special_instructions = "";
  p.personality_characteristics = {"curious", "direct"};
  return p;
}

inline std::vector<Persona> make_catalog(int n) {
  std::vector<Persona> catalog;
  for (int i = 0; i < n; ++i) {
    catalog.push_back(make_persona("user_" + std::to_string(i), 20 + i));
  }
  return catalog;
}

inline ExperimentConfig tiny_config(int models = 1, int strategies_n = 1, int n_d = 1) {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.models.resize(models);
  for (int i = 0; i < models; ++i) cfg.models[i] = "model_" + std::to_string(i);
  cfg.strategies.resize(strategies_n);
  cfg.discussions_per_cell = n_d;
  return cfg;
}

inline Comment make_comment(int index, const std::string& author, AuthorKind kind,
                            const std::string& text) {
  Comment c;
  c.index = index;
  c.author_id = author;
  c.author_kind = kind;
  c.text = text;
  c.timestamp = 1735689600 + 60 * index;
  return c;
}

inline Transcript make_transcript(const std::string& plan_id,
                                  const std::vector<std::string>& user_texts) {
  Transcript t;
  t.plan_id = plan_id;
  t.comments.push_back(make_comment(0, kSeedAuthorId, AuthorKind::SeedPost, "seed opinion"));
  int index = 1;
  for (const auto& text : user_texts) {
    t.comments.push_back(
        make_comment(index, "user_" + std::to_string(index % 3), AuthorKind::User, text));
    ++index;
  }
  t.status = TranscriptStatus::Complete;
  t.checkpoint_cursor = index;
  return t;
}

}  // namespace agora::test
