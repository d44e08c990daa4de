#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agora/domain.hpp"
#include "json.hpp"

namespace agora {

// Run directory layout.
struct RunPaths {
  std::filesystem::path root;

  std::filesystem::path plans() const { return root / "plans.jsonl"; }
  std::filesystem::path transcript(const std::string& plan_id) const {
    return root / "transcripts" / (plan_id + ".jsonl");
  }
  std::filesystem::path annotations(const std::string& job_id) const {
    return root / "annotations" / (job_id + ".jsonl");
  }
  std::filesystem::path annotation_manifest(const std::string& job_id) const {
    return root / "annotations" / (job_id + ".manifest.json");
  }
  std::filesystem::path logs() const { return root / "logs"; }
  std::filesystem::path analysis() const { return root / "analysis"; }
  std::filesystem::path exports() const { return root / "export"; }
};

// Append-only JSONL event streams with durable, line-atomic appends.
// One writer per stream; distinct streams are independent.
class EventStore {
 public:
  explicit EventStore(std::filesystem::path run_dir);
  ~EventStore();

  EventStore(const EventStore&) = delete;
  EventStore& operator=(const EventStore&) = delete;

  const std::filesystem::path& run_dir() const { return run_dir_; }

  // Appends one event and syncs it to disk before returning. The cursor is
  // the count of durable events in the stream. On first touch of an existing
  // stream any torn trailing line is discarded (crash recovery).
  std::uint64_t checkpoint_append(const std::string& stream_rel_path,
                                  const nlohmann::json& event);

  // Parses every complete line. A torn final line is dropped silently; an
  // unparseable non-final line raises CorruptStream.
  std::vector<nlohmann::json> read_stream(const std::string& stream_rel_path) const;

  bool stream_exists(const std::string& stream_rel_path) const;
  std::uint64_t stream_cursor(const std::string& stream_rel_path);
  void close_stream(const std::string& stream_rel_path);

 private:
  struct OpenStream {
    int fd = -1;
    std::uint64_t count = 0;
  };

  OpenStream& open_locked(const std::string& stream_rel_path);

  std::filesystem::path run_dir_;
  std::map<std::string, OpenStream> streams_;
  std::mutex mutex_;
};

// What a transcript stream replays to. Everything the engine needs to resume
// a discussion exactly where it stopped.
struct DiscussionProgress {
  Transcript transcript;
  std::uint64_t rng_draws = 0;    // cumulative draws recorded by the last event
  std::uint64_t event_count = 0;  // events appended so far
  int user_comments = 0;
  int user_turns_taken = 0;  // includes silent user turns
  int facilitator_interventions = 0;
  int facilitator_opportunities = 0;
  bool seed_posted = false;
};

DiscussionProgress replay_transcript_events(const std::string& plan_id,
                                            const std::vector<nlohmann::json>& events);

// Convenience: replays a transcript stream from disk (empty progress if the
// stream does not exist yet).
DiscussionProgress load_progress(const EventStore& store, const std::string& plan_id);

std::vector<DiscussionPlan> load_plans(const std::filesystem::path& plans_file);
std::vector<AnnotationRecord> load_annotations(const EventStore& store,
                                               const std::string& job_id);

// Flattens transcripts + annotations into export/comments.csv plus a manifest
// of seeds and completion state. Pure function of the run directory contents.
// Throws NoCompletedDiscussions when nothing completed.
void export_dataset(const std::filesystem::path& run_dir);

// Minimal human-transcript ingestion schema: JSONL of
// {discussion_id, author, text}; HTML tags are stripped on ingest.
struct HumanComment {
  std::string author;
  std::string text;
};
struct HumanDiscussion {
  std::string discussion_id;
  std::vector<HumanComment> comments;
};

std::string strip_html(const std::string& text);
std::vector<HumanDiscussion> load_human_corpus(const std::filesystem::path& path);

}  // namespace agora
