#include "agora/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "agora/errors.hpp"

namespace agora {

namespace {

[[noreturn]] void throw_io(const std::string& what, int err) {
  const Errc code = (err == ENOSPC)    ? Errc::StorageFull
                    : (err == EACCES || err == EPERM) ? Errc::PermissionDenied
                                       : Errc::PermissionDenied;
  throw Error(code, what + ": " + std::strerror(err));
}

bool parseable(const std::string& line) {
  return nlohmann::json::accept(line);
}

// Scans a stream file and returns (#durable events, byte size of the durable
// prefix). A crash leaves at most one torn trailing line: an unterminated
// tail, or a final terminated line that does not parse.
struct RecoveryScan {
  std::uint64_t count = 0;
  std::uint64_t durable_bytes = 0;
};

RecoveryScan scan_stream(const std::filesystem::path& path) {
  RecoveryScan scan;
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return scan;
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();

  std::size_t pos = 0;
  std::size_t last_bad_start = std::string::npos;
  while (pos < data.size()) {
    const std::size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) break;  // unterminated tail
    const std::string line = data.substr(pos, nl - pos);
    if (!line.empty() && parseable(line)) {
      ++scan.count;
      scan.durable_bytes = nl + 1;
      last_bad_start = std::string::npos;
    } else {
      // Tolerated only as the final line; flagged otherwise by readers.
      last_bad_start = pos;
    }
    pos = nl + 1;
  }
  if (last_bad_start != std::string::npos && last_bad_start < scan.durable_bytes) {
    throw Error(Errc::CorruptStream,
                path.string() + ": unparseable non-final line; manual intervention required");
  }
  return scan;
}

}  // namespace

EventStore::EventStore(std::filesystem::path run_dir) : run_dir_(std::move(run_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(run_dir_, ec);
  if (ec) throw Error(Errc::PermissionDenied, "cannot create run dir: " + run_dir_.string());
}

EventStore::~EventStore() {
  std::lock_guard lock(mutex_);
  for (auto& [name, stream] : streams_) {
    if (stream.fd >= 0) ::close(stream.fd);
  }
}

EventStore::OpenStream& EventStore::open_locked(const std::string& stream_rel_path) {
  auto it = streams_.find(stream_rel_path);
  if (it != streams_.end()) return it->second;

  const std::filesystem::path path = run_dir_ / stream_rel_path;
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);

  RecoveryScan scan = scan_stream(path);
  if (std::filesystem::exists(path) && std::filesystem::file_size(path) > scan.durable_bytes) {
    std::filesystem::resize_file(path, scan.durable_bytes, ec);
    if (ec) throw Error(Errc::CorruptStream, "cannot truncate torn line in " + path.string());
  }

  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw_io("open " + path.string(), errno);
  OpenStream stream;
  stream.fd = fd;
  stream.count = scan.count;
  return streams_.emplace(stream_rel_path, stream).first->second;
}

std::uint64_t EventStore::checkpoint_append(const std::string& stream_rel_path,
                                            const nlohmann::json& event) {
  std::lock_guard lock(mutex_);
  OpenStream& stream = open_locked(stream_rel_path);
  const std::string line = event.dump() + "\n";

  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(stream.fd, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_io("write " + stream_rel_path, errno);
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(stream.fd) != 0) throw_io("fsync " + stream_rel_path, errno);
  return ++stream.count;
}

std::vector<nlohmann::json> EventStore::read_stream(const std::string& stream_rel_path) const {
  const std::filesystem::path path = run_dir_ / stream_rel_path;
  std::vector<nlohmann::json> events;
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return events;
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();

  std::size_t pos = 0;
  while (pos < data.size()) {
    const std::size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) break;  // torn tail, dropped
    const std::string line = data.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    if (!parseable(line)) {
      if (pos >= data.size()) break;  // torn final line, dropped
      throw Error(Errc::CorruptStream,
                  path.string() + ": unparseable non-final line; manual intervention required");
    }
    events.push_back(nlohmann::json::parse(line));
  }
  return events;
}

bool EventStore::stream_exists(const std::string& stream_rel_path) const {
  return std::filesystem::exists(run_dir_ / stream_rel_path);
}

std::uint64_t EventStore::stream_cursor(const std::string& stream_rel_path) {
  std::lock_guard lock(mutex_);
  return open_locked(stream_rel_path).count;
}

void EventStore::close_stream(const std::string& stream_rel_path) {
  std::lock_guard lock(mutex_);
  auto it = streams_.find(stream_rel_path);
  if (it != streams_.end()) {
    if (it->second.fd >= 0) ::close(it->second.fd);
    streams_.erase(it);
  }
}

DiscussionProgress replay_transcript_events(const std::string& plan_id,
                                            const std::vector<nlohmann::json>& events) {
  DiscussionProgress progress;
  progress.transcript.plan_id = plan_id;
  progress.transcript.status = TranscriptStatus::InProgress;

  for (const auto& event : events) {
    const std::string type = event.at("type").get<std::string>();
    if (type == "seed") {
      progress.transcript.comments.push_back(event.at("comment").get<Comment>());
      progress.seed_posted = true;
    } else if (type == "user_comment") {
      progress.transcript.comments.push_back(event.at("comment").get<Comment>());
      ++progress.user_comments;
      ++progress.user_turns_taken;
    } else if (type == "user_silence") {
      ++progress.user_turns_taken;
    } else if (type == "facilitator_comment") {
      progress.transcript.comments.push_back(event.at("comment").get<Comment>());
      ++progress.facilitator_interventions;
      ++progress.facilitator_opportunities;
    } else if (type == "facilitator_silence") {
      ++progress.facilitator_opportunities;
    } else if (type == "status") {
      progress.transcript.status =
          transcript_status_from_string(event.at("status").get<std::string>());
    } else {
      throw Error(Errc::CorruptStream, plan_id + ": unknown event type '" + type + "'");
    }
    if (event.contains("draws")) progress.rng_draws = event.at("draws").get<std::uint64_t>();
    ++progress.event_count;
  }
  progress.transcript.checkpoint_cursor = static_cast<int>(progress.event_count);
  return progress;
}

DiscussionProgress load_progress(const EventStore& store, const std::string& plan_id) {
  const std::string rel = "transcripts/" + plan_id + ".jsonl";
  return replay_transcript_events(plan_id, store.read_stream(rel));
}

std::vector<DiscussionPlan> load_plans(const std::filesystem::path& plans_file) {
  std::ifstream in(plans_file);
  if (!in.good()) {
    throw Error(Errc::CorruptStream, "missing plan file: " + plans_file.string());
  }
  std::vector<DiscussionPlan> plans;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    plans.push_back(decode_jsonl<DiscussionPlan>(line));
  }
  return plans;
}

std::vector<AnnotationRecord> load_annotations(const EventStore& store,
                                               const std::string& job_id) {
  std::vector<AnnotationRecord> records;
  for (const auto& event : store.read_stream("annotations/" + job_id + ".jsonl")) {
    records.push_back(event.get<AnnotationRecord>());
  }
  return records;
}

std::string strip_html(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_tag = false;
  for (char c : text) {
    if (c == '<') {
      in_tag = true;
    } else if (c == '>' && in_tag) {
      in_tag = false;
    } else if (!in_tag) {
      out += c;
    }
  }
  return out;
}

std::vector<HumanDiscussion> load_human_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) {
    throw Error(Errc::ConfigInvalid, "human corpus not readable: " + path.string());
  }
  std::vector<HumanDiscussion> discussions;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::SerializationError,
                  path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string id = j.at("discussion_id").get<std::string>();
    auto [it, inserted] = index.try_emplace(id, discussions.size());
    if (inserted) discussions.push_back({id, {}});
    discussions[it->second].comments.push_back(
        {j.at("author").get<std::string>(), strip_html(j.at("text").get<std::string>())});
  }
  return discussions;
}

namespace {

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += "\"";
  return quoted;
}

}  // namespace

void export_dataset(const std::filesystem::path& run_dir) {
  const RunPaths paths{run_dir};
  EventStore store(run_dir);
  const auto plans = load_plans(paths.plans());

  struct Row {
    const DiscussionPlan* plan;
    Transcript transcript;
    std::vector<AnnotationRecord> records;
  };
  std::vector<Row> completed;
  std::set<std::string> annotator_ids;
  for (const auto& plan : plans) {
    auto progress = load_progress(store, plan.plan_id);
    if (progress.transcript.status != TranscriptStatus::Complete) continue;
    Row row{&plan, std::move(progress.transcript), load_annotations(store, plan.plan_id)};
    for (const auto& r : row.records) annotator_ids.insert(r.annotator_id);
    completed.push_back(std::move(row));
  }
  if (completed.empty()) {
    throw Error(Errc::NoCompletedDiscussions, "no completed discussions in " + run_dir.string());
  }
  if (annotator_ids.empty()) {
    std::fprintf(stderr, "warning: no annotations found; score columns will be empty\n");
  }

  std::filesystem::create_directories(paths.exports());
  std::ofstream csv(paths.exports() / "comments.csv", std::ios::binary);
  csv << "plan_id,strategy,model,comment_index,user_turn,author_kind,author_id,role,text";
  for (const auto& id : annotator_ids) csv << ",tox_" << id;
  for (const auto& id : annotator_ids) csv << ",aq_" << id;
  csv << ",mean_toxicity,mean_arg_quality\n";

  std::size_t row_count = 0;
  for (const auto& row : completed) {
    // Per-user role lookup for the role column.
    std::map<std::string, std::string> roles;
    for (const auto& user : row.plan->users) {
      roles[user.actor_id] = user.role ? to_string(user.role->kind) : "";
    }
    std::map<std::pair<int, std::string>, const AnnotationRecord*> by_key;
    for (const auto& r : row.records) by_key[{r.comment_index, r.annotator_id}] = &r;

    int user_turn = 0;
    for (const auto& comment : row.transcript.comments) {
      if (comment.author_kind == AuthorKind::SeedPost) continue;
      if (comment.author_kind == AuthorKind::User) ++user_turn;
      csv << csv_field(row.plan->plan_id) << ',' << to_string(row.plan->strategy_kind) << ','
          << csv_field(row.plan->model_ref) << ',' << comment.index << ','
          << (comment.author_kind == AuthorKind::User ? std::to_string(user_turn) : "") << ','
          << to_string(comment.author_kind) << ',' << csv_field(comment.author_id) << ','
          << (comment.author_kind == AuthorKind::User ? roles[comment.author_id] : "") << ','
          << csv_field(comment.text);

      double tox_sum = 0, aq_sum = 0;
      int tox_n = 0, aq_n = 0;
      std::string tox_cells, aq_cells;
      for (const auto& id : annotator_ids) {
        auto it = by_key.find({comment.index, id});
        const AnnotationRecord* r = it == by_key.end() ? nullptr : it->second;
        tox_cells += ',';
        aq_cells += ',';
        if (r && r->toxicity) {
          tox_cells += std::to_string(*r->toxicity);
          tox_sum += *r->toxicity;
          ++tox_n;
        }
        if (r && r->argument_quality) {
          aq_cells += std::to_string(*r->argument_quality);
          aq_sum += *r->argument_quality;
          ++aq_n;
        }
      }
      csv << tox_cells << aq_cells;
      char mean_buf[64];
      if (tox_n > 0) {
        std::snprintf(mean_buf, sizeof(mean_buf), "%.6f", tox_sum / tox_n);
        csv << ',' << mean_buf;
      } else {
        csv << ',';
      }
      if (aq_n > 0) {
        std::snprintf(mean_buf, sizeof(mean_buf), "%.6f", aq_sum / aq_n);
        csv << ',' << mean_buf;
      } else {
        csv << ',';
      }
      csv << '\n';
      ++row_count;
    }
  }
  csv.close();

  nlohmann::json manifest;
  manifest["plan_count"] = plans.size();
  nlohmann::json completed_ids = nlohmann::json::array();
  nlohmann::json seeds = nlohmann::json::object();
  for (const auto& row : completed) {
    completed_ids.push_back(row.plan->plan_id);
    seeds[row.plan->plan_id] = row.plan->rng_seed;
  }
  manifest["completed_plan_ids"] = completed_ids;
  manifest["rng_seeds"] = seeds;
  manifest["annotator_ids"] = std::vector<std::string>(annotator_ids.begin(), annotator_ids.end());
  manifest["comment_rows"] = row_count;
  std::ofstream mf(paths.exports() / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << "\n";
}

}  // namespace agora
