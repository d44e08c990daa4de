#include "agora/annotation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <future>

#include "agora/dialogue_engine.hpp"
#include "agora/errors.hpp"
#include "agora/prompts.hpp"

namespace agora {

std::vector<AnnotatorSpec> make_annotators(int count, const std::string& model_ref,
                                           const std::vector<Persona>& sdb_catalog) {
  std::vector<AnnotatorSpec> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    AnnotatorSpec spec;
    char id[32];
    std::snprintf(id, sizeof(id), "annotator_%02d", i);
    spec.annotator_id = id;
    spec.model_ref = model_ref;
    spec.instruction = prompts::annotator_instruction();
    if (!sdb_catalog.empty()) spec.persona = sdb_catalog[i % sdb_catalog.size()];
    check_annotator(spec);
    out.push_back(std::move(spec));
  }
  return out;
}

void check_annotator(const AnnotatorSpec& annotator) {
  std::string lower = annotator.instruction;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  const bool has_toxicity = lower.find("toxicity") != std::string::npos;
  const bool has_argq = lower.find("argument quality") != std::string::npos ||
                        lower.find("argumentquality") != std::string::npos;
  if (!has_toxicity || !has_argq) {
    throw Error(Errc::InvalidRequest,
                "annotator instruction must define both rating scales: " + annotator.annotator_id);
  }
}

namespace {

// First "<label><sep><integer>" occurrence after `pos`, scanning
// case-insensitively. Returns the parsed integer or nullopt.
std::optional<long> scan_labelled_int(const std::string& lower, const std::string& label) {
  std::size_t pos = 0;
  while ((pos = lower.find(label, pos)) != std::string::npos) {
    std::size_t p = pos + label.size();
    while (p < lower.size() && (lower[p] == ' ' || lower[p] == '\t')) ++p;
    if (p < lower.size() && (lower[p] == '=' || lower[p] == ':')) {
      ++p;
      while (p < lower.size() && (lower[p] == ' ' || lower[p] == '\t')) ++p;
      bool neg = false;
      if (p < lower.size() && lower[p] == '-') {
        neg = true;
        ++p;
      }
      if (p < lower.size() && std::isdigit(static_cast<unsigned char>(lower[p]))) {
        long value = 0;
        while (p < lower.size() && std::isdigit(static_cast<unsigned char>(lower[p]))) {
          value = value * 10 + (lower[p] - '0');
          ++p;
        }
        return neg ? -value : value;
      }
    }
    pos += label.size();
  }
  return std::nullopt;
}

std::optional<int> in_scale(std::optional<long> value) {
  if (!value || *value < 1 || *value > 5) return std::nullopt;
  return static_cast<int>(*value);
}

std::string to_lower(const std::string& s) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower;
}

}  // namespace

ParsedScores parse_scores(const std::string& text) {
  const std::string lower = to_lower(text);
  ParsedScores scores;
  scores.toxicity = in_scale(scan_labelled_int(lower, "toxicity"));
  // Accept "argumentquality", "argument quality" and "argument_quality".
  auto argq = scan_labelled_int(lower, "argumentquality");
  if (!argq) argq = scan_labelled_int(lower, "argument quality");
  if (!argq) argq = scan_labelled_int(lower, "argument_quality");
  scores.argument_quality = in_scale(argq);
  return scores;
}

AnnotationRecord annotate_comment(const AnnotatorSpec& annotator,
                                  const std::vector<const Comment*>& window,
                                  const std::string& seed_opinion, const std::string& plan_id,
                                  Backend& backend, const AnnotationContext& ctx) {
  if (window.empty() || window.back()->text.empty()) {
    throw Error(Errc::InvalidRequest, "annotation target must be a non-empty comment");
  }
  const Comment& target = *window.back();

  std::string system = annotator.instruction;
  if (annotator.persona) system += "\n\n" + prompts::render_sdb(*annotator.persona);

  ChatRequest request;
  request.model_ref = annotator.model_ref;
  request.messages = {{MsgRole::System, system},
                      {MsgRole::User, render_context(seed_opinion, window)}};
  request.sampling_seed = ctx.sampling_seed;
  request.max_tokens = ctx.sampling.max_tokens;
  request.temperature = ctx.sampling.temperature;
  request.meta.actor_id = annotator.annotator_id;
  request.meta.turn_index = target.index;
  request.meta.kind = RequestMeta::Kind::Annotation;

  const ChatResponse response = backend.complete(request);
  const ParsedScores scores = parse_scores(response.text);

  AnnotationRecord record;
  record.plan_id = plan_id;
  record.comment_index = target.index;
  record.annotator_id = annotator.annotator_id;
  record.toxicity = scores.toxicity;
  record.argument_quality = scores.argument_quality;
  record.raw_response = response.text;
  return record;
}

std::vector<AnnotationRecord> annotate_transcript(const Transcript& transcript,
                                                  const std::vector<AnnotatorSpec>& annotators,
                                                  const std::string& seed_opinion,
                                                  Backend& backend, EventStore& store,
                                                  const AnnotateOptions& options) {
  if (transcript.status != TranscriptStatus::Complete) {
    throw Error(Errc::InvalidRequest, "transcript must be Complete: " + transcript.plan_id);
  }
  for (const auto& a : annotators) check_annotator(a);

  // Task order is fixed (comment-major, annotator-minor) so the record file
  // is deterministic and resuming is a simple prefix skip.
  struct Task {
    const Comment* target;
    const AnnotatorSpec* annotator;
  };
  std::vector<Task> tasks;
  for (const Comment& comment : transcript.comments) {
    if (comment.author_kind == AuthorKind::SeedPost) continue;
    if (comment.text.empty()) continue;
    for (const auto& annotator : annotators) tasks.push_back({&comment, &annotator});
  }

  const std::string stream = "annotations/" + transcript.plan_id + ".jsonl";
  auto existing = load_annotations(store, transcript.plan_id);
  std::vector<AnnotationRecord> records = existing;
  std::size_t done = existing.size();
  if (done > tasks.size()) {
    throw Error(Errc::CorruptStream,
                stream + ": more records than annotatable (annotator, comment) pairs");
  }

  // Job manifest: annotator specs and the expected record count.
  {
    nlohmann::json manifest;
    manifest["plan_id"] = transcript.plan_id;
    manifest["expected_records"] = tasks.size();
    nlohmann::json specs = nlohmann::json::array();
    for (const auto& a : annotators) {
      nlohmann::json spec{{"annotator_id", a.annotator_id}, {"model_ref", a.model_ref}};
      if (a.persona) spec["persona"] = a.persona->username;
      specs.push_back(spec);
    }
    manifest["annotators"] = specs;
    const RunPaths paths{store.run_dir()};
    std::filesystem::create_directories(paths.annotations(transcript.plan_id).parent_path());
    std::ofstream mf(paths.annotation_manifest(transcript.plan_id), std::ios::binary);
    mf << manifest.dump(2) << "\n";
  }

  auto run_task = [&](const Task& task) {
    // The annotator's window ends at the target comment.
    std::vector<Comment> prefix(transcript.comments.begin(),
                                transcript.comments.begin() + task.target->index + 1);
    auto window = context_window(prefix, options.ctx.context_window_h);
    return annotate_comment(*task.annotator, window, seed_opinion, transcript.plan_id, backend,
                            options.ctx);
  };

  const int parallelism = std::max(1, options.parallelism);
  std::size_t next = done;
  while (next < tasks.size()) {
    const std::size_t chunk = std::min<std::size_t>(parallelism, tasks.size() - next);
    std::vector<std::future<AnnotationRecord>> futures;
    futures.reserve(chunk);
    for (std::size_t i = 0; i < chunk; ++i) {
      const Task& task = tasks[next + i];
      if (chunk == 1) {
        futures.push_back(std::async(std::launch::deferred, run_task, task));
      } else {
        futures.push_back(std::async(std::launch::async, run_task, task));
      }
    }
    // Commit in task order regardless of completion order.
    for (auto& f : futures) {
      AnnotationRecord record = f.get();
      store.checkpoint_append(stream, record);
      records.push_back(std::move(record));
    }
    next += chunk;
  }
  return records;
}

}  // namespace agora
