#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "agora/analysis.hpp"
#include "agora/annotation.hpp"
#include "agora/config.hpp"
#include "agora/dialogue_engine.hpp"
#include "agora/errors.hpp"
#include "agora/experiment_plan.hpp"
#include "agora/llm_gateway.hpp"
#include "agora/metrics.hpp"
#include "agora/store.hpp"
#include "spdlog/sinks/rotating_file_sink.h"
#include "spdlog/spdlog.h"

namespace fs = std::filesystem;
using namespace agora;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string run_dir = "run";
  std::optional<std::uint64_t> seed_override;
  std::string backend = "mock";  // mock | http
  bool dry_run = false;
  bool force = false;
  int parallel = 1;
};

AppConfig load_config(const GlobalOpts& opts) {
  AppConfig cfg = opts.config_path.empty() ? AppConfig{} : AppConfig::from_file(opts.config_path);
  if (opts.seed_override) cfg.experiment.master_seed = *opts.seed_override;
  return cfg;
}

std::shared_ptr<spdlog::logger> open_run_logger(const fs::path& run_dir) {
  const fs::path log_dir = run_dir / "logs";
  fs::create_directories(log_dir);
  const std::string name = "agora_run";
  if (auto existing = spdlog::get(name)) return existing;
  return spdlog::rotating_logger_mt(name, (log_dir / "run.log").string(),
                                    5 * 1024 * 1024, 3);
}

// Audit log of every HTTP exchange, one JSON line per completed call.
class JsonlAuditSink final : public AuditSink {
 public:
  explicit JsonlAuditSink(const fs::path& path) : out_(path, std::ios::app | std::ios::binary) {}

  void record(const ChatRequest& request, const ChatResponse& response) override {
    nlohmann::json line{
        {"actor_id", request.meta.actor_id},
        {"turn_index", request.meta.turn_index},
        {"payload", wire_payload(request)},
        {"response_text", response.text},
        {"attempts", response.attempts},
        {"latency_ms", response.latency.count()},
        {"prompt_tokens", response.prompt_tokens},
        {"completion_tokens", response.completion_tokens},
    };
    std::lock_guard lock(mutex_);
    out_ << line.dump() << "\n";
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::mutex mutex_;
};

struct BackendBundle {
  std::unique_ptr<Backend> backend;
  std::unique_ptr<JsonlAuditSink> audit;
  std::unique_ptr<Clock> clock;
};

BackendBundle make_backend(const GlobalOpts& opts, const AppConfig& cfg) {
  BackendBundle bundle;
  if (opts.backend == "mock") {
    bundle.backend = std::make_unique<MockBackend>(cfg.mock);
    bundle.clock = std::make_unique<SimulatedClock>();
  } else if (opts.backend == "http") {
    fs::create_directories(fs::path(opts.run_dir) / "logs");
    bundle.audit =
        std::make_unique<JsonlAuditSink>(fs::path(opts.run_dir) / "logs" / "audit.jsonl");
    bundle.backend = std::make_unique<HttpBackend>(cfg.http, bundle.audit.get());
    bundle.clock = std::make_unique<WallClock>();
  } else {
    throw Error(Errc::UsageError, "unknown backend '" + opts.backend + "' (use mock|http)");
  }
  return bundle;
}

// True when any input file is newer than the stamp.
bool inputs_newer_than(const fs::path& stamp, const std::vector<fs::path>& inputs) {
  if (!fs::exists(stamp)) return true;
  const auto stamp_time = fs::last_write_time(stamp);
  for (const auto& input : inputs) {
    if (!fs::exists(input)) continue;
    if (fs::is_directory(input)) {
      for (const auto& entry : fs::recursive_directory_iterator(input)) {
        if (entry.is_regular_file() && entry.last_write_time() > stamp_time) return true;
      }
    } else if (fs::last_write_time(input) > stamp_time) {
      return true;
    }
  }
  return false;
}

void touch(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << "stamp\n";
}

int cmd_plan(const GlobalOpts& opts) {
  const AppConfig cfg = load_config(opts);
  const RunPaths paths{fs::path(opts.run_dir)};
  fs::create_directories(paths.root);

  if (fs::exists(paths.plans()) && !opts.force) {
    std::fprintf(stderr, "plans.jsonl exists; skipping (use --force to regenerate)\n");
    return 0;
  }
  const auto plans = generate_plans(cfg.experiment);
  std::ofstream out(paths.plans(), std::ios::binary | std::ios::trunc);
  for (const auto& plan : plans) out << encode_jsonl(plan) << "\n";
  std::fprintf(stderr, "%zu plans written to %s\n", plans.size(), paths.plans().c_str());
  return 0;
}

int cmd_run(const GlobalOpts& opts) {
  const AppConfig cfg = load_config(opts);
  const RunPaths paths{fs::path(opts.run_dir)};
  const auto plans = load_plans(paths.plans());

  RunOptions run_options;
  run_options.context_window_h = cfg.experiment.context_window_h;
  run_options.chain_probability = cfg.experiment.chain_probability;
  run_options.sampling = cfg.sampling;

  if (opts.dry_run) {
    // Print the would-be request for the next turn of the first pending plan;
    // no backend is constructed and no network call happens.
    for (const auto& plan : plans) {
      EventStore store(paths.root);
      const auto progress = load_progress(store, plan.plan_id);
      if (progress.transcript.status == TranscriptStatus::Complete) continue;
      TurnState state(plan.rng_seed);
      state.comments = progress.transcript.comments;
      std::vector<std::string> participants;
      for (const auto& u : plan.users) participants.push_back(u.actor_id);
      if (!progress.seed_posted) {
        Comment seed;
        seed.index = 0;
        seed.author_id = kSeedAuthorId;
        seed.author_kind = AuthorKind::SeedPost;
        seed.text = plan.seed_opinion;
        state.comments.push_back(seed);
      }
      const SpeakerChoice choice =
          next_speaker(state, participants, cfg.experiment.chain_probability);
      const ActorSpec* actor = nullptr;
      for (const auto& u : plan.users) {
        if (u.actor_id == choice.actor_id) actor = &u;
      }
      PromptContext ctx{plan.rng_seed, progress.user_turns_taken + 1, cfg.sampling};
      const auto window = context_window(state.comments, cfg.experiment.context_window_h);
      const ChatRequest request = build_user_prompt(*actor, window, plan.seed_opinion, ctx);
      std::printf("%s\n", wire_payload(request).dump(2).c_str());
      return 0;
    }
    std::fprintf(stderr, "nothing to run: all plans complete\n");
    return 0;
  }

  auto bundle = make_backend(opts, cfg);
  run_options.clock = bundle.clock.get();
  run_options.logger = open_run_logger(paths.root);

  EventStore store(paths.root);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> completed{0}, skipped{0}, failed{0};
  std::mutex error_mutex;
  std::string first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plans.size()) return;
      const auto& plan = plans[i];
      try {
        const std::string stream = "transcripts/" + plan.plan_id + ".jsonl";
        if (opts.force && store.stream_exists(stream)) {
          store.close_stream(stream);
          fs::remove(paths.transcript(plan.plan_id));
        }
        const auto progress = load_progress(store, plan.plan_id);
        if (progress.transcript.status == TranscriptStatus::Complete) {
          ++skipped;
          continue;
        }
        run_discussion(plan, *bundle.backend, store, run_options);
        ++completed;
      } catch (const std::exception& e) {
        ++failed;
        std::lock_guard lock(error_mutex);
        if (first_error.empty()) first_error = e.what();
      }
    }
  };

  const int threads = std::max(1, opts.parallel);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::fprintf(stderr, "run finished: %zu completed, %zu already complete, %zu failed\n",
               completed.load(), skipped.load(), failed.load());
  if (failed > 0) {
    std::fprintf(stderr, "{\"error\":\"BackendUnreachable\",\"detail\":\"%s\"}\n",
                 first_error.c_str());
    return 1;
  }
  return 0;
}

int cmd_annotate(const GlobalOpts& opts, int annotator_count_override) {
  const AppConfig cfg = load_config(opts);
  const RunPaths paths{fs::path(opts.run_dir)};
  const auto plans = load_plans(paths.plans());

  const int count =
      annotator_count_override > 0 ? annotator_count_override : cfg.annotation.count;
  const std::string model = !cfg.annotation.model_ref.empty() ? cfg.annotation.model_ref
                                                              : cfg.experiment.models.front();
  const auto annotators = make_annotators(
      count, model, cfg.annotation.use_sdb ? cfg.experiment.persona_catalog : std::vector<Persona>{});

  EventStore store(paths.root);

  if (opts.dry_run) {
    for (const auto& plan : plans) {
      const auto progress = load_progress(store, plan.plan_id);
      if (progress.transcript.status != TranscriptStatus::Complete) continue;
      for (const auto& comment : progress.transcript.comments) {
        if (comment.author_kind == AuthorKind::SeedPost || comment.text.empty()) continue;
        std::vector<Comment> prefix(progress.transcript.comments.begin(),
                                    progress.transcript.comments.begin() + comment.index + 1);
        const auto window = context_window(prefix, cfg.experiment.context_window_h);
        AnnotationContext ctx{plan.rng_seed, cfg.sampling, cfg.experiment.context_window_h};
        std::string system = annotators.front().instruction;
        ChatRequest request;
        request.model_ref = annotators.front().model_ref;
        request.messages = {{MsgRole::System, system},
                            {MsgRole::User, render_context(plan.seed_opinion, window)}};
        std::printf("%s\n", wire_payload(request).dump(2).c_str());
        return 0;
      }
    }
    std::fprintf(stderr, "nothing to annotate: no completed transcripts\n");
    return 0;
  }

  auto bundle = make_backend(opts, cfg);

  std::size_t jobs = 0, records = 0, skipped = 0;
  for (const auto& plan : plans) {
    const auto progress = load_progress(store, plan.plan_id);
    if (progress.transcript.status != TranscriptStatus::Complete) {
      ++skipped;
      continue;
    }
    AnnotateOptions options;
    options.ctx.sampling_seed = plan.rng_seed;
    options.ctx.sampling = cfg.sampling;
    options.ctx.context_window_h = cfg.experiment.context_window_h;
    options.parallelism = std::max(1, opts.parallel);
    const auto out = annotate_transcript(progress.transcript, annotators, plan.seed_opinion,
                                         *bundle.backend, store, options);
    records += out.size();
    ++jobs;
  }
  std::fprintf(stderr, "annotated %zu transcripts (%zu records); %zu not yet complete\n", jobs,
               records, skipped);
  return 0;
}

int cmd_analyze(const GlobalOpts& opts, const std::string& human_path,
                const std::string& external_path) {
  const RunPaths paths{fs::path(opts.run_dir)};
  const fs::path stamp = paths.analysis() / ".stamp";
  const std::vector<fs::path> inputs = {paths.plans(), paths.root / "transcripts",
                                        paths.root / "annotations"};
  if (!opts.force && !inputs_newer_than(stamp, inputs)) {
    std::fprintf(stderr, "analysis up to date; skipping (use --force to recompute)\n");
    return 0;
  }

  AnalyzeOptions options;
  if (!human_path.empty()) options.human_corpus = fs::path(human_path);
  if (!external_path.empty()) options.external_table = fs::path(external_path);
  const AnalyzeReport report = run_analysis(paths.root, options);
  touch(stamp);

  std::fprintf(stderr,
               "analysis written to %s: %zu plans (%zu complete), %zu annotated comments, "
               "%zu diversity rows, %zu ndfu rows\n",
               paths.analysis().c_str(), report.plans, report.completed,
               report.annotated_comments, report.diversity_rows, report.ndfu_rows);
  if (!report.moderated_runs) {
    std::fprintf(stderr, "no moderated discussions\n");
  }
  return 0;
}

int cmd_export(const GlobalOpts& opts) {
  const RunPaths paths{fs::path(opts.run_dir)};
  const fs::path stamp = paths.exports() / ".stamp";
  const std::vector<fs::path> inputs = {paths.plans(), paths.root / "transcripts",
                                        paths.root / "annotations"};
  if (!opts.force && !inputs_newer_than(stamp, inputs)) {
    std::fprintf(stderr, "export up to date; skipping (use --force to re-export)\n");
    return 0;
  }
  export_dataset(paths.root);
  touch(stamp);
  std::fprintf(stderr, "dataset exported to %s\n", paths.exports().c_str());
  return 0;
}

int cmd_validate(const GlobalOpts& opts) {
  const AppConfig cfg = load_config(opts);
  const auto violations = validate_persona_catalog(cfg.experiment.persona_catalog);
  for (const auto& v : violations) {
    std::fprintf(stderr, "persona '%s' field %s: %s (%s)\n", v.username.c_str(), v.field.c_str(),
                 v.code.c_str(), v.detail.c_str());
  }
  try {
    cfg.experiment.validate();
  } catch (const Error& e) {
    std::fprintf(stderr, "{\"error\":\"%s\",\"detail\":\"config invalid\"}\n",
                 to_string(e.code()));
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  if (!violations.empty()) {
    std::fprintf(stderr, "{\"error\":\"ConfigInvalid\",\"detail\":\"persona catalog invalid\"}\n");
    return 1;
  }
  std::fprintf(stderr, "configuration OK: %zu personas, %zu opinions, %zu strategies, %zu models\n",
               cfg.experiment.persona_catalog.size(), cfg.experiment.seed_opinions.size(),
               cfg.experiment.strategies.size(), cfg.experiment.models.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic facilitated-discussion engine"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts opts;
  app.add_option("--config", opts.config_path, "TOML config file");
  app.add_option("--run-dir", opts.run_dir, "run directory (default: ./run)");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "override master seed");
  app.add_option("--backend", opts.backend, "mock|http (default mock)");
  app.add_flag("--dry-run", opts.dry_run, "print the would-be request for one turn and exit");
  app.add_flag("--force", opts.force, "recompute outputs that already exist");
  app.add_option("--parallel", opts.parallel, "worker threads for run/annotate");

  auto* plan_cmd = app.add_subcommand("plan", "generate discussion plans from config");
  auto* run_cmd = app.add_subcommand("run", "execute planned discussions (resumable)");
  auto* annotate_cmd = app.add_subcommand("annotate", "annotate completed transcripts (resumable)");
  int annotators_override = 0;
  annotate_cmd->add_option("--annotators", annotators_override, "annotator count override");
  auto* analyze_cmd = app.add_subcommand("analyze", "compute metrics and reports");
  std::string human_path, external_path;
  analyze_cmd->add_option("--human", human_path, "human transcripts JSONL for diversity baseline");
  analyze_cmd->add_option("--external-table", external_path,
                          "externally annotated rows JSONL for the regression");
  auto* export_cmd = app.add_subcommand("export", "export the flat dataset bundle");
  auto* validate_cmd = app.add_subcommand("validate", "lint config and persona catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (seed_opt->count() > 0) opts.seed_override = seed_value;

  try {
    if (plan_cmd->parsed()) return cmd_plan(opts);
    if (run_cmd->parsed()) return cmd_run(opts);
    if (annotate_cmd->parsed()) return cmd_annotate(opts, annotators_override);
    if (analyze_cmd->parsed()) return cmd_analyze(opts, human_path, external_path);
    if (export_cmd->parsed()) return cmd_export(opts);
    if (validate_cmd->parsed()) return cmd_validate(opts);
  } catch (const Error& e) {
    nlohmann::json err{{"error", to_string(e.code())}, {"detail", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", "InternalError"}, {"detail", e.what()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
  return 0;
}
