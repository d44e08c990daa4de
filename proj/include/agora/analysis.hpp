#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace agora {

struct AnalyzeOptions {
  // Human transcripts for the diversity baseline ({discussion_id, author, text} JSONL).
  std::optional<std::filesystem::path> human_corpus;
  // Externally annotated per-comment rows ({strategy, time, toxicity[, arg_quality]}
  // JSONL) to run the regression on, e.g. a published dataset mapped into this schema.
  std::optional<std::filesystem::path> external_table;
};

struct AnalyzeReport {
  std::size_t plans = 0;
  std::size_t completed = 0;
  std::size_t annotated_comments = 0;
  std::size_t diversity_rows = 0;
  std::size_t ndfu_rows = 0;
  bool moderated_runs = false;
  bool ols_toxicity_written = false;
  bool ols_argquality_written = false;
};

// Computes every metric over the run directory and writes the report files
// under <run_dir>/analysis/. Deterministic for fixed inputs.
AnalyzeReport run_analysis(const std::filesystem::path& run_dir, const AnalyzeOptions& options);

}  // namespace agora
