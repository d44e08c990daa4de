#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agora/config.hpp"
#include "agora/domain.hpp"
#include "agora/llm_gateway.hpp"
#include "agora/store.hpp"

namespace agora {

struct AnnotatorSpec {
  std::string annotator_id;
  std::optional<Persona> persona;  // absent = identical annotators
  std::string model_ref;
  std::string instruction;
};

// The default ensemble: ids annotator_00.., shared instruction, optional SDB
// conditioning from the catalog.
std::vector<AnnotatorSpec> make_annotators(int count, const std::string& model_ref,
                                           const std::vector<Persona>& sdb_catalog = {});

// Throws InvalidRequest when the instruction lacks either rating scale.
void check_annotator(const AnnotatorSpec& annotator);

struct ParsedScores {
  std::optional<int> toxicity;
  std::optional<int> argument_quality;
};

// Case-insensitive scan for "Toxicity" and "ArgumentQuality" (or
// "Argument Quality") followed by '=' or ':' and an integer. First match
// wins; integers outside [1,5] are Invalid.
ParsedScores parse_scores(const std::string& text);

struct AnnotationContext {
  std::uint64_t sampling_seed = 0;
  SamplingConfig sampling;
  int context_window_h = 3;
};

// One annotator's verdict on the window's final comment. Parse failures
// become Invalid records with the raw response preserved; nothing throws for
// content reasons.
AnnotationRecord annotate_comment(const AnnotatorSpec& annotator,
                                  const std::vector<const Comment*>& window,
                                  const std::string& seed_opinion, const std::string& plan_id,
                                  Backend& backend, const AnnotationContext& ctx);

struct AnnotateOptions {
  AnnotationContext ctx;
  int parallelism = 1;
};

// One record per (annotator, annotatable comment), annotatable = every
// non-empty comment excluding the seed post. Records are persisted
// incrementally to annotations/<plan_id>.jsonl and the job resumes from the
// last durable record.
std::vector<AnnotationRecord> annotate_transcript(const Transcript& transcript,
                                                  const std::vector<AnnotatorSpec>& annotators,
                                                  const std::string& seed_opinion,
                                                  Backend& backend, EventStore& store,
                                                  const AnnotateOptions& options);

}  // namespace agora
