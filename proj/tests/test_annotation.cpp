#include <filesystem>
#include <fstream>

#include "agora/annotation.hpp"
#include "agora/errors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace agora;

namespace {

struct FuzzCase {
  const char* input;
  std::optional<int> toxicity;
  std::optional<int> argument_quality;
};

constexpr std::optional<int> X = std::nullopt;

// Response-shape corpus: canonical outputs, case/spacing/punctuation variants,
// reordered fields, out-of-range integers, refusals and junk.
const FuzzCase kFuzzCorpus[] = {
    {"Toxicity=4\nArgumentQuality=1", 4, 1},
    {"Toxicity=2 ArgumentQuality=4", 2, 4},
    {"toxicity = 3, ArgumentQuality=5", 3, 5},
    {"TOXICITY=1\nARGUMENTQUALITY=2", 1, 2},
    {"Toxicity: 5\nArgumentQuality: 5", 5, 5},
    {"toxicity:4 argumentquality:2", 4, 2},
    {"Toxicity =  2\nArgument Quality = 3", 2, 3},
    {"argument quality: 3 and then Toxicity: 1", 1, 3},
    {"ArgumentQuality=3 ... Toxicity=1", 1, 3},
    {"Argument_Quality=2; Toxicity=2", 2, 2},
    {"  toxicity=5  \n  argumentquality=1  ", 5, 1},
    {"The toxicity=3 here, while argument quality=4 overall", 3, 4},
    {"Toxicity=4", 4, X},
    {"ArgumentQuality=2", X, 2},
    {"Toxicity=9", X, X},
    {"Toxicity=0\nArgumentQuality=3", X, 3},
    {"Toxicity=6 ArgumentQuality=6", X, X},
    {"Toxicity=-1 ArgumentQuality=2", X, 2},
    {"Toxicity=42 ArgumentQuality=1", X, 1},
    {"Toxicity= ArgumentQuality=", X, X},
    {"Toxicity equals four", X, X},
    {"I cannot annotate this.", X, X},
    {"As an AI, I must decline to rate this conversation.", X, X},
    {"", X, X},
    {"      ", X, X},
    {"Toxicity\nArgumentQuality", X, X},
    {"Toxicity=3.5 ArgumentQuality=2", 3, 2},  // integer prefix wins
    {"toxicity=2toxicity=5 argumentquality=4", 2, 4},
    {"Toxicity=2 Toxicity=5 ArgumentQuality=4", 2, 4},  // first match wins
    {"ArgumentQuality=4 ArgumentQuality=1 Toxicity=3", 3, 4},
    {"tox=2 argq=4", X, X},
    {"Toxicity:=2 ArgumentQuality=1", X, 1},
    {"Toxicity = 005 ArgumentQuality = 001", 5, 1},
    {"Rating: Toxicity=1; ArgumentQuality=5. Good discussion!", 1, 5},
    {"**Toxicity=2**\n**ArgumentQuality=2**", 2, 2},
    {"Output:\nToxicity=4\nArgumentQuality=1", 4, 1},
    {"toxicity\t=\t3\nargument quality\t:\t3", 3, 3},
    {"The conversation was toxic.", X, X},
    {"Toxicity=1e5 ArgumentQuality=2", 1, 2},  // integer prefix 1
    {"argumentquality=2 then argument quality=5; toxicity=4", 4, 2},
    {"TOXICITY: 4 ARGUMENT QUALITY: 4", 4, 4},
    {"toxicity=3\n\n\nargumentquality=3", 3, 3},
    {"[Toxicity=5] [ArgumentQuality=1]", 5, 1},
    {"toxicity =4 argument_quality =3", 4, 3},
    {"I rate toxicity: 2 and argument quality: 2", 2, 2},
    {"Toxicity=  1\nArgumentQuality=  4", 1, 4},
    {"Toxicity== 3 ArgumentQuality=2", X, 2},
    {"Toxicity<4> ArgumentQuality<2>", X, X},
    {"toxicити=4 argumentquality=2", X, 2},  // corrupted label
    {"Toxicity=4 and the argument quality is high", 4, X},
    {"Not rating. Toxicity=2 though. ArgumentQuality: 4?", 2, 4},
    {"5=Toxicity 1=ArgumentQuality", X, X},
};

}  // namespace

TEST_CASE("parse_scores handles the full response-shape corpus") {
  int cases = 0;
  for (const auto& fuzz : kFuzzCorpus) {
    CAPTURE(fuzz.input);
    const ParsedScores scores = parse_scores(fuzz.input);
    CHECK(scores.toxicity == fuzz.toxicity);
    CHECK(scores.argument_quality == fuzz.argument_quality);
    // Every outcome is in range or Invalid.
    if (scores.toxicity) CHECK((*scores.toxicity >= 1 && *scores.toxicity <= 5));
    if (scores.argument_quality)
      CHECK((*scores.argument_quality >= 1 && *scores.argument_quality <= 5));
    ++cases;
  }
  CHECK(cases >= 50);
}

TEST_CASE("annotator instructions must define both scales") {
  AnnotatorSpec bad;
  bad.annotator_id = "a";
  bad.instruction = "Rate the toxicity from 1 to 5.";
  CHECK_THROWS_AS(check_annotator(bad), Error);
  bad.instruction = "Rate the argument quality from 1 to 5.";
  CHECK_THROWS_AS(check_annotator(bad), Error);
  CHECK_NOTHROW(check_annotator(make_annotators(1, "m").front()));
}

TEST_CASE("annotate_transcript produces |annotators| x |annotatable| records") {
  test::TempDir dir("annot");
  const Transcript transcript =
      test::make_transcript("plan_7", {"first comment", "second comment", "third comment"});
  const auto annotators = make_annotators(2, "model_a");
  MockBackend backend;
  EventStore store(dir.path());
  AnnotateOptions options;
  const auto records =
      annotate_transcript(transcript, annotators, "seed opinion", backend, store, options);
  CHECK(records.size() == 6);
  // comment-major order, annotator-minor
  CHECK(records[0].comment_index == 1);
  CHECK(records[0].annotator_id == "annotator_00");
  CHECK(records[1].comment_index == 1);
  CHECK(records[1].annotator_id == "annotator_01");
  CHECK(records[5].comment_index == 3);
  for (const auto& r : records) {
    CHECK(r.plan_id == "plan_7");
    CHECK(r.valid());
  }
}

TEST_CASE("seed post and empty comments are not annotatable") {
  test::TempDir dir("annot_seed");
  Transcript transcript = test::make_transcript("plan_8", {"a comment"});
  Comment empty = test::make_comment(2, "facilitator", AuthorKind::Facilitator, "");
  transcript.comments.push_back(empty);
  const auto annotators = make_annotators(3, "model_a");
  MockBackend backend;
  EventStore store(dir.path());
  const auto records =
      annotate_transcript(transcript, annotators, "seed", backend, store, AnnotateOptions{});
  CHECK(records.size() == 3);  // only the single real comment
  for (const auto& r : records) CHECK(r.comment_index == 1);
}

TEST_CASE("incomplete transcripts are rejected") {
  test::TempDir dir("annot_incomplete");
  Transcript transcript = test::make_transcript("plan_9", {"x"});
  transcript.status = TranscriptStatus::InProgress;
  MockBackend backend;
  EventStore store(dir.path());
  CHECK_THROWS_AS(annotate_transcript(transcript, make_annotators(1, "m"), "seed", backend, store,
                                      AnnotateOptions{}),
                  Error);
}

TEST_CASE("annotation jobs resume without duplicating records") {
  const Transcript transcript = test::make_transcript(
      "plan_10", {"one", "two", "three", "four", "five"});
  const auto annotators = make_annotators(3, "model_a");

  // Uninterrupted reference run.
  test::TempDir full_dir("annot_full");
  {
    MockBackend backend;
    EventStore store(full_dir.path());
    annotate_transcript(transcript, annotators, "seed", backend, store, AnnotateOptions{});
  }
  std::ifstream full_in(full_dir.path() / "annotations" / "plan_10.jsonl", std::ios::binary);
  std::ostringstream full_buf;
  full_buf << full_in.rdbuf();
  const std::string reference = full_buf.str();

  // Interrupted run: keep only the first 7 records, then resume.
  test::TempDir part_dir("annot_part");
  {
    MockBackend backend;
    EventStore store(part_dir.path());
    annotate_transcript(transcript, annotators, "seed", backend, store, AnnotateOptions{});
  }
  const auto stream_path = part_dir.path() / "annotations" / "plan_10.jsonl";
  {
    std::ifstream in(stream_path, std::ios::binary);
    std::string line, kept;
    for (int i = 0; i < 7 && std::getline(in, line); ++i) kept += line + "\n";
    // Simulate a crash mid-write of record 8.
    kept += "{\"plan_id\": \"plan_10\", \"comment";
    std::ofstream out(stream_path, std::ios::binary | std::ios::trunc);
    out << kept;
  }
  {
    MockBackend backend;
    EventStore store(part_dir.path());
    const auto records =
        annotate_transcript(transcript, annotators, "seed", backend, store, AnnotateOptions{});
    CHECK(records.size() == 15);
  }
  std::ifstream part_in(stream_path, std::ios::binary);
  std::ostringstream part_buf;
  part_buf << part_in.rdbuf();
  CHECK(part_buf.str() == reference);
}

TEST_CASE("identical annotators yield identical records per comment") {
  test::TempDir dir("annot_identical");
  const Transcript transcript = test::make_transcript("plan_11", {"steady text"});
  // Same annotator id => same mock key; no SDBs, so prompts coincide too.
  std::vector<AnnotatorSpec> annotators;
  for (int i = 0; i < 10; ++i) {
    auto spec = make_annotators(1, "model_a").front();
    annotators.push_back(spec);
  }
  MockBackend backend;
  EventStore store(dir.path());
  const auto records =
      annotate_transcript(transcript, annotators, "seed", backend, store, AnnotateOptions{});
  REQUIRE(records.size() == 10);
  for (const auto& r : records) {
    CHECK(r.toxicity == records[0].toxicity);
    CHECK(r.argument_quality == records[0].argument_quality);
  }
}

TEST_CASE("refusal responses become Invalid records with raw text preserved") {
  test::TempDir dir("annot_refusal");
  const Transcript transcript = test::make_transcript("plan_12", {"something"});
  MockPolicy policy;
  policy.annotator_refusal_prob = 1.0;
  MockBackend backend(policy);
  EventStore store(dir.path());
  const auto records = annotate_transcript(transcript, make_annotators(2, "m"), "seed", backend,
                                           store, AnnotateOptions{});
  REQUIRE(records.size() == 2);
  for (const auto& r : records) {
    CHECK(!r.valid());
    CHECK(r.raw_response == "I cannot annotate this.");
  }
}
