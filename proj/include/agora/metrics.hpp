#pragma once

#include <map>
#include <string>
#include <vector>

#include "agora/domain.hpp"

namespace agora {

// Lowercases, strips punctuation, splits on whitespace. Bytes >= 0x80 are
// kept verbatim so UTF-8 content tokenizes stably.
std::vector<std::string> tokenize(const std::string& text);

// ROUGE-L F1 (beta = 1): L = LCS length, P = L/|b|, R = L/|a|,
// F = 2PR/(P+R). Returns 0 when either side is empty.
double rouge_l_f(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct DiversityScore {
  std::string plan_id;
  double value = 0.0;  // 1 - mean pairwise ROUGE-L F over included comments
  int pair_count = 0;  // n(n-1)/2
};

// Included comments are non-empty user comments (no seed post, no
// facilitator). Throws TooFewComments when fewer than two qualify.
DiversityScore diversity(const Transcript& transcript);
DiversityScore diversity_of_texts(const std::string& id, const std::vector<std::string>& texts);

// Normalized distance from unimodality of an ordered score histogram:
// 0 = consensus, 1 = maximal polarization. Ties in the mode break leftmost.
// Throws EmptyHistogram for an empty or all-zero histogram.
double ndfu(const std::vector<double>& histogram);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  double mean_diff = 0.0;
  int df = 0;
};

// Pooled-variance two-tailed Student t-test.
TTestResult two_sample_t(const std::vector<double>& a, const std::vector<double>& b);

// Significance stars at .05 / .01 / .001.
std::string significance_stars(double p);

// Two-tailed p for a t statistic via the regularized incomplete beta.
double student_t_p_two_tailed(double t, int df);

struct OlsResult {
  std::vector<std::string> names;
  std::vector<double> estimates;
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  int n = 0;
  int df_resid = 0;
  std::string reference;  // reference factor of the dummy coding, if any
};

// Least squares via Householder QR. Throws RankDeficient on a collinear
// design and InsufficientData when n <= k. TSS is centered when the design
// carries an intercept.
OlsResult ols_fit(const std::vector<std::vector<double>>& design,
                  const std::vector<std::string>& names, const std::vector<double>& response,
                  bool has_intercept = true);

struct RegressionRow {
  StrategyKind strategy = StrategyKind::NoModerator;
  double time = 0.0;  // user-turn ordinal
  double score = 0.0;
};

// score ~ strategy + time + strategy:time with dummy coding; NoModerator is
// the reference factor when present.
OlsResult fit_strategy_time_model(const std::vector<RegressionRow>& rows);

struct InterventionSummary {
  StrategyKind strategy = StrategyKind::NoInstructions;
  std::vector<int> interventions;  // per discussion
  std::vector<int> opportunities;  // per discussion
  std::map<int, int> histogram;    // interventions -> number of discussions
  double rate = 0.0;               // total interventions / total opportunities
};

// Groups moderated transcripts by strategy; the NoModerator group is omitted.
// intervention = non-empty facilitator comment, opportunity = user comment.
std::vector<InterventionSummary> intervention_stats(
    const std::vector<std::pair<const DiscussionPlan*, const Transcript*>>& runs);

struct PairwiseCell {
  double mean_diff = 0.0;
  double t = 0.0;
  double p = 1.0;
  std::string stars;
};

struct PairwiseMatrix {
  std::vector<StrategyKind> strategies;
  std::vector<std::vector<PairwiseCell>> cells;  // cells[i][j] = mean_i - mean_j
};

// Cell (i,j) is the difference of group means of per-comment scores; stars
// come from two_sample_t. Degenerate pairs keep p = 1 and no stars.
PairwiseMatrix mean_difference_matrix(const std::map<StrategyKind, std::vector<double>>& groups);

// Mean of the valid annotator scores for one comment; nullopt when no valid
// record exists. Invalid records never contribute.
std::optional<double> mean_valid_toxicity(const std::vector<const AnnotationRecord*>& records);
std::optional<double> mean_valid_arg_quality(const std::vector<const AnnotationRecord*>& records);

}  // namespace agora
