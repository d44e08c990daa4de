#include "agora/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include "agora/errors.hpp"

namespace agora {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (c >= 0x80 || std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double rouge_l_f(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  // LCS length with a rolling row.
  std::vector<int> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        curr[j] = prev[j - 1] + 1;
      } else {
        curr[j] = std::max(prev[j], curr[j - 1]);
      }
    }
    std::swap(prev, curr);
  }
  const double lcs = prev[b.size()];
  if (lcs == 0.0) return 0.0;
  const double precision = lcs / static_cast<double>(b.size());
  const double recall = lcs / static_cast<double>(a.size());
  return 2.0 * precision * recall / (precision + recall);
}

DiversityScore diversity_of_texts(const std::string& id, const std::vector<std::string>& texts) {
  if (texts.size() < 2) {
    throw Error(Errc::TooFewComments, id + ": need at least 2 included comments");
  }
  std::vector<std::vector<std::string>> token_lists;
  token_lists.reserve(texts.size());
  for (const auto& t : texts) token_lists.push_back(tokenize(t));

  double sum = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < token_lists.size(); ++i) {
    for (std::size_t j = i + 1; j < token_lists.size(); ++j) {
      sum += rouge_l_f(token_lists[i], token_lists[j]);
      ++pairs;
    }
  }
  DiversityScore score;
  score.plan_id = id;
  score.pair_count = pairs;
  score.value = 1.0 - sum / pairs;
  return score;
}

DiversityScore diversity(const Transcript& transcript) {
  std::vector<std::string> texts;
  for (const auto& c : transcript.comments) {
    if (c.author_kind == AuthorKind::User && !c.text.empty()) texts.push_back(c.text);
  }
  return diversity_of_texts(transcript.plan_id, texts);
}

double ndfu(const std::vector<double>& histogram) {
  if (histogram.size() < 2) {
    throw Error(Errc::EmptyHistogram, "histogram needs at least 2 categories");
  }
  double total = 0.0;
  for (double c : histogram) {
    if (c < 0.0) throw Error(Errc::EmptyHistogram, "negative count");
    total += c;
  }
  if (total <= 0.0) throw Error(Errc::EmptyHistogram, "all counts are zero");

  std::vector<double> p(histogram.size());
  for (std::size_t i = 0; i < histogram.size(); ++i) p[i] = histogram[i] / total;

  // Leftmost mode.
  std::size_t mode = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[mode]) mode = i;
  }

  // Max adjacent violation of unimodality around the mode: any rise after it
  // or any fall before it.
  double dfu = 0.0;
  for (std::size_t i = mode; i + 1 < p.size(); ++i) {
    dfu = std::max(dfu, p[i + 1] - p[i]);
  }
  for (std::size_t i = 0; i < mode; ++i) {
    dfu = std::max(dfu, p[i] - p[i + 1]);
  }
  return dfu / p[mode];
}

double student_t_p_two_tailed(double t, int df) {
  if (df <= 0) throw Error(Errc::InsufficientData, "degrees of freedom must be positive");
  const double x = df / (df + t * t);
  return boost::math::ibeta(df / 2.0, 0.5, x);
}

TTestResult two_sample_t(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t na = a.size(), nb = b.size();
  if (na < 2 || nb < 2) throw Error(Errc::InsufficientData, "both samples need >= 2 values");

  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
  };
  auto ss = [](const std::vector<double>& v, double m) {
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s;
  };
  const double ma = mean(a), mb = mean(b);
  const int df = static_cast<int>(na + nb) - 2;
  const double pooled_var = (ss(a, ma) + ss(b, mb)) / df;
  if (pooled_var <= 0.0) {
    throw Error(Errc::DegenerateVariance, "pooled variance is zero");
  }
  TTestResult result;
  result.mean_diff = ma - mb;
  result.df = df;
  result.t = result.mean_diff / std::sqrt(pooled_var * (1.0 / na + 1.0 / nb));
  result.p = student_t_p_two_tailed(result.t, df);
  return result;
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

OlsResult ols_fit(const std::vector<std::vector<double>>& design,
                  const std::vector<std::string>& names, const std::vector<double>& response,
                  bool has_intercept) {
  const int n = static_cast<int>(design.size());
  if (n == 0) throw Error(Errc::InsufficientData, "empty design");
  const int k = static_cast<int>(design.front().size());
  if (k == 0 || names.size() != static_cast<std::size_t>(k)) {
    throw Error(Errc::InvalidRequest, "design width does not match coefficient names");
  }
  if (response.size() != static_cast<std::size_t>(n)) {
    throw Error(Errc::InvalidRequest, "response length does not match design");
  }
  if (n <= k) throw Error(Errc::InsufficientData, "need more observations than coefficients");

  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    if (design[i].size() != static_cast<std::size_t>(k)) {
      throw Error(Errc::InvalidRequest, "ragged design matrix");
    }
    for (int j = 0; j < k; ++j) X(i, j) = design[i][j];
    y(i) = response[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(X);
  if (rank_check.rank() < k) {
    throw Error(Errc::RankDeficient, "design matrix is rank deficient");
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd residuals = y - X * beta;
  const double rss = residuals.squaredNorm();
  const int df = n - k;
  const double sigma2 = rss / df;

  // (X^T X)^-1 = R^-1 R^-T from the QR factor.
  const Eigen::MatrixXd R =
      qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd xtx_inv = r_inv * r_inv.transpose();

  double tss = 0.0;
  if (has_intercept) {
    const double ybar = y.mean();
    tss = (y.array() - ybar).square().sum();
  } else {
    tss = y.squaredNorm();
  }

  OlsResult result;
  result.names = names;
  result.n = n;
  result.df_resid = df;
  result.estimates.resize(k);
  result.std_errors.resize(k);
  result.t_stats.resize(k);
  result.p_values.resize(k);
  for (int j = 0; j < k; ++j) {
    result.estimates[j] = beta(j);
    result.std_errors[j] = std::sqrt(sigma2 * xtx_inv(j, j));
    if (result.std_errors[j] > 0.0) {
      result.t_stats[j] = beta(j) / result.std_errors[j];
      result.p_values[j] = student_t_p_two_tailed(result.t_stats[j], df);
    } else {
      result.t_stats[j] = 0.0;
      result.p_values[j] = 1.0;
    }
  }
  result.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  result.adj_r_squared = 1.0 - (1.0 - result.r_squared) * (n - 1) / static_cast<double>(n - k);
  return result;
}

namespace {

// Table ordering of the non-reference strategies.
const StrategyKind kDummyOrder[] = {
    StrategyKind::NoInstructions, StrategyKind::ModerationGame, StrategyKind::RulesOnly,
    StrategyKind::RegulationRoom, StrategyKind::ConstructiveCommunications,
};

std::string pretty_strategy(StrategyKind kind) { return to_string(kind); }

}  // namespace

OlsResult fit_strategy_time_model(const std::vector<RegressionRow>& rows) {
  if (rows.empty()) throw Error(Errc::InsufficientData, "no regression rows");

  std::vector<bool> present(6, false);
  for (const auto& row : rows) present[static_cast<int>(row.strategy)] = true;

  StrategyKind reference = StrategyKind::NoModerator;
  if (!present[static_cast<int>(StrategyKind::NoModerator)]) {
    for (StrategyKind k : kDummyOrder) {
      if (present[static_cast<int>(k)]) {
        reference = k;
        break;
      }
    }
  }

  std::vector<StrategyKind> dummies;
  for (StrategyKind k : kDummyOrder) {
    if (k != reference && present[static_cast<int>(k)]) dummies.push_back(k);
  }

  std::vector<std::string> names;
  names.push_back("Intercept");
  for (StrategyKind k : dummies) names.push_back(pretty_strategy(k));
  names.push_back("time");
  for (StrategyKind k : dummies) names.push_back(pretty_strategy(k) + ":time");

  std::vector<std::vector<double>> design;
  std::vector<double> response;
  design.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<double> x;
    x.reserve(names.size());
    x.push_back(1.0);
    for (StrategyKind k : dummies) x.push_back(row.strategy == k ? 1.0 : 0.0);
    x.push_back(row.time);
    for (StrategyKind k : dummies) x.push_back(row.strategy == k ? row.time : 0.0);
    design.push_back(std::move(x));
    response.push_back(row.score);
  }

  OlsResult result = ols_fit(design, names, response, true);
  result.reference = pretty_strategy(reference);
  return result;
}

std::vector<InterventionSummary> intervention_stats(
    const std::vector<std::pair<const DiscussionPlan*, const Transcript*>>& runs) {
  std::map<StrategyKind, InterventionSummary> by_strategy;
  for (const auto& [plan, transcript] : runs) {
    if (plan->strategy_kind == StrategyKind::NoModerator) continue;
    int interventions = 0;
    int opportunities = 0;
    for (const auto& c : transcript->comments) {
      if (c.author_kind == AuthorKind::Facilitator && !c.text.empty()) ++interventions;
      if (c.author_kind == AuthorKind::User) ++opportunities;
    }
    auto& summary = by_strategy[plan->strategy_kind];
    summary.strategy = plan->strategy_kind;
    summary.interventions.push_back(interventions);
    summary.opportunities.push_back(opportunities);
    summary.histogram[interventions] += 1;
  }
  std::vector<InterventionSummary> out;
  for (auto& [kind, summary] : by_strategy) {
    long total_i = 0, total_o = 0;
    for (int i : summary.interventions) total_i += i;
    for (int o : summary.opportunities) total_o += o;
    summary.rate = total_o > 0 ? static_cast<double>(total_i) / total_o : 0.0;
    out.push_back(std::move(summary));
  }
  return out;
}

PairwiseMatrix mean_difference_matrix(const std::map<StrategyKind, std::vector<double>>& groups) {
  PairwiseMatrix matrix;
  for (const auto& [kind, values] : groups) {
    if (values.empty()) throw Error(Errc::InsufficientData, "empty strategy group");
    matrix.strategies.push_back(kind);
  }
  const std::size_t k = matrix.strategies.size();
  matrix.cells.assign(k, std::vector<PairwiseCell>(k));

  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
  };

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto& a = groups.at(matrix.strategies[i]);
      const auto& b = groups.at(matrix.strategies[j]);
      PairwiseCell& cell = matrix.cells[i][j];
      cell.mean_diff = mean(a) - mean(b);
      if (i == j) continue;
      try {
        const TTestResult t = two_sample_t(a, b);
        cell.t = t.t;
        cell.p = t.p;
        cell.stars = significance_stars(t.p);
      } catch (const Error&) {
        cell.t = 0.0;
        cell.p = 1.0;  // degenerate pair: no evidence either way
      }
    }
  }
  return matrix;
}

namespace {

std::optional<double> mean_valid(const std::vector<const AnnotationRecord*>& records,
                                 std::optional<int> AnnotationRecord::*field) {
  double sum = 0.0;
  int n = 0;
  for (const AnnotationRecord* r : records) {
    if (r && (r->*field).has_value()) {
      sum += *(r->*field);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace

std::optional<double> mean_valid_toxicity(const std::vector<const AnnotationRecord*>& records) {
  return mean_valid(records, &AnnotationRecord::toxicity);
}

std::optional<double> mean_valid_arg_quality(const std::vector<const AnnotationRecord*>& records) {
  return mean_valid(records, &AnnotationRecord::argument_quality);
}

}  // namespace agora
