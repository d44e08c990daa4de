#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "agora/errors.hpp"
#include "agora/metrics.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace agora;

namespace {

// ---- Independent oracles (kept deliberately separate from the library path).

// Naive memoized recursive LCS, unlike the iterative rolling-row DP.
int oracle_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::pair<int, int>, int> memo;
  std::function<int(int, int)> go = [&](int i, int j) -> int {
    if (i < 0 || j < 0) return 0;
    auto it = memo.find({i, j});
    if (it != memo.end()) return it->second;
    int value;
    if (a[i] == b[j]) {
      value = go(i - 1, j - 1) + 1;
    } else {
      value = std::max(go(i - 1, j), go(i, j - 1));
    }
    memo[{i, j}] = value;
    return value;
  };
  return go(static_cast<int>(a.size()) - 1, static_cast<int>(b.size()) - 1);
}

double oracle_rouge_f(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  const double lcs = oracle_lcs(a, b);
  if (lcs == 0) return 0.0;
  const double p = lcs / b.size(), r = lcs / a.size();
  return 2 * p * r / (p + r);
}

double oracle_diversity(const std::vector<std::vector<std::string>>& token_lists) {
  double sum = 0;
  int pairs = 0;
  for (std::size_t i = 0; i < token_lists.size(); ++i) {
    for (std::size_t j = i + 1; j < token_lists.size(); ++j) {
      sum += oracle_rouge_f(token_lists[i], token_lists[j]);
      ++pairs;
    }
  }
  return 1.0 - sum / pairs;
}

// Adjacent-difference reformulation of nDFU.
double oracle_ndfu(const std::vector<double>& hist) {
  double total = 0;
  for (double c : hist) total += c;
  std::vector<double> p;
  for (double c : hist) p.push_back(c / total);
  std::size_t mode = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[mode]) mode = i;
  }
  std::vector<double> diff;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) diff.push_back(p[i + 1] - p[i]);
  double dfu = 0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (i >= mode) dfu = std::max(dfu, diff[i]);
    if (i < mode) dfu = std::max(dfu, -diff[i]);
  }
  return dfu / p[mode];
}

// Student-t density integrated numerically: an incomplete-beta-free route to
// the two-tailed p value.
double t_density(double x, int df) {
  const double v = df;
  const double log_c = std::lgamma((v + 1) / 2) - std::lgamma(v / 2) -
                       0.5 * std::log(v * M_PI);
  return std::exp(log_c - (v + 1) / 2 * std::log1p(x * x / v));
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fb, double fm, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15 * eps) {
    return left + right + (left + right - whole) / 15;
  }
  return adaptive_simpson(f, a, m, fa, fm, flm, eps / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, fb, frm, eps / 2, depth - 1);
}

double oracle_t_p_two_tailed(double t, int df) {
  // Map [|t|, inf) onto [0, 1) with x = |t| + u/(1-u).
  const double abs_t = std::abs(t);
  auto g = [&](double u) {
    const double one_minus = 1.0 - u;
    const double x = abs_t + u / one_minus;
    return t_density(x, df) / (one_minus * one_minus);
  };
  const double a = 0.0, b = 1.0 - 1e-9;
  const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
  const double tail = adaptive_simpson(g, a, b, fa, fb, fm, 1e-14, 60);
  return 2 * tail;
}

std::vector<std::string> tok(const std::string& s) { return tokenize(s); }

}  // namespace

TEST_CASE("tokenize lowercases and strips punctuation") {
  CHECK(tok("Hello, World!") == std::vector<std::string>{"hello", "world"});
  CHECK(tok("@user: don't...") == std::vector<std::string>{"user", "don", "t"});
  CHECK(tok("") == std::vector<std::string>{});
  CHECK(tok("  a   b  ") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("rouge_l_f endpoints") {
  const auto a = tok("the quick brown fox");
  CHECK(rouge_l_f(a, a) == doctest::Approx(1.0));
  CHECK(rouge_l_f(a, tok("zebra lion puma")) == 0.0);
  CHECK(rouge_l_f({}, a) == 0.0);
  CHECK(rouge_l_f({}, {}) == 0.0);
}

TEST_CASE("the cat sat vs the cat ran gives F = 2/3") {
  CHECK(rouge_l_f(tok("the cat sat"), tok("the cat ran")) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("rouge F is symmetric (P and R swap)") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<std::string> a, b;
    for (std::size_t i = 0; i < rng() % 8; ++i) a.push_back(vocab[rng() % vocab.size()]);
    for (std::size_t i = 0; i < rng() % 8; ++i) b.push_back(vocab[rng() % vocab.size()]);
    CHECK(rouge_l_f(a, b) == doctest::Approx(rouge_l_f(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("diversity endpoints and oracle agreement") {
  CHECK(diversity_of_texts("d", {"same words here", "same words here"}).value ==
        doctest::Approx(0.0));
  CHECK(diversity_of_texts("d", {"alpha beta", "gamma delta", "epsilon zeta"}).value ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(diversity_of_texts("d", {"only one"}), Error);

  const std::vector<std::string> comments = {"the cat sat on the mat", "the dog sat",
                                             "a cat and a dog", "mat dog cat"};
  std::vector<std::vector<std::string>> token_lists;
  for (const auto& c : comments) token_lists.push_back(tok(c));
  const auto score = diversity_of_texts("d", comments);
  CHECK(score.pair_count == 6);
  CHECK(score.value == doctest::Approx(oracle_diversity(token_lists)).epsilon(1e-12));
}

TEST_CASE("diversity only counts non-empty user comments") {
  Transcript t = test::make_transcript("p", {"alpha beta gamma", "delta epsilon zeta"});
  t.comments.push_back(test::make_comment(3, "facilitator", AuthorKind::Facilitator,
                                          "alpha beta gamma delta epsilon zeta"));
  const auto score = diversity(t);
  CHECK(score.pair_count == 1);  // the facilitator comment is excluded
  CHECK(score.value == doctest::Approx(1.0));
}

TEST_CASE("ndfu endpoints") {
  CHECK(ndfu({0, 10, 0, 0, 0}) == doctest::Approx(0.0));
  CHECK(ndfu({5, 0, 0, 0, 5}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ndfu({}), Error);
  CHECK_THROWS_AS(ndfu({0, 0, 0}), Error);
  CHECK_THROWS_AS(ndfu({3}), Error);
}

TEST_CASE("ndfu agrees with the adjacent-difference oracle") {
  CHECK(ndfu({4, 1, 3, 0, 2}) == doctest::Approx(oracle_ndfu({4, 1, 3, 0, 2})).epsilon(1e-12));
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<double> hist(2 + rng() % 6);
    double total = 0;
    for (auto& c : hist) {
      c = static_cast<double>(rng() % 8);
      total += c;
    }
    if (total == 0) hist[0] = 1;
    CHECK(ndfu(hist) == doctest::Approx(oracle_ndfu(hist)).epsilon(1e-12));
  }
}

TEST_CASE("ndfu is zero on random unimodal histograms and scale-invariant") {
  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t k = 3 + rng() % 5;
    const std::size_t peak = rng() % k;
    std::vector<double> hist(k);
    // Non-decreasing up to the peak, non-increasing after.
    double level = 1 + static_cast<double>(rng() % 5);
    for (std::size_t i = 0; i <= peak; ++i) {
      hist[i] = level;
      level += static_cast<double>(rng() % 3);
    }
    double down = hist[peak];
    for (std::size_t i = peak; i < k; ++i) {
      hist[i] = down;
      down = std::max(0.0, down - static_cast<double>(rng() % 3));
    }
    // Build upward to the peak value.
    for (std::size_t i = 0; i < peak; ++i) hist[i] = std::min(hist[i], hist[peak]);
    CAPTURE(hist);
    CHECK(ndfu(hist) == doctest::Approx(0.0));

    std::vector<double> scaled = hist;
    for (auto& c : scaled) c *= 7.0;
    CHECK(ndfu(scaled) == doctest::Approx(ndfu(hist)).epsilon(1e-12));
  }
}

TEST_CASE("two_sample_t matches an independent quadrature recomputation") {
  // Fixed 2 x 30 synthetic samples.
  std::vector<double> a, b;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    a.push_back(2.0 + 0.05 * static_cast<double>(i % 7) + 1e-3 * static_cast<double>(rng() % 100));
    b.push_back(2.2 + 0.04 * static_cast<double>(i % 5) + 1e-3 * static_cast<double>(rng() % 100));
  }
  const TTestResult result = two_sample_t(a, b);

  // Textbook formula, recomputed from scratch in long double.
  long double ma = 0, mb = 0;
  for (double x : a) ma += x;
  for (double x : b) mb += x;
  ma /= a.size();
  mb /= b.size();
  long double ssa = 0, ssb = 0;
  for (double x : a) ssa += (x - ma) * (x - ma);
  for (double x : b) ssb += (x - mb) * (x - mb);
  const int df = static_cast<int>(a.size() + b.size()) - 2;
  const long double sp2 = (ssa + ssb) / df;
  const long double expected_t =
      (ma - mb) / std::sqrt(static_cast<double>(sp2 * (1.0L / a.size() + 1.0L / b.size())));

  CHECK(std::abs(result.t - static_cast<double>(expected_t)) < 1e-10);
  CHECK(result.df == df);
  CHECK(std::abs(result.p - oracle_t_p_two_tailed(result.t, df)) < 1e-10);
}

TEST_CASE("identical samples give t = 0, p = 1") {
  const std::vector<double> a = {1.0, 2.0, 3.0};
  const TTestResult result = two_sample_t(a, a);
  CHECK(result.t == doctest::Approx(0.0));
  CHECK(result.p == doctest::Approx(1.0));
  CHECK(result.mean_diff == doctest::Approx(0.0));
}

TEST_CASE("well-separated samples are significant at .001") {
  const std::vector<double> a = {0.0, 0.001, -0.001, 0.0005};
  const std::vector<double> b = {1.0, 1.001, 0.999, 1.0005};
  const TTestResult result = two_sample_t(a, b);
  CHECK(result.p < 0.001);
  CHECK(significance_stars(result.p) == "***");
}

TEST_CASE("degenerate variance is rejected") {
  CHECK_THROWS_AS(two_sample_t({1, 1, 1}, {2, 2, 2}), Error);
  CHECK_THROWS_AS(two_sample_t({1}, {2, 3}), Error);
}

TEST_CASE("significance star thresholds") {
  CHECK(significance_stars(0.0001) == "***");
  CHECK(significance_stars(0.005) == "**");
  CHECK(significance_stars(0.03) == "*");
  CHECK(significance_stars(0.06) == "");
}

TEST_CASE("student_t_p matches quadrature across a t grid") {
  for (double t : {0.0, 0.5, 1.0, 2.0, 3.5}) {
    for (int df : {3, 10, 58, 200}) {
      CHECK(std::abs(student_t_p_two_tailed(t, df) - oracle_t_p_two_tailed(t, df)) < 1e-10);
    }
  }
}

TEST_CASE("exact linear data is recovered perfectly") {
  // response = 2*time + 1, single (reference) strategy: model is intercept + time.
  std::vector<RegressionRow> rows;
  for (int t = 1; t <= 10; ++t) {
    rows.push_back({StrategyKind::NoModerator, static_cast<double>(t), 2.0 * t + 1.0});
  }
  const OlsResult fit = fit_strategy_time_model(rows);
  REQUIRE(fit.names == std::vector<std::string>{"Intercept", "time"});
  CHECK(fit.estimates[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fit.estimates[1] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

namespace {

std::vector<RegressionRow> synthetic_rows(bool with_noise, std::uint64_t seed = 23) {
  // Known coefficients over the full six-strategy design.
  const double intercept = 2.164;
  const std::map<StrategyKind, double> main_effects = {
      {StrategyKind::NoInstructions, -0.426}, {StrategyKind::ModerationGame, -0.435},
      {StrategyKind::RulesOnly, -0.461},      {StrategyKind::RegulationRoom, -0.277},
      {StrategyKind::ConstructiveCommunications, -0.230}};
  const double time_effect = -0.012;
  const std::map<StrategyKind, double> interactions = {
      {StrategyKind::NoInstructions, -0.003}, {StrategyKind::ModerationGame, -0.011},
      {StrategyKind::RulesOnly, -0.008},      {StrategyKind::RegulationRoom, -0.023},
      {StrategyKind::ConstructiveCommunications, -0.023}};

  std::mt19937_64 rng(seed);
  std::vector<RegressionRow> rows;
  for (int rep = 0; rep < 8; ++rep) {
    for (int t = 1; t <= 15; ++t) {
      for (int s = 0; s < 6; ++s) {
        const StrategyKind kind = static_cast<StrategyKind>(s);
        double score = intercept + time_effect * t;
        if (kind != StrategyKind::NoModerator) {
          score += main_effects.at(kind) + interactions.at(kind) * t;
        }
        if (with_noise) {
          score += 1e-3 * (static_cast<double>(rng() % 1000) / 1000.0 - 0.5);
        }
        rows.push_back({kind, static_cast<double>(t), score});
      }
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("noise-free synthetic coefficients are recovered to 1e-8") {
  const OlsResult fit = fit_strategy_time_model(synthetic_rows(false));
  REQUIRE(fit.names.size() == 12);
  CHECK(fit.reference == "NoModerator");
  const std::map<std::string, double> expected = {
      {"Intercept", 2.164},
      {"NoInstructions", -0.426},
      {"ModerationGame", -0.435},
      {"RulesOnly", -0.461},
      {"RegulationRoom", -0.277},
      {"ConstructiveCommunications", -0.230},
      {"time", -0.012},
      {"NoInstructions:time", -0.003},
      {"ModerationGame:time", -0.011},
      {"RulesOnly:time", -0.008},
      {"RegulationRoom:time", -0.023},
      {"ConstructiveCommunications:time", -0.023}};
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    CHECK(std::abs(fit.estimates[i] - expected.at(fit.names[i])) < 1e-8);
  }
  CHECK(fit.df_resid == fit.n - 12);
}

TEST_CASE("row permutation leaves the fit unchanged") {
  auto rows = synthetic_rows(true);
  const OlsResult fit_a = fit_strategy_time_model(rows);
  std::mt19937_64 rng(77);
  for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng() % i]);
  const OlsResult fit_b = fit_strategy_time_model(rows);
  for (std::size_t i = 0; i < fit_a.estimates.size(); ++i) {
    CHECK(fit_a.estimates[i] == doctest::Approx(fit_b.estimates[i]).epsilon(1e-10));
    CHECK(fit_a.std_errors[i] == doctest::Approx(fit_b.std_errors[i]).epsilon(1e-10));
  }
  CHECK(fit_a.r_squared == doctest::Approx(fit_b.r_squared).epsilon(1e-12));
}

TEST_CASE("residuals are orthogonal to every design column") {
  const auto rows = synthetic_rows(true);
  const OlsResult fit = fit_strategy_time_model(rows);

  // Rebuild the design exactly as the model builder does.
  const std::vector<StrategyKind> order = {
      StrategyKind::NoInstructions, StrategyKind::ModerationGame, StrategyKind::RulesOnly,
      StrategyKind::RegulationRoom, StrategyKind::ConstructiveCommunications};
  auto design_row = [&](const RegressionRow& r) {
    std::vector<double> x{1.0};
    for (auto k : order) x.push_back(r.strategy == k ? 1.0 : 0.0);
    x.push_back(r.time);
    for (auto k : order) x.push_back(r.strategy == k ? r.time : 0.0);
    return x;
  };
  const std::size_t k = fit.estimates.size();
  std::vector<double> residuals;
  double res_norm2 = 0;
  for (const auto& r : rows) {
    const auto x = design_row(r);
    double fitted = 0;
    for (std::size_t j = 0; j < k; ++j) fitted += x[j] * fit.estimates[j];
    residuals.push_back(r.score - fitted);
    res_norm2 += residuals.back() * residuals.back();
  }
  for (std::size_t j = 0; j < k; ++j) {
    double dot = 0, col_norm2 = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto x = design_row(rows[i]);
      dot += x[j] * residuals[i];
      col_norm2 += x[j] * x[j];
    }
    CHECK(std::abs(dot) < 1e-8 * std::sqrt(col_norm2) * std::sqrt(res_norm2) + 1e-12);
  }
}

TEST_CASE("adjusted R^2 matches its closed form") {
  const auto rows = synthetic_rows(true);
  const OlsResult fit = fit_strategy_time_model(rows);
  const double k = static_cast<double>(fit.names.size());
  const double expected =
      1.0 - (1.0 - fit.r_squared) * (fit.n - 1) / (fit.n - k);
  CHECK(fit.adj_r_squared == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("collinear designs raise RankDeficient") {
  std::vector<std::vector<double>> design;
  std::vector<double> y;
  for (int i = 0; i < 10; ++i) {
    const double t = i;
    design.push_back({1.0, t, 2.0 * t});  // third column = 2x second
    y.push_back(t);
  }
  CHECK_THROWS_AS(ols_fit(design, {"a", "b", "c"}, y), Error);
}

TEST_CASE("too few observations raise InsufficientData") {
  CHECK_THROWS_AS(ols_fit({{1.0, 2.0}}, {"a", "b"}, {1.0}), Error);
}

TEST_CASE("ols standard errors match the normal-equation route") {
  // Small design with noise; covariance from explicit (X^T X)^-1.
  std::vector<std::vector<double>> design;
  std::vector<double> y;
  std::mt19937_64 rng(31);
  for (int i = 0; i < 40; ++i) {
    const double t = i * 0.25;
    design.push_back({1.0, t, t * t});
    y.push_back(0.5 + 1.5 * t - 0.25 * t * t +
                0.01 * (static_cast<double>(rng() % 1000) / 1000.0 - 0.5));
  }
  const OlsResult fit = ols_fit(design, {"c", "t", "t2"}, y);

  // Gauss-Jordan inverse of the 3x3 normal matrix in long double.
  long double xtx[3][3] = {};
  for (const auto& row : design) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) xtx[a][b] += static_cast<long double>(row[a]) * row[b];
    }
  }
  long double inv[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int col = 0; col < 3; ++col) {
    const long double pivot = xtx[col][col];
    for (int j = 0; j < 3; ++j) {
      xtx[col][j] /= pivot;
      inv[col][j] /= pivot;
    }
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const long double factor = xtx[r][col];
      for (int j = 0; j < 3; ++j) {
        xtx[r][j] -= factor * xtx[col][j];
        inv[r][j] -= factor * inv[col][j];
      }
    }
  }
  double rss = 0;
  for (std::size_t i = 0; i < design.size(); ++i) {
    double fitted = 0;
    for (int j = 0; j < 3; ++j) fitted += design[i][j] * fit.estimates[j];
    rss += (y[i] - fitted) * (y[i] - fitted);
  }
  const double sigma2 = rss / (static_cast<int>(design.size()) - 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(fit.std_errors[j] ==
          doctest::Approx(std::sqrt(sigma2 * static_cast<double>(inv[j][j]))).epsilon(1e-8));
  }
}

TEST_CASE("mean difference matrix: values, stars and antisymmetry") {
  std::map<StrategyKind, std::vector<double>> groups;
  groups[StrategyKind::NoModerator] = {1.9, 2.0, 2.1, 2.0};
  groups[StrategyKind::RulesOnly] = {1.4, 1.5, 1.6, 1.5};
  const PairwiseMatrix matrix = mean_difference_matrix(groups);
  REQUIRE(matrix.strategies.size() == 2);

  // Locate (NoModerator, RulesOnly).
  const std::size_t i =
      matrix.strategies[0] == StrategyKind::NoModerator ? 0 : 1;
  const std::size_t j = 1 - i;
  CHECK(matrix.cells[i][j].mean_diff == doctest::Approx(0.5));
  CHECK(matrix.cells[j][i].mean_diff == doctest::Approx(-0.5));
  CHECK(matrix.cells[i][j].stars == "***");
  CHECK(matrix.cells[i][i].mean_diff == doctest::Approx(0.0));
}

TEST_CASE("identical group distributions give a zero matrix with no stars") {
  std::map<StrategyKind, std::vector<double>> groups;
  groups[StrategyKind::NoModerator] = {1.0, 2.0, 3.0};
  groups[StrategyKind::NoInstructions] = {1.0, 2.0, 3.0};
  const PairwiseMatrix matrix = mean_difference_matrix(groups);
  for (const auto& row : matrix.cells) {
    for (const auto& cell : row) {
      CHECK(cell.mean_diff == doctest::Approx(0.0));
      CHECK(cell.stars == "");
    }
  }
}

TEST_CASE("intervention stats: rate, histogram and NoModerator omission") {
  ExperimentConfig cfg = test::tiny_config();
  DiscussionPlan moderated;
  moderated.plan_id = "m";
  moderated.strategy_kind = StrategyKind::RulesOnly;
  DiscussionPlan unmoderated;
  unmoderated.plan_id = "u";
  unmoderated.strategy_kind = StrategyKind::NoModerator;

  Transcript transcript;
  transcript.plan_id = "m";
  transcript.comments.push_back(test::make_comment(0, kSeedAuthorId, AuthorKind::SeedPost, "s"));
  int index = 1;
  for (int turn = 1; turn <= 15; ++turn) {
    transcript.comments.push_back(test::make_comment(index++, "u1", AuthorKind::User, "text"));
    if (turn % 2 == 1) {  // speaks on odd opportunities: 8 of 15
      transcript.comments.push_back(
          test::make_comment(index++, "facilitator", AuthorKind::Facilitator, "calm"));
    }
  }
  Transcript plain = test::make_transcript("u", {"a", "b"});

  const auto summaries = intervention_stats({{&moderated, &transcript}, {&unmoderated, &plain}});
  REQUIRE(summaries.size() == 1);
  CHECK(summaries[0].strategy == StrategyKind::RulesOnly);
  CHECK(summaries[0].rate == doctest::Approx(8.0 / 15.0));
  CHECK(summaries[0].histogram.at(8) == 1);
}

TEST_CASE("invalid records never reach a mean") {
  AnnotationRecord valid;
  valid.toxicity = 4;
  valid.argument_quality = 2;
  AnnotationRecord invalid;
  invalid.raw_response = "I cannot annotate this.";
  AnnotationRecord half;
  half.toxicity = 2;

  const std::vector<const AnnotationRecord*> records = {&valid, &invalid, &half};
  CHECK(*mean_valid_toxicity(records) == doctest::Approx(3.0));
  CHECK(*mean_valid_arg_quality(records) == doctest::Approx(2.0));
  CHECK(!mean_valid_toxicity({&invalid}).has_value());
}
