#include "agora/analysis.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "agora/errors.hpp"
#include "agora/metrics.hpp"
#include "agora/store.hpp"

namespace agora {

namespace {

std::string fmt(double value, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, value);
  return buf;
}

struct CommentScores {
  const DiscussionPlan* plan = nullptr;
  const Comment* comment = nullptr;
  int user_turn = 0;  // 1-based ordinal among user comments; 0 for facilitator
  std::optional<double> mean_toxicity;
  std::optional<double> mean_arg_quality;
  std::vector<double> toxicity_hist = std::vector<double>(5, 0.0);
  std::vector<double> arg_quality_hist = std::vector<double>(5, 0.0);
  int valid_toxicity = 0;
  int valid_arg_quality = 0;
};

void write_ols_table(const std::filesystem::path& path, const std::string& title,
                     const OlsResult& fit) {
  std::ofstream out(path, std::ios::binary);
  out << title << "\n";
  out << "Reference factor: " << (fit.reference.empty() ? "(none)" : fit.reference) << "\n";
  out << "n=" << fit.n << "  df_resid=" << fit.df_resid << "  R^2=" << fmt(fit.r_squared, "%.4f")
      << "  Adj. R^2=" << fmt(fit.adj_r_squared, "%.4f") << "\n\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-36s %12s %12s %10s %10s\n", "coefficient", "estimate",
                "std err", "t", "p");
  out << line;
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    std::snprintf(line, sizeof(line), "%-36s %12.4f %12.4f %10.3f %10.4g %s\n",
                  fit.names[i].c_str(), fit.estimates[i], fit.std_errors[i], fit.t_stats[i],
                  fit.p_values[i], significance_stars(fit.p_values[i]).c_str());
    out << line;
  }
}

void write_pairwise_matrix(const std::filesystem::path& path, const PairwiseMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  out << "strategy";
  for (StrategyKind k : matrix.strategies) out << ',' << to_string(k);
  out << '\n';
  for (std::size_t i = 0; i < matrix.strategies.size(); ++i) {
    out << to_string(matrix.strategies[i]);
    for (std::size_t j = 0; j < matrix.strategies.size(); ++j) {
      const PairwiseCell& cell = matrix.cells[i][j];
      out << ',' << fmt(cell.mean_diff, "%.4f") << cell.stars;
    }
    out << '\n';
  }
}

}  // namespace

AnalyzeReport run_analysis(const std::filesystem::path& run_dir, const AnalyzeOptions& options) {
  AnalyzeReport report;
  const RunPaths paths{run_dir};
  EventStore store(run_dir);
  const auto plans = load_plans(paths.plans());
  report.plans = plans.size();

  std::filesystem::create_directories(paths.analysis());

  // Load completed transcripts and their annotations.
  struct Loaded {
    const DiscussionPlan* plan;
    Transcript transcript;
    std::vector<AnnotationRecord> records;
  };
  std::vector<Loaded> runs;
  for (const auto& plan : plans) {
    auto progress = load_progress(store, plan.plan_id);
    if (progress.transcript.status != TranscriptStatus::Complete) continue;
    runs.push_back(
        {&plan, std::move(progress.transcript), load_annotations(store, plan.plan_id)});
  }
  report.completed = runs.size();
  if (runs.empty()) {
    throw Error(Errc::NoCompletedDiscussions, "no completed discussions in " + run_dir.string());
  }

  // Per-comment score aggregation. Invalid records are quarantined here and
  // never reach any statistic.
  std::vector<CommentScores> scored;
  for (const auto& run : runs) {
    std::map<int, std::vector<const AnnotationRecord*>> by_comment;
    for (const auto& r : run.records) by_comment[r.comment_index].push_back(&r);

    int user_turn = 0;
    for (const auto& comment : run.transcript.comments) {
      if (comment.author_kind == AuthorKind::SeedPost) continue;
      if (comment.author_kind == AuthorKind::User) ++user_turn;
      CommentScores s;
      s.plan = run.plan;
      s.comment = &comment;
      s.user_turn = comment.author_kind == AuthorKind::User ? user_turn : 0;
      auto it = by_comment.find(comment.index);
      if (it != by_comment.end()) {
        s.mean_toxicity = mean_valid_toxicity(it->second);
        s.mean_arg_quality = mean_valid_arg_quality(it->second);
        for (const AnnotationRecord* r : it->second) {
          if (r->toxicity) {
            s.toxicity_hist[*r->toxicity - 1] += 1.0;
            ++s.valid_toxicity;
          }
          if (r->argument_quality) {
            s.arg_quality_hist[*r->argument_quality - 1] += 1.0;
            ++s.valid_arg_quality;
          }
        }
      }
      if (s.mean_toxicity || s.mean_arg_quality) ++report.annotated_comments;
      scored.push_back(std::move(s));
    }
  }

  // diversity.csv: synthetic discussions plus the optional human baseline.
  {
    std::ofstream out(paths.analysis() / "diversity.csv", std::ios::binary);
    out << "id,strategy,model,value,pair_count\n";
    for (const auto& run : runs) {
      int included = 0;
      for (const auto& c : run.transcript.comments) {
        if (c.author_kind == AuthorKind::User && !c.text.empty()) ++included;
      }
      if (included < 2) continue;
      const DiversityScore score = diversity(run.transcript);
      out << score.plan_id << ',' << to_string(run.plan->strategy_kind) << ','
          << run.plan->model_ref << ',' << fmt(score.value) << ',' << score.pair_count << '\n';
      ++report.diversity_rows;
    }
    if (options.human_corpus) {
      for (const auto& discussion : load_human_corpus(*options.human_corpus)) {
        std::vector<std::string> texts;
        for (const auto& c : discussion.comments) {
          if (!c.text.empty()) texts.push_back(c.text);
        }
        if (texts.size() < 2) continue;
        const DiversityScore score = diversity_of_texts(discussion.discussion_id, texts);
        out << score.plan_id << ",Human,human," << fmt(score.value) << ',' << score.pair_count
            << '\n';
        ++report.diversity_rows;
      }
    }
  }

  // ndfu.csv: polarization per annotated comment and dimension.
  {
    std::ofstream out(paths.analysis() / "ndfu.csv", std::ios::binary);
    out << "plan_id,comment_index,dimension,value\n";
    for (const auto& s : scored) {
      if (s.valid_toxicity > 0) {
        out << s.plan->plan_id << ',' << s.comment->index << ",Toxicity,"
            << fmt(ndfu(s.toxicity_hist)) << '\n';
        ++report.ndfu_rows;
      }
      if (s.valid_arg_quality > 0) {
        out << s.plan->plan_id << ',' << s.comment->index << ",ArgQuality,"
            << fmt(ndfu(s.arg_quality_hist)) << '\n';
        ++report.ndfu_rows;
      }
    }
  }

  // OLS on the non-facilitator comments: score ~ strategy + time + strategy:time.
  auto regression_rows = [&](bool toxicity) {
    std::vector<RegressionRow> rows;
    for (const auto& s : scored) {
      if (s.comment->author_kind != AuthorKind::User) continue;
      const auto& score = toxicity ? s.mean_toxicity : s.mean_arg_quality;
      if (!score) continue;
      rows.push_back({s.plan->strategy_kind, static_cast<double>(s.user_turn), *score});
    }
    return rows;
  };
  for (bool toxicity : {true, false}) {
    const auto rows = regression_rows(toxicity);
    const char* name = toxicity ? "ols_toxicity.txt" : "ols_argquality.txt";
    const char* title = toxicity ? "OLS: toxicity ~ strategy + time + strategy:time"
                                 : "OLS: argument quality ~ strategy + time + strategy:time";
    try {
      const OlsResult fit = fit_strategy_time_model(rows);
      write_ols_table(paths.analysis() / name, title, fit);
      (toxicity ? report.ols_toxicity_written : report.ols_argquality_written) = true;
    } catch (const Error& e) {
      std::ofstream out(paths.analysis() / name, std::ios::binary);
      out << title << "\nnot computed: " << e.what() << "\n";
    }
  }

  // Pairwise strategy mean differences (value + stars per cell) and the
  // numeric long form.
  {
    std::map<StrategyKind, std::vector<double>> tox_groups, aq_groups;
    for (const auto& s : scored) {
      if (s.comment->author_kind != AuthorKind::User) continue;
      if (s.mean_toxicity) tox_groups[s.plan->strategy_kind].push_back(*s.mean_toxicity);
      if (s.mean_arg_quality) aq_groups[s.plan->strategy_kind].push_back(*s.mean_arg_quality);
    }
    std::ofstream long_out(paths.analysis() / "pairwise_long.csv", std::ios::binary);
    long_out << "dimension,strategy_a,strategy_b,mean_diff,t,p,stars\n";
    auto emit = [&](const char* dim, const std::map<StrategyKind, std::vector<double>>& groups,
                    const char* matrix_name) {
      if (groups.empty()) return;
      const PairwiseMatrix matrix = mean_difference_matrix(groups);
      write_pairwise_matrix(paths.analysis() / matrix_name, matrix);
      for (std::size_t i = 0; i < matrix.strategies.size(); ++i) {
        for (std::size_t j = 0; j < matrix.strategies.size(); ++j) {
          if (i == j) continue;
          const PairwiseCell& cell = matrix.cells[i][j];
          long_out << dim << ',' << to_string(matrix.strategies[i]) << ','
                   << to_string(matrix.strategies[j]) << ',' << fmt(cell.mean_diff) << ','
                   << fmt(cell.t, "%.6g") << ',' << fmt(cell.p, "%.6g") << ',' << cell.stars
                   << '\n';
        }
      }
    };
    emit("Toxicity", tox_groups, "pairwise_matrix.csv");
    emit("ArgQuality", aq_groups, "pairwise_matrix_argquality.csv");
  }

  // interventions.csv: histogram + rates per strategy.
  {
    std::vector<std::pair<const DiscussionPlan*, const Transcript*>> pairs;
    for (const auto& run : runs) pairs.push_back({run.plan, &run.transcript});
    const auto summaries = intervention_stats(pairs);
    std::ofstream out(paths.analysis() / "interventions.csv", std::ios::binary);
    report.moderated_runs = !summaries.empty();
    if (summaries.empty()) {
      out << "no moderated discussions\n";
    } else {
      out << "strategy,interventions,discussions\n";
      for (const auto& s : summaries) {
        for (const auto& [count, discussions] : s.histogram) {
          out << to_string(s.strategy) << ',' << count << ',' << discussions << '\n';
        }
      }
      std::ofstream rates(paths.analysis() / "intervention_rates.csv", std::ios::binary);
      rates << "strategy,total_interventions,total_opportunities,rate\n";
      for (const auto& s : summaries) {
        long ti = 0, to = 0;
        for (int i : s.interventions) ti += i;
        for (int o : s.opportunities) to += o;
        rates << to_string(s.strategy) << ',' << ti << ',' << to << ',' << fmt(s.rate) << '\n';
      }
    }
  }

  // comments_long.csv: plot-ready per-comment table.
  {
    std::ofstream out(paths.analysis() / "comments_long.csv", std::ios::binary);
    out << "plan_id,strategy,model,comment_index,user_turn,author_kind,"
           "mean_toxicity,mean_arg_quality,ndfu_toxicity,ndfu_arg_quality\n";
    for (const auto& s : scored) {
      out << s.plan->plan_id << ',' << to_string(s.plan->strategy_kind) << ','
          << s.plan->model_ref << ',' << s.comment->index << ','
          << (s.comment->author_kind == AuthorKind::User ? std::to_string(s.user_turn) : "")
          << ',' << to_string(s.comment->author_kind) << ','
          << (s.mean_toxicity ? fmt(*s.mean_toxicity) : "") << ','
          << (s.mean_arg_quality ? fmt(*s.mean_arg_quality) : "") << ','
          << (s.valid_toxicity > 0 ? fmt(ndfu(s.toxicity_hist)) : "") << ','
          << (s.valid_arg_quality > 0 ? fmt(ndfu(s.arg_quality_hist)) : "") << '\n';
    }
  }

  // Optional replication on an externally annotated table.
  if (options.external_table) {
    std::ifstream in(*options.external_table);
    if (!in.good()) {
      throw Error(Errc::ConfigInvalid,
                  "external table not readable: " + options.external_table->string());
    }
    std::vector<RegressionRow> tox_rows, aq_rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      RegressionRow row;
      row.strategy = strategy_kind_from_string(j.at("strategy").get<std::string>());
      row.time = j.at("time").get<double>();
      if (j.contains("toxicity") && !j.at("toxicity").is_null()) {
        row.score = j.at("toxicity").get<double>();
        tox_rows.push_back(row);
      }
      if (j.contains("arg_quality") && !j.at("arg_quality").is_null()) {
        row.score = j.at("arg_quality").get<double>();
        aq_rows.push_back(row);
      }
    }
    if (!tox_rows.empty()) {
      write_ols_table(paths.analysis() / "ols_external_toxicity.txt",
                      "OLS (external data): toxicity ~ strategy + time + strategy:time",
                      fit_strategy_time_model(tox_rows));
    }
    if (!aq_rows.empty()) {
      write_ols_table(paths.analysis() / "ols_external_argquality.txt",
                      "OLS (external data): argument quality ~ strategy + time + strategy:time",
                      fit_strategy_time_model(aq_rows));
    }
  }

  return report;
}

}  // namespace agora
