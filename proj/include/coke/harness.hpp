#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coke/dataset.hpp"
#include "coke/inference.hpp"
#include "coke/metrics.hpp"

namespace coke {

struct EvalConfig {
  std::string backend;
  std::size_t n = 0;
  std::string aggregation;
  std::uint64_t seed = 0;
};

struct EvalReport {
  MetricReport overall;
  double mean_diversity_sd = 0.0;
  std::size_t n_pairs = 0;          // pairs entering the metrics
  std::size_t n_expanded = 0;       // prediction-vs-annotator samples
  std::size_t n_uncovered_pairs = 0;  // groups with no prediction
  EvalConfig config;
};

enum class HumanPerfVariant { human_predicting_human, optimal_prediction, majority_voting };

HumanPerfVariant parse_human_variant(std::string_view name);
std::string human_variant_name(HumanPerfVariant v);

struct HumanPerfReport {
  HumanPerfVariant variant = HumanPerfVariant::human_predicting_human;
  MetricReport report;
};

// Expands each prediction against every annotator of its group and computes
// Pearson/MSE/F1 over the pooled samples, with per-aspect splits. A
// prediction whose pair is missing from groups is an error; groups without a
// prediction are counted as uncovered and excluded.
EvalReport expand_and_score(const std::vector<ScoredPrediction>& predictions,
                            const std::vector<PairGroup>& groups);

// Paired samples underlying expand_and_score, exposed for oracle tests.
std::vector<PairedSample> expand_predictions(const std::vector<ScoredPrediction>& predictions,
                                             const std::vector<PairGroup>& groups,
                                             std::size_t* uncovered = nullptr);

struct HumanPerfOptions {
  // Pool every ordered (predictor, target) annotator pair. When sample_one
  // is set, one predictor per group is drawn with the seed instead.
  bool sample_one = false;
  std::uint64_t seed = 0;
};

HumanPerfReport human_performance(const std::vector<PairGroup>& groups, HumanPerfVariant variant,
                                  const HumanPerfOptions& options = {});

// Paired samples for a human-performance variant, exposed for oracle tests.
std::vector<PairedSample> human_perf_samples(const std::vector<PairGroup>& groups,
                                             HumanPerfVariant variant,
                                             const HumanPerfOptions& options = {});

// Mean over predictions of the per-pair candidate-score SD.
double diversity_report(const std::vector<ScoredPrediction>& predictions);

// Group mode with ties resolved toward the lower rating.
double majority_rating(const std::vector<double>& ratings);

// Metric computation shared by the reports; per-aspect Pearson is omitted
// for aspects with fewer than 10 samples or zero variance.
MetricReport metrics_from_samples(const std::vector<PairedSample>& samples);

// Per-aspect ratings matrices (targets x raters) for ICC; aspect "all" pools
// every aspect.
std::vector<std::vector<double>> icc_matrix(const std::vector<PairGroup>& groups,
                                            const std::string& aspect);

std::string eval_report_to_json(const EvalReport& report);
std::string human_perf_report_to_json(const HumanPerfReport& report);
std::string format_report_table(const EvalReport& report);
std::string format_metric_table(const MetricReport& report, const std::string& title);

}  // namespace coke
