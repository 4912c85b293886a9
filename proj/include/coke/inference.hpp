#pragma once

#include <span>
#include <string>
#include <vector>

#include "coke/backends.hpp"
#include "coke/dataset.hpp"

namespace coke {

enum class Aggregation { mean, majority_vote, prob_avg, single };

Aggregation parse_aggregation(std::string_view name);
std::string aggregation_name(Aggregation a);

// The five normalized Likert anchors used by majority voting.
std::span<const double> likert_anchors();

// Per story-aspect pair: the aggregated score plus everything needed to
// audit it.
struct ScoredPrediction {
  std::string story_id;
  std::string aspect;
  double final_score = 0.0;
  std::vector<double> candidate_scores;
  std::vector<CandidateRationale> candidates;
  double diversity_sd = 0.0;  // population SD of candidate_scores
  std::size_t n = 0;          // requested sample count
  std::size_t n_effective = 0;  // scored candidates (== n unless skip_failed)
  Aggregation aggregation = Aggregation::mean;
};

struct InferOptions {
  std::size_t n = 100;  // paper's best setting; SC comparisons use 40
  std::uint64_t seed = 7;
  Aggregation aggregation = Aggregation::mean;
  bool skip_failed = false;
  std::size_t jobs = 1;
};

// Arithmetic mean of scores.
double aggregate_mean(std::span<const double> scores);

// Snaps scores to the nearest Likert anchor and returns the most frequent
// anchor; ties resolve to the lower anchor.
double aggregate_majority(std::span<const double> scores);

// Expectation of the normalized rating under a Likert distribution.
double prob_avg(const LikertDistribution& dist);

// Dispatch for mean / majority_vote / single over candidate scores.
double aggregate(std::span<const double> scores, Aggregation method);

// Samples n candidates, scores each, aggregates. Rationale texts ride along
// for interpretability and never influence the score.
ScoredPrediction coke_infer(const std::string& story_id, const std::string& aspect,
                            const std::string& story, Rationalizer& rationalizer, Scorer& scorer,
                            const InferOptions& options, std::uint64_t pair_seed);

// One prediction per group; per-pair seeds derive from options.seed and the
// pair key, so runs are reproducible and pairs are decorrelated.
std::vector<ScoredPrediction> infer_dataset(const std::vector<PairGroup>& groups,
                                            Rationalizer& rationalizer, Scorer& scorer,
                                            const InferOptions& options);

// JSON-lines prediction file: {story_id, aspect, final_score, n,
// aggregation, diversity_sd, candidates:[{keywords, rationale, score}]}.
std::string predictions_to_jsonl(const std::vector<ScoredPrediction>& predictions);
void write_predictions(const std::string& path, const std::vector<ScoredPrediction>& predictions);
// Tolerant reader: story_id, aspect and final_score are required, the rest
// is optional so externally produced files evaluate as-is.
std::vector<ScoredPrediction> read_predictions(const std::string& path);

}  // namespace coke
