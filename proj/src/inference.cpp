#include "coke/inference.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "coke/metrics.hpp"

namespace coke {

using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

Aggregation parse_aggregation(std::string_view name) {
  const std::string n = to_lower_ascii(name);
  if (n == "mean") return Aggregation::mean;
  if (n == "majority_vote" || n == "mv" || n == "majority") return Aggregation::majority_vote;
  if (n == "prob_avg" || n == "prob-avg") return Aggregation::prob_avg;
  if (n == "single") return Aggregation::single;
  throw ValidationError("unknown aggregation: " + std::string(name));
}

std::string aggregation_name(Aggregation a) {
  switch (a) {
    case Aggregation::mean: return "mean";
    case Aggregation::majority_vote: return "majority_vote";
    case Aggregation::prob_avg: return "prob_avg";
    case Aggregation::single: return "single";
  }
  return "?";
}

std::span<const double> likert_anchors() {
  static const double anchors[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  return anchors;
}

double aggregate_mean(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("aggregate: empty score list");
  KahanSum s;
  for (double v : scores) s.add(v);
  return s.value() / static_cast<double>(scores.size());
}

double aggregate_majority(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("aggregate: empty score list");
  const auto anchors = likert_anchors();
  std::array<std::size_t, 5> counts{};
  for (double v : scores) {
    std::size_t best = 0;
    double best_dist = std::abs(v - anchors[0]);
    for (std::size_t i = 1; i < anchors.size(); ++i) {
      const double dist = std::abs(v - anchors[i]);
      if (dist < best_dist) {
        best = i;
        best_dist = dist;
      }
    }
    ++counts[best];
  }
  std::size_t winner = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[winner]) winner = i;  // ties keep the lower anchor
  }
  return anchors[winner];
}

double prob_avg(const LikertDistribution& dist) {
  dist.validate();
  return dist.expectation();
}

double aggregate(std::span<const double> scores, Aggregation method) {
  switch (method) {
    case Aggregation::mean: return aggregate_mean(scores);
    case Aggregation::majority_vote: return aggregate_majority(scores);
    case Aggregation::single:
      if (scores.size() != 1) {
        throw ValidationError("aggregation 'single' expects exactly one score");
      }
      return scores.front();
    case Aggregation::prob_avg:
      throw ValidationError("prob_avg aggregates a Likert distribution, not raw scores");
  }
  throw ValidationError("unknown aggregation");
}

ScoredPrediction coke_infer(const std::string& story_id, const std::string& aspect,
                            const std::string& story, Rationalizer& rationalizer, Scorer& scorer,
                            const InferOptions& options, std::uint64_t pair_seed) {
  if (options.n < 1) throw ValidationError("infer: n must be >= 1");

  ScoredPrediction pred;
  pred.story_id = story_id;
  pred.aspect = aspect;
  pred.n = options.n;
  pred.aggregation = options.aggregation;

  pred.candidates = rationalizer.generate(story, aspect, options.n, pair_seed);

  pred.candidate_scores.reserve(pred.candidates.size());
  std::vector<CandidateRationale> kept;
  kept.reserve(pred.candidates.size());
  for (auto& cand : pred.candidates) {
    ScoreResult result;
    try {
      result = scorer.score(story, aspect, cand.keywords.items);
    } catch (const CokeError& e) {
      if (!options.skip_failed) {
        throw BackendError("pair (" + story_id + ", " + aspect + ") candidate " +
                           std::to_string(cand.sample_index) + ": " + e.what());
      }
      continue;
    }
    if (options.aggregation == Aggregation::prob_avg && !result.distribution) {
      throw BackendError("pair (" + story_id + ", " + aspect +
                         "): prob_avg aggregation needs a scorer that returns distributions");
    }
    pred.candidate_scores.push_back(result.score);
    kept.push_back(std::move(cand));
  }
  pred.candidates = std::move(kept);
  pred.n_effective = pred.candidate_scores.size();
  if (pred.candidate_scores.empty()) {
    throw BackendError("pair (" + story_id + ", " + aspect + "): no candidate could be scored");
  }

  // prob_avg candidates already carry their distribution expectation as the
  // score, so the pair-level estimate is the mean either way.
  if (options.aggregation == Aggregation::majority_vote) {
    pred.final_score = aggregate_majority(pred.candidate_scores);
  } else {
    pred.final_score = aggregate_mean(pred.candidate_scores);
  }
  pred.diversity_sd = population_sd(pred.candidate_scores);
  return pred;
}

std::vector<ScoredPrediction> infer_dataset(const std::vector<PairGroup>& groups,
                                            Rationalizer& rationalizer, Scorer& scorer,
                                            const InferOptions& options) {
  std::vector<ScoredPrediction> out(groups.size());
  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);

  auto work = [&](std::size_t i) {
    const PairGroup& group = groups[i];
    const std::uint64_t pair_seed = derive_pair_seed(options.seed, group.story_id, group.aspect);
    out[i] = coke_infer(group.story_id, group.aspect, group.story(), rationalizer, scorer,
                        options, pair_seed);
  };

  if (jobs == 1 || groups.size() <= 1) {
    for (std::size_t i = 0; i < groups.size(); ++i) work(i);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < std::min(jobs, groups.size()); ++t) {
    workers.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= groups.size()) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(groups.size());
          return;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

std::string predictions_to_jsonl(const std::vector<ScoredPrediction>& predictions) {
  std::string out;
  for (const auto& pred : predictions) {
    ordered_json row;
    row["story_id"] = pred.story_id;
    row["aspect"] = pred.aspect;
    row["final_score"] = pred.final_score;
    row["n"] = pred.n;
    if (pred.n_effective != pred.n) row["n_effective"] = pred.n_effective;
    row["aggregation"] = aggregation_name(pred.aggregation);
    row["diversity_sd"] = pred.diversity_sd;
    ordered_json cands = ordered_json::array();
    for (std::size_t i = 0; i < pred.candidates.size(); ++i) {
      ordered_json c;
      c["keywords"] = pred.candidates[i].keywords.items;
      if (pred.candidates[i].rationale_text) {
        c["rationale"] = *pred.candidates[i].rationale_text;
      }
      c["score"] = pred.candidate_scores[i];
      cands.push_back(std::move(c));
    }
    row["candidates"] = std::move(cands);
    out += row.dump();
    out += '\n';
  }
  return out;
}

void write_predictions(const std::string& path,
                       const std::vector<ScoredPrediction>& predictions) {
  write_file(path, predictions_to_jsonl(predictions));
}

std::vector<ScoredPrediction> read_predictions(const std::string& path) {
  std::vector<ScoredPrediction> out;
  for_each_line(path, [&](std::string_view line, std::size_t lineno) {
    if (trim(line).empty()) return;
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded()) {
      throw ValidationError("predictions line " + std::to_string(lineno) + ": invalid JSON");
    }
    ScoredPrediction pred;
    for (const char* key : {"story_id", "aspect", "final_score"}) {
      if (!row.contains(key)) {
        throw ValidationError("predictions line " + std::to_string(lineno) + ": missing '" +
                              key + "'");
      }
    }
    pred.story_id = row["story_id"].get<std::string>();
    pred.aspect = row["aspect"].get<std::string>();
    pred.final_score = row["final_score"].get<double>();
    if (pred.final_score < 0.0 || pred.final_score > 1.0) {
      throw ValidationError("predictions line " + std::to_string(lineno) +
                            ": final_score outside [0, 1]");
    }
    pred.n = row.value("n", 0);
    pred.aggregation =
        row.contains("aggregation") ? parse_aggregation(row["aggregation"].get<std::string>())
                                    : Aggregation::single;
    pred.diversity_sd = row.value("diversity_sd", 0.0);
    if (row.contains("candidates") && row["candidates"].is_array()) {
      for (const auto& c : row["candidates"]) {
        CandidateRationale cand;
        cand.sample_index = pred.candidates.size();
        if (c.contains("keywords")) {
          cand.keywords.items = c["keywords"].get<std::vector<std::string>>();
        }
        cand.keywords.source = KeywordSource::generated;
        if (c.contains("rationale") && c["rationale"].is_string()) {
          cand.rationale_text = c["rationale"].get<std::string>();
        }
        if (c.contains("score")) pred.candidate_scores.push_back(c["score"].get<double>());
        pred.candidates.push_back(std::move(cand));
      }
    }
    pred.n_effective = pred.candidate_scores.size();
    if (pred.n == 0) pred.n = std::max<std::size_t>(pred.n_effective, 1);
    out.push_back(std::move(pred));
  });
  return out;
}

}  // namespace coke
