#include "coke/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"

namespace coke {

using ordered_json = nlohmann::ordered_json;

HumanPerfVariant parse_human_variant(std::string_view name) {
  const std::string n = to_lower_ascii(name);
  if (n == "hph" || n == "human_predicting_human" || n == "human-predicting-human") {
    return HumanPerfVariant::human_predicting_human;
  }
  if (n == "optimal" || n == "optimal_prediction") return HumanPerfVariant::optimal_prediction;
  if (n == "majority" || n == "majority_voting") return HumanPerfVariant::majority_voting;
  throw ValidationError("unknown human-performance variant: " + std::string(name));
}

std::string human_variant_name(HumanPerfVariant v) {
  switch (v) {
    case HumanPerfVariant::human_predicting_human: return "human_predicting_human";
    case HumanPerfVariant::optimal_prediction: return "optimal_prediction";
    case HumanPerfVariant::majority_voting: return "majority_voting";
  }
  return "?";
}

MetricReport metrics_from_samples(const std::vector<PairedSample>& samples) {
  if (samples.empty()) throw ValidationError("empty evaluation");
  MetricReport report;
  std::vector<double> preds, refs;
  preds.reserve(samples.size());
  refs.reserve(samples.size());
  std::set<std::pair<std::string, std::string>> pairs;
  std::map<std::string, std::vector<PairedSample>> by_aspect;
  for (const auto& s : samples) {
    preds.push_back(s.prediction);
    refs.push_back(s.reference);
    pairs.insert({s.story_id, s.aspect});
    by_aspect[s.aspect].push_back(s);
  }
  report.n_expanded = samples.size();
  report.n_pairs = pairs.size();
  report.mse = mse(preds, refs);
  report.f1 = f1_binarized(preds, refs);
  try {
    report.pearson_rho = pearson(preds, refs);
  } catch (const MetricError&) {
    report.pearson_rho.reset();  // undefined stays absent, never silent 0
  }

  if (by_aspect.size() > 1) {
    for (const auto& [aspect, aspect_samples] : by_aspect) {
      MetricReport sub;
      std::vector<double> ap, ar;
      std::set<std::pair<std::string, std::string>> apairs;
      for (const auto& s : aspect_samples) {
        ap.push_back(s.prediction);
        ar.push_back(s.reference);
        apairs.insert({s.story_id, s.aspect});
      }
      sub.n_expanded = aspect_samples.size();
      sub.n_pairs = apairs.size();
      sub.mse = mse(ap, ar);
      sub.f1 = f1_binarized(ap, ar);
      if (aspect_samples.size() >= 10) {
        try {
          sub.pearson_rho = pearson(ap, ar);
        } catch (const MetricError&) {
          sub.pearson_rho.reset();
        }
      }
      report.per_aspect.emplace(aspect, std::move(sub));
    }
  }
  return report;
}

std::vector<PairedSample> expand_predictions(const std::vector<ScoredPrediction>& predictions,
                                             const std::vector<PairGroup>& groups,
                                             std::size_t* uncovered) {
  std::map<std::pair<std::string, std::string>, const PairGroup*> index;
  for (const auto& g : groups) index[{g.story_id, g.aspect}] = &g;

  std::vector<PairedSample> samples;
  std::set<std::pair<std::string, std::string>> covered;
  for (const auto& pred : predictions) {
    const auto key = std::make_pair(pred.story_id, pred.aspect);
    const auto it = index.find(key);
    if (it == index.end()) {
      throw ValidationError("prediction for unknown pair (" + pred.story_id + ", " +
                            pred.aspect + ")");
    }
    if (!covered.insert(key).second) {
      throw ValidationError("duplicate prediction for pair (" + pred.story_id + ", " +
                            pred.aspect + ")");
    }
    const PairGroup& group = *it->second;
    for (std::size_t j = 0; j < group.records.size(); ++j) {
      samples.push_back(
          {pred.final_score, group.records[j].rating, pred.story_id, pred.aspect, j});
    }
  }
  if (uncovered != nullptr) *uncovered = groups.size() - covered.size();
  return samples;
}

EvalReport expand_and_score(const std::vector<ScoredPrediction>& predictions,
                            const std::vector<PairGroup>& groups) {
  EvalReport report;
  std::size_t uncovered = 0;
  const auto samples = expand_predictions(predictions, groups, &uncovered);
  if (samples.empty()) throw ValidationError("empty evaluation");
  report.overall = metrics_from_samples(samples);
  report.n_pairs = report.overall.n_pairs;
  report.n_expanded = report.overall.n_expanded;
  report.n_uncovered_pairs = uncovered;
  report.mean_diversity_sd = diversity_report(predictions);
  return report;
}

double majority_rating(const std::vector<double>& ratings) {
  if (ratings.empty()) throw ValidationError("majority_rating: empty ratings");
  std::map<double, std::size_t> counts;
  for (double r : ratings) ++counts[r];
  double winner = counts.begin()->first;
  std::size_t best = counts.begin()->second;
  for (const auto& [value, count] : counts) {
    if (count > best) {  // ascending keys: ties keep the lower rating
      winner = value;
      best = count;
    }
  }
  return winner;
}

std::vector<PairedSample> human_perf_samples(const std::vector<PairGroup>& groups,
                                             HumanPerfVariant variant,
                                             const HumanPerfOptions& options) {
  std::vector<PairedSample> samples;
  for (const auto& group : groups) {
    const std::vector<double> ratings = group.ratings();
    if (ratings.size() < 2) continue;  // single-annotator pairs are filtered upstream
    switch (variant) {
      case HumanPerfVariant::human_predicting_human: {
        if (options.sample_one) {
          Rng rng(derive_pair_seed(options.seed, group.story_id, group.aspect));
          const std::size_t p = static_cast<std::size_t>(rng.next_below(ratings.size()));
          for (std::size_t j = 0; j < ratings.size(); ++j) {
            if (j == p) continue;
            samples.push_back({ratings[p], ratings[j], group.story_id, group.aspect, j});
          }
        } else {
          for (std::size_t i = 0; i < ratings.size(); ++i) {
            for (std::size_t j = 0; j < ratings.size(); ++j) {
              if (i == j) continue;
              samples.push_back({ratings[i], ratings[j], group.story_id, group.aspect, j});
            }
          }
        }
        break;
      }
      case HumanPerfVariant::optimal_prediction: {
        const double mean = aggregate_mean(ratings);
        for (std::size_t j = 0; j < ratings.size(); ++j) {
          samples.push_back({mean, ratings[j], group.story_id, group.aspect, j});
        }
        break;
      }
      case HumanPerfVariant::majority_voting: {
        const double mode = majority_rating(ratings);
        for (std::size_t j = 0; j < ratings.size(); ++j) {
          samples.push_back({mode, ratings[j], group.story_id, group.aspect, j});
        }
        break;
      }
    }
  }
  return samples;
}

HumanPerfReport human_performance(const std::vector<PairGroup>& groups, HumanPerfVariant variant,
                                  const HumanPerfOptions& options) {
  HumanPerfReport report;
  report.variant = variant;
  report.report = metrics_from_samples(human_perf_samples(groups, variant, options));
  return report;
}

double diversity_report(const std::vector<ScoredPrediction>& predictions) {
  if (predictions.empty()) return 0.0;
  KahanSum s;
  for (const auto& pred : predictions) s.add(pred.diversity_sd);
  return s.value() / static_cast<double>(predictions.size());
}

std::vector<std::vector<double>> icc_matrix(const std::vector<PairGroup>& groups,
                                            const std::string& aspect) {
  const bool all = to_lower_ascii(aspect) == "all";
  const std::string wanted = all ? "" : canonicalize_aspect(aspect).label;
  std::vector<std::vector<double>> matrix;
  for (const auto& group : groups) {
    if (!all && group.aspect != wanted) continue;
    if (group.records.size() < 2) continue;
    matrix.push_back(group.ratings());
  }
  return matrix;
}

namespace {

ordered_json metric_report_json(const MetricReport& report) {
  ordered_json j;
  if (report.pearson_rho) {
    j["pearson_rho"] = *report.pearson_rho;
  } else {
    j["pearson_rho"] = nullptr;
  }
  j["mse"] = report.mse;
  j["f1"] = report.f1;
  j["n_pairs"] = report.n_pairs;
  j["n_expanded"] = report.n_expanded;
  if (!report.per_aspect.empty()) {
    ordered_json per;
    for (const auto& [aspect, sub] : report.per_aspect) per[aspect] = metric_report_json(sub);
    j["per_aspect"] = std::move(per);
  }
  return j;
}

std::string metric_line(const MetricReport& report) {
  char buf[160];
  if (report.pearson_rho) {
    std::snprintf(buf, sizeof(buf), "rho=%+.4f  mse=%.4f  f1=%.4f  (n=%zu)",
                  *report.pearson_rho, report.mse, report.f1, report.n_expanded);
  } else {
    std::snprintf(buf, sizeof(buf), "rho=undefined  mse=%.4f  f1=%.4f  (n=%zu)", report.mse,
                  report.f1, report.n_expanded);
  }
  return buf;
}

}  // namespace

std::string eval_report_to_json(const EvalReport& report) {
  ordered_json j;
  j["overall"] = metric_report_json(report.overall);
  j["mean_diversity_sd"] = report.mean_diversity_sd;
  j["n_pairs"] = report.n_pairs;
  j["n_expanded"] = report.n_expanded;
  j["n_uncovered_pairs"] = report.n_uncovered_pairs;
  ordered_json cfg;
  cfg["backend"] = report.config.backend;
  cfg["n"] = report.config.n;
  cfg["aggregation"] = report.config.aggregation;
  cfg["seed"] = report.config.seed;
  j["config"] = std::move(cfg);
  return j.dump(2);
}

std::string human_perf_report_to_json(const HumanPerfReport& report) {
  ordered_json j;
  j["variant"] = human_variant_name(report.variant);
  j["report"] = metric_report_json(report.report);
  return j.dump(2);
}

std::string format_metric_table(const MetricReport& report, const std::string& title) {
  std::string out = title.empty() ? "" : title + "\n";
  out += "  overall                    " + metric_line(report) + "\n";
  for (const auto& [aspect, sub] : report.per_aspect) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "  %-26s ", aspect.c_str());
    out += buf + metric_line(sub) + "\n";
  }
  return out;
}

std::string format_report_table(const EvalReport& report) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf),
                "pairs=%zu  expanded=%zu  uncovered=%zu  mean_diversity_sd=%.4f\n",
                report.n_pairs, report.n_expanded, report.n_uncovered_pairs,
                report.mean_diversity_sd);
  out += buf;
  out += format_metric_table(report.overall, "");
  return out;
}

}  // namespace coke
