#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coke/common.hpp"

namespace coke {

// One expanded (prediction, annotator rating) comparison.
struct PairedSample {
  double prediction = 0.0;
  double reference = 0.0;
  std::string story_id;
  std::string aspect;
  std::size_t annotator_index = 0;
};

struct MetricReport {
  std::optional<double> pearson_rho;  // absent when correlation is undefined
  double mse = 0.0;
  double f1 = 0.0;
  std::size_t n_pairs = 0;
  std::size_t n_expanded = 0;
  std::map<std::string, MetricReport> per_aspect;
};

// Sample Pearson correlation. Throws MetricError on length mismatch, length
// < 2, or zero variance in either vector (undefined, never silently 0).
double pearson(std::span<const double> xs, std::span<const double> ys);

// Mean of squared differences. Throws MetricError on length mismatch or
// empty input.
double mse(std::span<const double> xs, std::span<const double> ys);

// F1 of the positive class after binarizing both sides with value >=
// threshold -> positive. Degenerate cases: no positives on either side -> 1;
// positives on exactly one side with no true positives -> 0.
double f1_binarized(std::span<const double> preds, std::span<const double> refs,
                    double threshold = 0.5);

// Population (divide-by-n) standard deviation. Throws MetricError on empty
// input.
double population_sd(std::span<const double> xs);

enum class IccForm { single, average };  // ICC(1,1) vs ICC(1,k)

// One-way random-effects intraclass correlation over targets-by-raters
// ratings. Each inner vector holds one target's ratings; rows may have
// different lengths (unbalanced designs use the k0 correction for the mean
// group size). Requires >= 2 targets with >= 2 ratings each; rows with fewer
// than 2 ratings are rejected. Result clamped to [-1, 1].
double icc_oneway(const std::vector<std::vector<double>>& ratings,
                  IccForm form = IccForm::single);

}  // namespace coke
