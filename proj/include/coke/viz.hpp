#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coke/dataset.hpp"
#include "coke/inference.hpp"
#include "coke/keywords.hpp"

namespace coke {

// keyword -> (mean normalized training rating, record count)
struct GlobalKeywordStat {
  double mean = 0.0;
  std::size_t count = 0;
};
using GlobalKeywordIndex = std::map<std::string, GlobalKeywordStat>;

struct KeywordPoint {
  std::string keyword;
  double local_mean = 0.0;                 // mean score of candidates containing it
  std::optional<double> global_mean;       // absent when missing from the index
  std::size_t frequency = 0;               // candidates containing the keyword
};

// Mean rating per keyword over every training record whose extracted keyword
// sequence contains it.
GlobalKeywordIndex build_global_index(const std::vector<AnnotationRecord>& train_records,
                                      const ExtractorConfig& extractor, const StopwordList& stop,
                                      const SentimentLexicon& lexicon);

std::string global_index_to_jsonl(const GlobalKeywordIndex& index);
void write_global_index(const std::string& path, const GlobalKeywordIndex& index);
GlobalKeywordIndex read_global_index(const std::string& path);

// One point per distinct generated keyword, ordered by frequency desc then
// keyword asc. Membership is exact string match after lowercasing.
std::vector<KeywordPoint> keyword_points(const ScoredPrediction& prediction,
                                         const GlobalKeywordIndex& index);

// CSV columns: keyword,local_mean,global_mean,frequency (global empty when
// missing).
std::string render_points_csv(const std::vector<KeywordPoint>& points);
std::vector<KeywordPoint> parse_points_csv(const std::string& csv);

// Self-contained SVG scatter over [0,1]^2; marker radius grows with
// frequency and each marker carries the keyword label. Points without a
// global mean are listed in a footnote group instead of plotted.
std::string render_points_svg(const std::vector<KeywordPoint>& points);

enum class ScatterFormat { svg, csv };
void render_scatter(const std::vector<KeywordPoint>& points, const std::string& out_path,
                    ScatterFormat format);

}  // namespace coke
