#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coke/common.hpp"

namespace coke {

// The ten canonical aspect labels, lowercased.
extern const std::array<std::string_view, 10> kCanonicalAspects;

enum class Split { train, dev, test };

Split parse_split(std::string_view s);
std::string_view split_name(Split s);

// One annotator's (story, aspect, rating, explanation) tuple.
struct AnnotationRecord {
  std::string story_id;
  std::string prompt;
  std::string story;
  std::string aspect;                 // canonical form when recognized
  std::optional<int> rating_raw;      // 1..5 Likert; absent for synthetic records
  double rating = 0.0;                // normalized to [0, 1]
  std::string explanation;
  std::optional<std::string> annotator_id;
  Split split = Split::train;
  bool aspect_known = true;           // false for labels outside the canonical ten
};

// (rating_raw - 1) / 4, the min-max normalization with min=1 and max=5.
double normalize_rating(int rating_raw);
int denormalize_rating(double rating);

// Case-insensitive match against the canonical aspect labels; unknown labels
// are preserved verbatim with known=false.
struct AspectMatch {
  std::string label;
  bool known;
};
AspectMatch canonicalize_aspect(std::string_view aspect);

// Records sharing one (story_id, aspect) key.
struct PairGroup {
  std::string story_id;
  std::string aspect;
  std::vector<AnnotationRecord> records;

  const std::string& story() const { return records.front().story; }
  std::vector<double> ratings() const;
};

struct DatasetStats {
  std::size_t n_records = 0;
  std::map<std::string, std::size_t> per_split;
  std::map<std::string, std::size_t> per_aspect;
  std::map<std::string, double> aspect_share_percent;           // sums to 100
  std::map<std::string, std::array<std::size_t, 5>> rating_histogram;  // raw 1..5 per aspect
  std::map<std::size_t, std::size_t> annotators_per_pair;
  std::vector<std::string> unknown_aspects;
};

enum class DataFormat { jsonl, csv };

DataFormat parse_format(std::string_view name);

// Loads and validates records. Malformed rows raise ValidationError naming
// the line number and field. Output is sorted by (story_id, aspect, input
// order).
std::vector<AnnotationRecord> load_dataset(const std::string& path,
                                           DataFormat format = DataFormat::jsonl);

// When no record carries split=dev, reassigns train records whose prompt
// hashes to 0 mod 5 into the dev split. Returns the number of moved records.
std::size_t ensure_dev_split(std::vector<AnnotationRecord>& records);

// Groups records by (story_id, aspect) and drops groups with fewer than
// min_annotators records. Records in one group must share the story text.
std::vector<PairGroup> group_pairs(const std::vector<AnnotationRecord>& records,
                                   std::size_t min_annotators = 2);

DatasetStats compute_stats(const std::vector<AnnotationRecord>& records);

std::vector<AnnotationRecord> filter_split(const std::vector<AnnotationRecord>& records,
                                           Split split);

}  // namespace coke
