#include "coke/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace coke {

using nlohmann::json;

const std::array<std::string_view, 10> kCanonicalAspects = {
    "ending",
    "character shaping",
    "scene description",
    "middle/twist/flow",
    "opening/beginning",
    "novel/idea",
    "funny/hilarious/laugh",
    "horror/scary",
    "sad/crying/tear",
    "heartwarming/touch",
};

Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "dev" || s == "valid" || s == "validation") return Split::dev;
  if (s == "test") return Split::test;
  throw ValidationError("unknown split: " + std::string(s));
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "?";
}

double normalize_rating(int rating_raw) {
  if (rating_raw < 1 || rating_raw > 5) {
    throw ValidationError("rating must be in [1, 5], got " + std::to_string(rating_raw));
  }
  return static_cast<double>(rating_raw - 1) / 4.0;
}

int denormalize_rating(double rating) {
  const int raw = static_cast<int>(std::lround(rating * 4.0)) + 1;
  return std::clamp(raw, 1, 5);
}

AspectMatch canonicalize_aspect(std::string_view aspect) {
  const std::string lowered = to_lower_ascii(trim(aspect));
  for (const auto& canonical : kCanonicalAspects) {
    if (lowered == canonical) return {std::string(canonical), true};
  }
  return {std::string(trim(aspect)), false};
}

std::vector<double> PairGroup::ratings() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.rating);
  return out;
}

DataFormat parse_format(std::string_view name) {
  const std::string n = to_lower_ascii(name);
  if (n == "jsonl" || n == "json-lines" || n == "ndjson") return DataFormat::jsonl;
  if (n == "csv") return DataFormat::csv;
  throw ValidationError("unknown data format: " + std::string(name));
}

namespace {

[[noreturn]] void row_error(std::size_t lineno, const std::string& field,
                            const std::string& detail) {
  throw ValidationError("line " + std::to_string(lineno) + ": field '" + field + "': " + detail);
}

AnnotationRecord record_from_fields(std::size_t lineno, const std::string& story_id,
                                    const std::string& prompt, const std::string& story,
                                    const std::string& aspect, long long rating_raw,
                                    const std::string& explanation,
                                    std::optional<std::string> annotator_id,
                                    const std::string& split) {
  AnnotationRecord rec;
  rec.story_id = story_id;
  rec.prompt = prompt;
  rec.story = story;
  if (rec.story.empty()) row_error(lineno, "story", "must be non-empty");
  const AspectMatch match = canonicalize_aspect(aspect);
  if (match.label.empty()) row_error(lineno, "aspect", "must be non-empty");
  rec.aspect = match.label;
  rec.aspect_known = match.known;
  if (rating_raw < 1 || rating_raw > 5) {
    row_error(lineno, "rating",
              "must be an integer in [1, 5], got " + std::to_string(rating_raw) +
                  " (story_id=" + rec.story_id + ", aspect=" + rec.aspect + ")");
  }
  rec.rating_raw = static_cast<int>(rating_raw);
  rec.rating = normalize_rating(*rec.rating_raw);
  rec.explanation = explanation;
  rec.annotator_id = std::move(annotator_id);
  try {
    rec.split = parse_split(split);
  } catch (const ValidationError& e) {
    row_error(lineno, "split", e.what());
  }
  return rec;
}

std::vector<AnnotationRecord> load_jsonl(const std::string& path) {
  std::vector<AnnotationRecord> records;
  for_each_line(path, [&](std::string_view line, std::size_t lineno) {
    if (trim(line).empty()) return;
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded()) {
      throw ValidationError("line " + std::to_string(lineno) + ": invalid JSON");
    }
    auto need_string = [&](const char* key) -> std::string {
      if (!row.contains(key)) row_error(lineno, key, "missing");
      if (!row[key].is_string()) row_error(lineno, key, "must be a string");
      return row[key].get<std::string>();
    };
    if (!row.contains("rating")) row_error(lineno, "rating", "missing");
    if (!row["rating"].is_number_integer()) {
      row_error(lineno, "rating", "must be an integer in [1, 5]");
    }
    std::optional<std::string> annotator;
    if (row.contains("annotator_id") && !row["annotator_id"].is_null()) {
      if (!row["annotator_id"].is_string()) row_error(lineno, "annotator_id", "must be a string");
      annotator = row["annotator_id"].get<std::string>();
    }
    records.push_back(record_from_fields(
        lineno, need_string("story_id"),
        row.contains("prompt") && row["prompt"].is_string() ? row["prompt"].get<std::string>()
                                                            : std::string(),
        need_string("story"), need_string("aspect"), row["rating"].get<long long>(),
        need_string("explanation"), std::move(annotator), need_string("split")));
  });
  return records;
}

// RFC4180-ish field splitter; quoted fields may contain commas and doubled
// quotes, but not newlines (rows stay line-addressable for error messages).
std::vector<std::string> split_csv_row(std::string_view line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"' && current.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (quoted) {
    throw ValidationError("line " + std::to_string(lineno) + ": unterminated quoted field");
  }
  fields.push_back(std::move(current));
  return fields;
}

std::vector<AnnotationRecord> load_csv(const std::string& path) {
  std::vector<AnnotationRecord> records;
  std::vector<std::string> header;
  for_each_line(path, [&](std::string_view line, std::size_t lineno) {
    if (line.empty()) return;
    auto fields = split_csv_row(line, lineno);
    if (header.empty()) {
      header = std::move(fields);
      return;
    }
    if (fields.size() != header.size()) {
      throw ValidationError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    auto get = [&](const std::string& key) -> std::optional<std::string> {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == key) return fields[i];
      }
      return std::nullopt;
    };
    auto need = [&](const std::string& key) -> std::string {
      auto v = get(key);
      if (!v) row_error(lineno, key, "missing column");
      return *v;
    };
    const std::string rating_text = need("rating");
    long long raw = 0;
    try {
      std::size_t used = 0;
      raw = std::stoll(rating_text, &used);
      if (used != rating_text.size()) throw std::invalid_argument(rating_text);
    } catch (const std::exception&) {
      row_error(lineno, "rating", "must be an integer in [1, 5], got '" + rating_text + "'");
    }
    std::optional<std::string> annotator = get("annotator_id");
    if (annotator && annotator->empty()) annotator.reset();
    records.push_back(record_from_fields(lineno, need("story_id"),
                                         get("prompt").value_or(""), need("story"),
                                         need("aspect"), raw, need("explanation"),
                                         std::move(annotator), need("split")));
  });
  return records;
}

}  // namespace

std::vector<AnnotationRecord> load_dataset(const std::string& path, DataFormat format) {
  std::vector<AnnotationRecord> records =
      format == DataFormat::jsonl ? load_jsonl(path) : load_csv(path);
  std::stable_sort(records.begin(), records.end(),
                   [](const AnnotationRecord& a, const AnnotationRecord& b) {
                     if (a.story_id != b.story_id) return a.story_id < b.story_id;
                     return a.aspect < b.aspect;
                   });
  return records;
}

std::size_t ensure_dev_split(std::vector<AnnotationRecord>& records) {
  const bool has_dev = std::any_of(records.begin(), records.end(),
                                   [](const auto& r) { return r.split == Split::dev; });
  if (has_dev) return 0;
  std::size_t moved = 0;
  for (auto& rec : records) {
    if (rec.split == Split::train && fnv1a64(rec.prompt) % 5 == 0) {
      rec.split = Split::dev;
      ++moved;
    }
  }
  return moved;
}

std::vector<PairGroup> group_pairs(const std::vector<AnnotationRecord>& records,
                                   std::size_t min_annotators) {
  if (min_annotators < 1) throw ValidationError("min_annotators must be >= 1");
  std::map<std::pair<std::string, std::string>, PairGroup> groups;
  for (const auto& rec : records) {
    auto& group = groups[{rec.story_id, rec.aspect}];
    if (group.records.empty()) {
      group.story_id = rec.story_id;
      group.aspect = rec.aspect;
    } else if (group.records.front().story != rec.story) {
      throw ValidationError("pair (" + rec.story_id + ", " + rec.aspect +
                            ") has records with differing story text");
    }
    group.records.push_back(rec);
  }
  std::vector<PairGroup> out;
  out.reserve(groups.size());
  for (auto& [key, group] : groups) {
    if (group.records.size() >= min_annotators) out.push_back(std::move(group));
  }
  return out;
}

DatasetStats compute_stats(const std::vector<AnnotationRecord>& records) {
  DatasetStats stats;
  stats.n_records = records.size();
  std::map<std::pair<std::string, std::string>, std::size_t> pair_sizes;
  std::vector<std::string> unknown;
  for (const auto& rec : records) {
    ++stats.per_split[std::string(split_name(rec.split))];
    ++stats.per_aspect[rec.aspect];
    const int raw = rec.rating_raw ? *rec.rating_raw : denormalize_rating(rec.rating);
    auto& hist = stats.rating_histogram[rec.aspect];
    ++hist[static_cast<std::size_t>(raw - 1)];
    ++pair_sizes[{rec.story_id, rec.aspect}];
    if (!rec.aspect_known) unknown.push_back(rec.aspect);
  }
  for (const auto& [aspect, count] : stats.per_aspect) {
    stats.aspect_share_percent[aspect] =
        100.0 * static_cast<double>(count) / static_cast<double>(stats.n_records);
  }
  for (const auto& [key, size] : pair_sizes) ++stats.annotators_per_pair[size];
  std::sort(unknown.begin(), unknown.end());
  unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
  stats.unknown_aspects = std::move(unknown);
  return stats;
}

std::vector<AnnotationRecord> filter_split(const std::vector<AnnotationRecord>& records,
                                           Split split) {
  std::vector<AnnotationRecord> out;
  for (const auto& rec : records) {
    if (rec.split == split) out.push_back(rec);
  }
  return out;
}

}  // namespace coke
