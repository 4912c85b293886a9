#include "coke/viz.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "json.hpp"

namespace coke {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// Shortest round-trippable decimal rendering (what the JSON dumper emits).
std::string num(double v) { return json(v).dump(); }

std::string svg_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

GlobalKeywordIndex build_global_index(const std::vector<AnnotationRecord>& train_records,
                                      const ExtractorConfig& extractor, const StopwordList& stop,
                                      const SentimentLexicon& lexicon) {
  IdfTable idf;
  if (extractor.method == ExtractorMethod::tfidf) {
    std::vector<std::string> texts;
    texts.reserve(train_records.size());
    for (const auto& rec : train_records) texts.push_back(rec.explanation);
    if (!texts.empty()) idf = IdfTable::fit(texts, stop, extractor.ngram_min, extractor.ngram_max);
  }

  std::map<std::string, std::pair<double, std::size_t>> acc;  // keyword -> (sum, count)
  for (const auto& rec : train_records) {
    const KeywordSequence seq = extract_keywords(rec.explanation, extractor, stop, lexicon, &idf);
    std::unordered_set<std::string> distinct(seq.items.begin(), seq.items.end());
    for (const auto& kw : distinct) {
      auto& slot = acc[kw];
      slot.first += rec.rating;
      slot.second += 1;
    }
  }
  GlobalKeywordIndex index;
  for (const auto& [kw, slot] : acc) {
    index[kw] = {slot.first / static_cast<double>(slot.second), slot.second};
  }
  return index;
}

std::string global_index_to_jsonl(const GlobalKeywordIndex& index) {
  std::string out;
  for (const auto& [kw, stat] : index) {
    ordered_json row;
    row["keyword"] = kw;
    row["mean"] = stat.mean;
    row["count"] = stat.count;
    out += row.dump();
    out += '\n';
  }
  return out;
}

void write_global_index(const std::string& path, const GlobalKeywordIndex& index) {
  write_file(path, global_index_to_jsonl(index));
}

GlobalKeywordIndex read_global_index(const std::string& path) {
  GlobalKeywordIndex index;
  for_each_line(path, [&](std::string_view line, std::size_t lineno) {
    if (trim(line).empty()) return;
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.contains("keyword") || !row.contains("mean")) {
      throw ValidationError("global index line " + std::to_string(lineno) + ": invalid entry");
    }
    index[row["keyword"].get<std::string>()] = {row["mean"].get<double>(),
                                                row.value("count", std::size_t{1})};
  });
  return index;
}

std::vector<KeywordPoint> keyword_points(const ScoredPrediction& prediction,
                                         const GlobalKeywordIndex& index) {
  std::map<std::string, std::pair<double, std::size_t>> acc;  // keyword -> (score sum, freq)
  for (std::size_t i = 0; i < prediction.candidates.size(); ++i) {
    const auto& items = prediction.candidates[i].keywords.items;
    std::unordered_set<std::string> distinct;
    for (const auto& kw : items) distinct.insert(to_lower_ascii(kw));
    for (const auto& kw : distinct) {
      auto& slot = acc[kw];
      slot.first += prediction.candidate_scores[i];
      slot.second += 1;
    }
  }
  std::vector<KeywordPoint> points;
  points.reserve(acc.size());
  for (const auto& [kw, slot] : acc) {
    KeywordPoint p;
    p.keyword = kw;
    p.local_mean = slot.first / static_cast<double>(slot.second);
    p.frequency = slot.second;
    const auto it = index.find(kw);
    if (it != index.end()) p.global_mean = it->second.mean;
    points.push_back(std::move(p));
  }
  std::sort(points.begin(), points.end(), [](const KeywordPoint& a, const KeywordPoint& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.keyword < b.keyword;
  });
  return points;
}

std::string render_points_csv(const std::vector<KeywordPoint>& points) {
  std::string out = "keyword,local_mean,global_mean,frequency\n";
  for (const auto& p : points) {
    out += p.keyword;
    out += ',';
    out += num(p.local_mean);
    out += ',';
    if (p.global_mean) out += num(*p.global_mean);
    out += ',';
    out += std::to_string(p.frequency);
    out += '\n';
  }
  return out;
}

std::vector<KeywordPoint> parse_points_csv(const std::string& csv) {
  std::vector<KeywordPoint> points;
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start < csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string::npos) end = csv.size();
    const std::string line = csv.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (lineno == 1 || trim(line).empty()) continue;  // header
    const auto fields = split(line, ',');
    if (fields.size() != 4) {
      throw ValidationError("points csv line " + std::to_string(lineno) + ": expected 4 fields");
    }
    KeywordPoint p;
    p.keyword = fields[0];
    p.local_mean = std::stod(fields[1]);
    if (!fields[2].empty()) p.global_mean = std::stod(fields[2]);
    p.frequency = static_cast<std::size_t>(std::stoull(fields[3]));
    points.push_back(std::move(p));
  }
  return points;
}

std::string render_points_svg(const std::vector<KeywordPoint>& points) {
  if (points.empty()) throw ValidationError("svg scatter: need at least one point");

  const double size = 640.0;
  const double margin = 70.0;
  const double plot = size - 2 * margin;
  auto px = [&](double v) {  // local mean on x
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", margin + v * plot);
    return std::string(buf);
  };
  auto py = [&](double v) {  // global mean on y, origin bottom-left
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", size - margin - v * plot);
    return std::string(buf);
  };

  std::size_t max_freq = 1;
  for (const auto& p : points) max_freq = std::max(max_freq, p.frequency);

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
         "viewBox=\"0 0 640 640\">\n";
  svg += "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
  // axes with ticks at the five anchors
  svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + px(0) + "\" y1=\"" + py(0) + "\" x2=\"" + px(1) + "\" y2=\"" + py(0) +
         "\"/>\n";
  svg += "<line x1=\"" + px(0) + "\" y1=\"" + py(0) + "\" x2=\"" + px(0) + "\" y2=\"" + py(1) +
         "\"/>\n";
  svg += "</g>\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = static_cast<double>(i) / 4.0;
    char label[8];
    std::snprintf(label, sizeof(label), "%.2f", v);
    svg += "<text x=\"" + px(v) + "\" y=\"" + py(-0.05) + "\" text-anchor=\"middle\">" + label +
           "</text>\n";
    svg += "<text x=\"" + px(-0.08) + "\" y=\"" + py(v) + "\" text-anchor=\"middle\">" + label +
           "</text>\n";
  }
  svg += "<text x=\"" + px(0.5) +
         "\" y=\"625.00\" text-anchor=\"middle\">keyword rating for this story</text>\n";
  svg += "<text x=\"18.00\" y=\"" + py(0.5) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18.00 " + py(0.5) +
         ")\">global keyword rating (training set)</text>\n";
  svg += "</g>\n";

  svg += "<g fill=\"steelblue\" fill-opacity=\"0.6\" stroke=\"none\">\n";
  for (const auto& p : points) {
    if (!p.global_mean) continue;
    const double r =
        3.0 + 9.0 * static_cast<double>(p.frequency) / static_cast<double>(max_freq);
    char rbuf[32];
    std::snprintf(rbuf, sizeof(rbuf), "%.2f", r);
    svg += "<circle cx=\"" + px(p.local_mean) + "\" cy=\"" + py(*p.global_mean) + "\" r=\"" +
           rbuf + "\"/>\n";
  }
  svg += "</g>\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"black\">\n";
  for (const auto& p : points) {
    if (!p.global_mean) continue;
    svg += "<text x=\"" + px(p.local_mean) + "\" y=\"" + py(*p.global_mean) +
           "\" dx=\"6\" dy=\"-6\">" + svg_escape(p.keyword) + "</text>\n";
  }
  // keywords generated for this story but unseen in the training index
  std::vector<std::string> missing;
  for (const auto& p : points) {
    if (!p.global_mean) missing.push_back(p.keyword);
  }
  if (!missing.empty()) {
    svg += "<text x=\"" + px(0) + "\" y=\"638.00\">not in training index: " +
           svg_escape(join(missing, ", ")) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "</svg>\n";
  return svg;
}

void render_scatter(const std::vector<KeywordPoint>& points, const std::string& out_path,
                    ScatterFormat format) {
  if (points.empty()) throw ValidationError("render_scatter: need at least one point");
  write_file(out_path,
             format == ScatterFormat::svg ? render_points_svg(points) : render_points_csv(points));
}

}  // namespace coke
