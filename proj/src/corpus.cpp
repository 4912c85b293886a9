#include "coke/corpus.hpp"

#include <algorithm>
#include <cctype>

namespace coke {

RationalizerAblation parse_ablation(std::string_view name) {
  const std::string n = to_lower_ascii(name);
  if (n == "keywords_then_explanation" || n == "full") {
    return RationalizerAblation::keywords_then_explanation;
  }
  if (n == "keywords_only") return RationalizerAblation::keywords_only;
  if (n == "explanation_only") return RationalizerAblation::explanation_only;
  throw ValidationError("unknown rationalizer ablation: " + std::string(name));
}

std::string ablation_name(RationalizerAblation a) {
  switch (a) {
    case RationalizerAblation::keywords_then_explanation: return "keywords_then_explanation";
    case RationalizerAblation::keywords_only: return "keywords_only";
    case RationalizerAblation::explanation_only: return "explanation_only";
  }
  return "?";
}

std::string Composition::to_string() const {
  std::vector<std::string> parts;
  if (story) parts.push_back("s");
  if (aspect) parts.push_back("a");
  if (keywords) parts.push_back("k");
  if (explanation) parts.push_back("e");
  return join(parts, ",");
}

Composition Composition::parse(std::string_view spec) {
  Composition comp{false, false, false, false};
  for (const auto& raw : split(spec, ',')) {
    const std::string part = to_lower_ascii(trim(raw));
    if (part == "s" || part == "story") {
      comp.story = true;
    } else if (part == "a" || part == "aspect") {
      comp.aspect = true;
    } else if (part == "k" || part == "keywords") {
      comp.keywords = true;
    } else if (part == "e" || part == "explanation") {
      comp.explanation = true;
    } else if (!part.empty()) {
      throw ValidationError("unknown composition component: " + part);
    }
  }
  if (!comp.any()) throw ValidationError("composition selects no components");
  return comp;
}

std::string truncate_story(const std::string& story, std::size_t max_tokens) {
  if (max_tokens == 0) return story;
  std::size_t count = 0;
  std::size_t i = 0;
  const std::size_t n = story.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(story[i]))) ++i;
    if (i >= n) break;
    ++count;
    while (i < n && !std::isspace(static_cast<unsigned char>(story[i]))) ++i;
    if (count == max_tokens) break;
  }
  if (count < max_tokens || i >= n) return story;
  // anything after the cut besides whitespace means content was dropped
  std::size_t rest = i;
  while (rest < n && std::isspace(static_cast<unsigned char>(story[rest]))) ++rest;
  if (rest >= n) return story;
  return story.substr(0, i) + "…";
}

namespace {

std::string join_parts(const std::vector<std::string>& parts) { return join(parts, " "); }

constexpr std::string_view kKeywordsLabel = "keywords:";
constexpr std::string_view kRationaleLabel = "rationale:";
constexpr std::string_view kKeywordSep = ", ";

}  // namespace

std::string render_rationalizer_input(const std::string& aspect, const std::string& story,
                                      const CorpusOptions& opts) {
  return join_parts({"aspect:", aspect, "story:", truncate_story(story, opts.max_story_tokens)});
}

std::string render_rationalizer_target(const std::vector<std::string>& keywords,
                                       const std::string& explanation,
                                       RationalizerAblation ablation) {
  std::vector<std::string> parts;
  if (ablation != RationalizerAblation::explanation_only) {
    parts.emplace_back(kKeywordsLabel);
    if (!keywords.empty()) parts.push_back(join(keywords, kKeywordSep));
  }
  if (ablation != RationalizerAblation::keywords_only) {
    parts.emplace_back(kRationaleLabel);
    if (!explanation.empty()) parts.push_back(explanation);
  }
  return join_parts(parts);
}

std::string render_scorer_input(const std::string& aspect, const std::string& story,
                                const std::vector<std::string>& keywords,
                                const std::string& explanation, const Composition& comp,
                                const CorpusOptions& opts) {
  if (!comp.any()) throw ValidationError("scorer composition selects no components");
  std::vector<std::string> parts;
  if (comp.aspect) {
    parts.emplace_back("aspect:");
    parts.push_back(aspect);
  }
  if (comp.story) {
    parts.emplace_back("story:");
    parts.push_back(truncate_story(story, opts.max_story_tokens));
  }
  if (comp.keywords) {
    parts.emplace_back(kKeywordsLabel);
    if (!keywords.empty()) parts.push_back(join(keywords, kKeywordSep));
  }
  if (comp.explanation) {
    parts.emplace_back("explanation:");
    if (!explanation.empty()) parts.push_back(explanation);
  }
  return join_parts(parts);
}

ParsedTarget parse_rationalizer_target(std::string_view target) {
  ParsedTarget out;
  auto parse_keywords = [&](std::string_view text) {
    const std::string trimmed = trim(text);
    if (trimmed.empty()) return;
    for (const auto& piece : split(trimmed, ',')) {
      const std::string kw = trim(piece);
      if (!kw.empty()) out.keywords.push_back(kw);
    }
  };

  if (target.substr(0, kKeywordsLabel.size()) == kKeywordsLabel) {
    std::string_view rest = target.substr(kKeywordsLabel.size());
    const std::string marker = " " + std::string(kRationaleLabel) + " ";
    const std::size_t pos = rest.find(marker);
    if (pos == std::string_view::npos) {
      // keywords-only target; tolerate a bare trailing "rationale:" label
      const std::string tail_marker = " " + std::string(kRationaleLabel);
      if (rest.size() >= tail_marker.size() &&
          rest.substr(rest.size() - tail_marker.size()) == tail_marker) {
        rest = rest.substr(0, rest.size() - tail_marker.size());
      }
      parse_keywords(rest);
      return out;
    }
    parse_keywords(rest.substr(0, pos));
    out.explanation = std::string(rest.substr(pos + marker.size()));
    return out;
  }
  if (target.substr(0, kRationaleLabel.size()) == kRationaleLabel) {
    out.explanation = trim(target.substr(kRationaleLabel.size()));
    return out;
  }
  throw ValidationError("unparseable rationalizer target: " + std::string(target.substr(0, 60)));
}

namespace {

// Fits an idf table over the records' explanations when the extractor is
// tfidf; the other extractors need none.
IdfTable maybe_fit_idf(const std::vector<AnnotationRecord>& records,
                       const ExtractorConfig& extractor, const StopwordList& stop) {
  if (extractor.method != ExtractorMethod::tfidf) return {};
  std::vector<std::string> texts;
  texts.reserve(records.size());
  for (const auto& rec : records) texts.push_back(rec.explanation);
  return IdfTable::fit(texts, stop, extractor.ngram_min, extractor.ngram_max);
}

}  // namespace

std::vector<RationalizerExample> build_rationalizer_corpus(
    const std::vector<AnnotationRecord>& records, const ExtractorConfig& extractor,
    const StopwordList& stop, const SentimentLexicon& lexicon, RationalizerAblation ablation,
    const CorpusOptions& opts, std::vector<std::string>* warnings) {
  const IdfTable idf = maybe_fit_idf(records, extractor, stop);
  std::vector<RationalizerExample> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    KeywordSequence keywords;
    if (ablation != RationalizerAblation::explanation_only) {
      keywords = extract_keywords(rec.explanation, extractor, stop, lexicon, &idf);
      if (keywords.empty() && warnings != nullptr) {
        warnings->push_back("empty keyword sequence for (" + rec.story_id + ", " + rec.aspect +
                            ")");
      }
    }
    out.push_back({render_rationalizer_input(rec.aspect, rec.story, opts),
                   render_rationalizer_target(keywords.items, rec.explanation, ablation),
                   rec.story_id, rec.aspect});
  }
  return out;
}

std::vector<ScorerExample> build_scorer_corpus(const std::vector<AnnotationRecord>& records,
                                               const ExtractorConfig& extractor,
                                               const StopwordList& stop,
                                               const SentimentLexicon& lexicon,
                                               const Composition& comp, const CorpusOptions& opts,
                                               std::vector<std::string>* warnings) {
  if (!comp.any()) throw ValidationError("scorer composition selects no components");
  const IdfTable idf =
      comp.keywords ? maybe_fit_idf(records, extractor, stop) : IdfTable{};
  std::vector<ScorerExample> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    KeywordSequence keywords;
    if (comp.keywords) {
      keywords = extract_keywords(rec.explanation, extractor, stop, lexicon, &idf);
      if (keywords.empty() && warnings != nullptr) {
        warnings->push_back("empty keyword sequence for (" + rec.story_id + ", " + rec.aspect +
                            ")");
      }
    }
    out.push_back({render_scorer_input(rec.aspect, rec.story, keywords.items, rec.explanation,
                                       comp, opts),
                   rec.rating, rec.story_id, rec.aspect});
  }
  return out;
}

}  // namespace coke
