#pragma once

#include <string>
#include <vector>

#include "coke/dataset.hpp"
#include "coke/keywords.hpp"

namespace coke {

enum class RationalizerAblation { keywords_then_explanation, keywords_only, explanation_only };

RationalizerAblation parse_ablation(std::string_view name);
std::string ablation_name(RationalizerAblation a);

// Which components enter the scorer input, always rendered in the fixed
// order aspect, story, keywords, explanation.
struct Composition {
  bool story = true;
  bool aspect = true;
  bool keywords = true;
  bool explanation = false;

  bool any() const { return story || aspect || keywords || explanation; }
  std::string to_string() const;       // e.g. "s,a,k"
  static Composition parse(std::string_view spec);  // accepts s/a/k/e and long names
};

struct RationalizerExample {
  std::string input_text;
  std::string target_text;
  std::string story_id;
  std::string aspect;
};

struct ScorerExample {
  std::string input_text;
  double target = 0.0;
  std::string story_id;
  std::string aspect;
};

struct CorpusOptions {
  // Stories longer than this many whitespace-delimited tokens are cut and
  // marked with a trailing ellipsis. 0 disables truncation.
  std::size_t max_story_tokens = 480;
};

std::string truncate_story(const std::string& story, std::size_t max_tokens);

// Byte-exact template pieces.
std::string render_rationalizer_input(const std::string& aspect, const std::string& story,
                                      const CorpusOptions& opts = {});
std::string render_rationalizer_target(const std::vector<std::string>& keywords,
                                       const std::string& explanation,
                                       RationalizerAblation ablation);
std::string render_scorer_input(const std::string& aspect, const std::string& story,
                                const std::vector<std::string>& keywords,
                                const std::string& explanation, const Composition& comp,
                                const CorpusOptions& opts = {});

// Inverse of render_rationalizer_target for the keywords_then_explanation
// form; returns (keywords, explanation).
struct ParsedTarget {
  std::vector<std::string> keywords;
  std::string explanation;
};
ParsedTarget parse_rationalizer_target(std::string_view target);

std::vector<RationalizerExample> build_rationalizer_corpus(
    const std::vector<AnnotationRecord>& records, const ExtractorConfig& extractor,
    const StopwordList& stop, const SentimentLexicon& lexicon, RationalizerAblation ablation,
    const CorpusOptions& opts = {}, std::vector<std::string>* warnings = nullptr);

std::vector<ScorerExample> build_scorer_corpus(const std::vector<AnnotationRecord>& records,
                                               const ExtractorConfig& extractor,
                                               const StopwordList& stop,
                                               const SentimentLexicon& lexicon,
                                               const Composition& comp,
                                               const CorpusOptions& opts = {},
                                               std::vector<std::string>* warnings = nullptr);

}  // namespace coke
