#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "coke/common.hpp"

namespace coke {

// Embedded copies of data/*.txt (generated at configure time).
const char* builtin_stopwords_text();
const char* builtin_sentiment_text();

enum class KeywordSource { extracted, generated, user_provided };

// Ordered keyphrases, each 1-3 lowercased tokens.
struct KeywordSequence {
  std::vector<std::string> items;
  KeywordSource source = KeywordSource::extracted;

  bool empty() const { return items.empty(); }
  std::size_t size() const { return items.size(); }
};

struct SentimentLexicon {
  std::unordered_set<std::string> words;
  std::string source_path;  // empty for the builtin list

  bool contains(std::string_view word) const;
  // True when any token of the phrase is a lexicon word.
  bool hits_phrase(std::string_view phrase) const;

  static SentimentLexicon builtin();
  static SentimentLexicon from_file(const std::string& path);
};

struct StopwordList {
  std::unordered_set<std::string> words;

  bool contains(const std::string& word) const { return words.count(word) > 0; }

  static StopwordList builtin();
  static StopwordList from_file(const std::string& path);
};

enum class ExtractorMethod { textrank, rake, tfidf };

struct ExtractorConfig {
  ExtractorMethod method = ExtractorMethod::textrank;
  std::size_t ngram_min = 1;
  std::size_t ngram_max = 3;
  std::size_t top_k = 10;
  // TextRank parameters
  std::size_t window = 4;
  double damping = 0.85;
  double tol = 1e-6;
  std::size_t max_iter = 100;
  // When true, truncate to top_k before sentiment filtering instead of after.
  bool filter_after_topk = false;

  void validate() const;
};

ExtractorMethod parse_method(std::string_view name);
std::string method_name(ExtractorMethod m);

// Lowercased word tokens. Punctuation is split off and dropped; contiguous
// alphanumerics with internal apostrophes or hyphens form one token.
std::vector<std::string> tokenize(std::string_view text);

// Tokens plus hard break positions (sentence punctuation). breaks_after[i] is
// true when a punctuation boundary follows token i; phrase candidates never
// cross such a boundary.
struct TokenStream {
  std::vector<std::string> tokens;
  std::vector<bool> break_after;
};
TokenStream tokenize_with_breaks(std::string_view text);

// A scored keyphrase candidate before top-k truncation.
struct ScoredPhrase {
  std::string text;
  double score = 0.0;
  std::size_t first_pos = 0;  // token index of first occurrence
};

// Co-occurrence graph exposed for oracle tests.
struct CooccurrenceGraph {
  std::vector<std::string> nodes;                  // distinct non-stopword tokens
  std::vector<std::unordered_map<std::size_t, double>> edges;  // symmetric weights
};

CooccurrenceGraph build_cooccurrence_graph(const TokenStream& ts, const StopwordList& stop,
                                           std::size_t window);

// Damped iteration on the co-occurrence graph; returns one score per node.
// Stops when the max per-node change drops below tol or after max_iter sweeps.
std::vector<double> textrank_scores(const CooccurrenceGraph& graph, double damping,
                                    double tol, std::size_t max_iter);

KeywordSequence extract_textrank(std::string_view text, const ExtractorConfig& config,
                                 const StopwordList& stop, const SentimentLexicon& lexicon);

// Same pipeline as extract_textrank but keeps the phrase scores (used by the
// mock rationalizer's sampling pool).
std::vector<ScoredPhrase> textrank_phrases(std::string_view text, const ExtractorConfig& config,
                                           const StopwordList& stop,
                                           const SentimentLexicon& lexicon);

// RAKE phrase candidates and their degree/frequency scores, pre-truncation
// (exposed for the hand-computed oracle fixtures).
std::vector<ScoredPhrase> rake_phrases(const TokenStream& ts, const StopwordList& stop);

KeywordSequence extract_rake(std::string_view text, const ExtractorConfig& config,
                             const StopwordList& stop, const SentimentLexicon& lexicon);

// Smooth idf table over candidate n-grams: idf = ln((1+N)/(1+df)) + 1.
class IdfTable {
 public:
  IdfTable() = default;

  static IdfTable fit(const std::vector<std::string>& corpus, const StopwordList& stop,
                      std::size_t ngram_min, std::size_t ngram_max);

  double idf(const std::string& gram) const;
  std::size_t corpus_size() const { return n_docs_; }
  bool fitted() const { return n_docs_ > 0; }

  const std::unordered_map<std::string, std::size_t>& document_frequencies() const {
    return df_;
  }

 private:
  std::unordered_map<std::string, std::size_t> df_;
  std::size_t n_docs_ = 0;
};

// Candidate n-grams of a text: contiguous runs of non-stopword tokens between
// stopword/punctuation boundaries, expanded to n-grams of the configured
// lengths. Order follows first occurrence.
std::vector<ScoredPhrase> ngram_candidates(const TokenStream& ts, const StopwordList& stop,
                                           std::size_t ngram_min, std::size_t ngram_max);

KeywordSequence extract_tfidf(std::string_view text, const IdfTable& idf,
                              const ExtractorConfig& config, const StopwordList& stop,
                              const SentimentLexicon& lexicon);

// Drops every keyphrase containing at least one lexicon word; keeps order.
KeywordSequence filter_sentiment(const KeywordSequence& seq, const SentimentLexicon& lexicon);

// Dispatch on config.method; tfidf requires a fitted table.
KeywordSequence extract_keywords(std::string_view text, const ExtractorConfig& config,
                                 const StopwordList& stop, const SentimentLexicon& lexicon,
                                 const IdfTable* idf = nullptr);

}  // namespace coke
