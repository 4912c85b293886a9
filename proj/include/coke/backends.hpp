#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coke/common.hpp"
#include "coke/keywords.hpp"

namespace coke {

// One sampled (keywords, optional free-text rationale) pair.
struct CandidateRationale {
  KeywordSequence keywords;
  std::optional<std::string> rationale_text;
  std::size_t sample_index = 0;
};

// Probabilities over the five Likert levels, indexed 0 -> rating 1.
struct LikertDistribution {
  std::array<double, 5> p{};

  void validate() const;
  // Expectation of the normalized rating after renormalizing p.
  double expectation() const;
};

struct ScoreResult {
  double score = 0.0;  // in [0, 1]
  std::optional<LikertDistribution> distribution;
  bool clamped = false;  // set when a raw prediction was clipped into [0, 1]
};

class Rationalizer {
 public:
  virtual ~Rationalizer() = default;
  // Exactly n candidates, deterministic given (inputs, seed) for local
  // implementations. sample_index runs 0..n-1.
  virtual std::vector<CandidateRationale> generate(const std::string& story,
                                                   const std::string& aspect, std::size_t n,
                                                   std::uint64_t seed) = 0;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual ScoreResult score(const std::string& story, const std::string& aspect,
                            const std::vector<std::string>& keywords) = 0;
};

// --- mock rationalizer ---------------------------------------------------

struct MockRationalizerConfig {
  std::size_t pool_size = 30;      // TextRank phrases kept per story
  std::size_t min_keywords = 3;    // candidates sample k in [min, max] items
  std::size_t max_keywords = 5;
  double temperature = 1.0;        // inclusion probability ~ exp(score / tau)
  ExtractorConfig extractor;       // textrank settings for the pool
  bool emit_rationale = true;
};

struct PoolEntry {
  std::string phrase;
  double score = 0.0;
};

// Samples keyword sequences from the story's own TextRank pool. Stands in
// for a trained generator so the pipeline runs without one.
class MockRationalizer final : public Rationalizer {
 public:
  MockRationalizer(MockRationalizerConfig config, StopwordList stop, SentimentLexicon lexicon);

  std::vector<CandidateRationale> generate(const std::string& story, const std::string& aspect,
                                           std::size_t n, std::uint64_t seed) override;

  // Sentiment-filtered TextRank phrases of the story, strongest first.
  std::vector<PoolEntry> build_pool(const std::string& story) const;

  const MockRationalizerConfig& config() const { return config_; }

 private:
  MockRationalizerConfig config_;
  StopwordList stop_;
  SentimentLexicon lexicon_;
};

// Weighted sampling without replacement: k picks, inclusion probability
// proportional to exp(score / temperature) among the remaining entries.
std::vector<std::size_t> sample_without_replacement(const std::vector<PoolEntry>& pool,
                                                    std::size_t k, double temperature, Rng& rng);

// Always returns empty keyword lists; the "no rationalizer" configuration.
class EmptyRationalizer final : public Rationalizer {
 public:
  std::vector<CandidateRationale> generate(const std::string&, const std::string&, std::size_t n,
                                           std::uint64_t) override;
};

// Deterministic pseudo-scorer: hashes (story, aspect, keywords) into [0, 1].
// Useful as a stand-in wire-protocol peer and in sampling statistics tests.
class HashScorer final : public Scorer {
 public:
  explicit HashScorer(std::uint64_t salt = 0) : salt_(salt) {}
  ScoreResult score(const std::string& story, const std::string& aspect,
                    const std::vector<std::string>& keywords) override;

 private:
  std::uint64_t salt_;
};

}  // namespace coke
