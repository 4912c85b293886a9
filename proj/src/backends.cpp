#include "coke/backends.hpp"

#include <algorithm>
#include <cmath>

namespace coke {

void LikertDistribution::validate() const {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw BackendError("likert distribution: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw BackendError("likert distribution: probabilities sum to " + std::to_string(sum));
  }
}

double LikertDistribution::expectation() const {
  double sum = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum += p[i];
    acc += p[i] * (static_cast<double>(i) / 4.0);  // normalized rating of level i+1
  }
  if (sum <= 0.0) throw BackendError("likert distribution: zero mass");
  return acc / sum;
}

MockRationalizer::MockRationalizer(MockRationalizerConfig config, StopwordList stop,
                                   SentimentLexicon lexicon)
    : config_(std::move(config)), stop_(std::move(stop)), lexicon_(std::move(lexicon)) {
  if (config_.min_keywords < 1 || config_.min_keywords > config_.max_keywords) {
    throw ValidationError("mock rationalizer: bad keyword count range");
  }
  if (!(config_.temperature > 0.0)) {
    throw ValidationError("mock rationalizer: temperature must be > 0");
  }
}

std::vector<PoolEntry> MockRationalizer::build_pool(const std::string& story) const {
  ExtractorConfig cfg = config_.extractor;
  cfg.method = ExtractorMethod::textrank;
  cfg.top_k = config_.pool_size;

  std::vector<PoolEntry> pool;
  for (auto& phrase : textrank_phrases(story, cfg, stop_, lexicon_)) {
    pool.push_back({std::move(phrase.text), phrase.score});
  }
  return pool;
}

std::vector<std::size_t> sample_without_replacement(const std::vector<PoolEntry>& pool,
                                                    std::size_t k, double temperature, Rng& rng) {
  std::vector<std::size_t> remaining(pool.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  std::vector<std::size_t> picked;
  picked.reserve(std::min(k, pool.size()));
  while (picked.size() < k && !remaining.empty()) {
    double max_score = -1e300;
    for (std::size_t idx : remaining) max_score = std::max(max_score, pool[idx].score);
    // weights shifted by the max so tiny temperatures cannot overflow
    std::vector<double> weights(remaining.size());
    double total = 0.0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      weights[i] = std::exp((pool[remaining[i]].score - max_score) / temperature);
      total += weights[i];
    }
    const double u = rng.next_double() * total;
    double acc = 0.0;
    std::size_t chosen = remaining.size() - 1;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      acc += weights[i];
      if (u < acc) {
        chosen = i;
        break;
      }
    }
    picked.push_back(remaining[chosen]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return picked;
}

std::vector<CandidateRationale> MockRationalizer::generate(const std::string& story,
                                                           const std::string& aspect,
                                                           std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("generate: n must be >= 1");
  const std::vector<PoolEntry> pool = build_pool(story);

  std::vector<CandidateRationale> out;
  out.reserve(n);
  const std::uint64_t base = splitmix64(seed ^ fnv1a64(aspect, fnv1a64(story)));
  for (std::size_t j = 0; j < n; ++j) {
    Rng rng(splitmix64(base + j + 1));
    const std::size_t span = config_.max_keywords - config_.min_keywords + 1;
    const std::size_t k = config_.min_keywords + static_cast<std::size_t>(rng.next_below(span));
    const auto picked = sample_without_replacement(pool, k, config_.temperature, rng);

    CandidateRationale cand;
    cand.sample_index = j;
    cand.keywords.source = KeywordSource::generated;
    for (std::size_t idx : picked) cand.keywords.items.push_back(pool[idx].phrase);
    if (config_.emit_rationale) {
      if (cand.keywords.empty()) {
        cand.rationale_text = "the " + aspect + " stands on its own";
      } else {
        cand.rationale_text = "the " + aspect + " builds on " +
                              join(cand.keywords.items, " and ");
      }
    }
    out.push_back(std::move(cand));
  }
  return out;
}

std::vector<CandidateRationale> EmptyRationalizer::generate(const std::string&,
                                                            const std::string&, std::size_t n,
                                                            std::uint64_t) {
  if (n < 1) throw ValidationError("generate: n must be >= 1");
  std::vector<CandidateRationale> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j].sample_index = j;
    out[j].keywords.source = KeywordSource::generated;
  }
  return out;
}

ScoreResult HashScorer::score(const std::string& story, const std::string& aspect,
                              const std::vector<std::string>& keywords) {
  std::uint64_t h = fnv1a64_u64(salt_);
  h = fnv1a64(story, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(aspect, h);
  for (const auto& kw : keywords) {
    h = fnv1a64("\x1f", h);
    h = fnv1a64(kw, h);
  }
  ScoreResult r;
  r.score = static_cast<double>(splitmix64(h) >> 11) * 0x1.0p-53;
  return r;
}

}  // namespace coke
