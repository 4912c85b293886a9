#include "coke/keywords.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace coke {

namespace {

void load_words(std::unordered_set<std::string>& out, std::string_view text) {
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string word = trim(text.substr(start, end - start));
    if (!word.empty() && word[0] != '#') out.insert(to_lower_ascii(word));
    if (end == text.size()) break;
    start = end + 1;
  }
}

// --- minimal UTF-8 walker ----------------------------------------------

struct Cp {
  char32_t value;
  std::size_t length;
};

Cp decode_utf8(std::string_view s, std::size_t i) {
  const unsigned char c0 = static_cast<unsigned char>(s[i]);
  if (c0 < 0x80) return {c0, 1};
  auto cont = [&](std::size_t k) -> unsigned char {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0;
  };
  if ((c0 >> 5) == 0x6 && (cont(1) >> 6) == 0x2) {
    return {static_cast<char32_t>(((c0 & 0x1f) << 6) | (cont(1) & 0x3f)), 2};
  }
  if ((c0 >> 4) == 0xe && (cont(1) >> 6) == 0x2 && (cont(2) >> 6) == 0x2) {
    return {static_cast<char32_t>(((c0 & 0x0f) << 12) | ((cont(1) & 0x3f) << 6) |
                                  (cont(2) & 0x3f)),
            3};
  }
  if ((c0 >> 3) == 0x1e && (cont(1) >> 6) == 0x2 && (cont(2) >> 6) == 0x2 &&
      (cont(3) >> 6) == 0x2) {
    return {static_cast<char32_t>(((c0 & 0x07) << 18) | ((cont(1) & 0x3f) << 12) |
                                  ((cont(2) & 0x3f) << 6) | (cont(3) & 0x3f)),
            4};
  }
  return {0xfffd, 1};  // invalid byte, treated as punctuation
}

bool is_word_cp(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  if (cp >= 0x2000 && cp <= 0x206f) return false;  // general punctuation block
  if (cp == 0xfffd || cp == 0xa0) return false;
  if (cp >= 0xa1 && cp <= 0xbf) return false;  // latin-1 punctuation/symbols
  return true;
}

bool is_joiner_cp(char32_t cp) {
  return cp == '\'' || cp == '-' || cp == 0x2019;  // typographic apostrophe
}

char32_t lower_cp(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xc0 && cp <= 0xde && cp != 0xd7) return cp + 0x20;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp == 0x2019) cp = '\'';  // normalize apostrophes
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
}

bool is_space_cp(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0xa0 || cp == 0x2009 || cp == 0x200a || cp == 0x2028 || cp == 0x2029;
}

// Shared ordering: score desc, first occurrence asc, then lexicographic.
bool phrase_less(const ScoredPhrase& a, const ScoredPhrase& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.first_pos != b.first_pos) return a.first_pos < b.first_pos;
  return a.text < b.text;
}

std::vector<ScoredPhrase> rank_and_truncate(std::vector<ScoredPhrase> phrases,
                                            const ExtractorConfig& config,
                                            const SentimentLexicon& lexicon) {
  auto drop_sentiment = [&](std::vector<ScoredPhrase>& ps) {
    std::erase_if(ps, [&](const ScoredPhrase& p) { return lexicon.hits_phrase(p.text); });
  };
  if (!config.filter_after_topk) drop_sentiment(phrases);
  std::sort(phrases.begin(), phrases.end(), phrase_less);
  if (phrases.size() > config.top_k) phrases.resize(config.top_k);
  if (config.filter_after_topk) drop_sentiment(phrases);
  return phrases;
}

KeywordSequence finish_phrases(std::vector<ScoredPhrase> phrases, const ExtractorConfig& config,
                               const SentimentLexicon& lexicon) {
  KeywordSequence seq;
  seq.source = KeywordSource::extracted;
  auto kept = rank_and_truncate(std::move(phrases), config, lexicon);
  seq.items.reserve(kept.size());
  for (auto& p : kept) seq.items.push_back(std::move(p.text));
  return seq;
}

// Maximal runs of non-stopword tokens; runs never cross punctuation breaks.
std::vector<std::pair<std::size_t, std::size_t>> content_runs(const TokenStream& ts,
                                                              const StopwordList& stop) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t i = 0;
  const std::size_t n = ts.tokens.size();
  while (i < n) {
    if (stop.contains(ts.tokens[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && !ts.break_after[j] && !stop.contains(ts.tokens[j + 1])) ++j;
    runs.emplace_back(i, j + 1);  // [i, j]
    i = j + 1;
  }
  return runs;
}

}  // namespace

bool SentimentLexicon::contains(std::string_view word) const {
  return words.count(to_lower_ascii(word)) > 0;
}

bool SentimentLexicon::hits_phrase(std::string_view phrase) const {
  std::size_t start = 0;
  while (start <= phrase.size()) {
    std::size_t end = phrase.find(' ', start);
    if (end == std::string_view::npos) end = phrase.size();
    if (end > start && contains(phrase.substr(start, end - start))) return true;
    if (end == phrase.size()) break;
    start = end + 1;
  }
  return false;
}

SentimentLexicon SentimentLexicon::builtin() {
  SentimentLexicon lex;
  load_words(lex.words, builtin_sentiment_text());
  return lex;
}

SentimentLexicon SentimentLexicon::from_file(const std::string& path) {
  SentimentLexicon lex;
  load_words(lex.words, read_file(path));
  lex.source_path = path;
  if (lex.words.empty()) throw ValidationError("sentiment lexicon is empty: " + path);
  return lex;
}

StopwordList StopwordList::builtin() {
  StopwordList list;
  load_words(list.words, builtin_stopwords_text());
  return list;
}

StopwordList StopwordList::from_file(const std::string& path) {
  StopwordList list;
  load_words(list.words, read_file(path));
  if (list.words.empty()) throw ValidationError("stopword list is empty: " + path);
  return list;
}

void ExtractorConfig::validate() const {
  if (ngram_min < 1 || ngram_min > ngram_max || ngram_max > 3) {
    throw ValidationError("extractor: ngram range must satisfy 1 <= min <= max <= 3");
  }
  if (top_k < 1) throw ValidationError("extractor: top_k must be >= 1");
  if (!(damping > 0.0 && damping < 1.0)) {
    throw ValidationError("extractor: damping must be in (0, 1)");
  }
}

ExtractorMethod parse_method(std::string_view name) {
  const std::string n = to_lower_ascii(name);
  if (n == "textrank") return ExtractorMethod::textrank;
  if (n == "rake") return ExtractorMethod::rake;
  if (n == "tfidf" || n == "tf-idf") return ExtractorMethod::tfidf;
  throw ValidationError("unknown extractor method: " + std::string(name));
}

std::string method_name(ExtractorMethod m) {
  switch (m) {
    case ExtractorMethod::textrank: return "textrank";
    case ExtractorMethod::rake: return "rake";
    case ExtractorMethod::tfidf: return "tfidf";
  }
  return "?";
}

TokenStream tokenize_with_breaks(std::string_view text) {
  TokenStream ts;
  std::string current;

  auto flush = [&]() {
    if (current.empty()) return;
    ts.tokens.push_back(current);
    ts.break_after.push_back(false);
    current.clear();
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const Cp cp = decode_utf8(text, i);
    bool joined = false;
    if (is_word_cp(cp.value)) {
      append_utf8(current, lower_cp(cp.value));
      joined = true;
    } else if (is_joiner_cp(cp.value) && !current.empty() && i + cp.length < text.size()) {
      const Cp nxt = decode_utf8(text, i + cp.length);
      if (is_word_cp(nxt.value)) {
        append_utf8(current, cp.value);
        joined = true;
      }
    }
    if (!joined) {
      flush();
      // punctuation between tokens blocks phrase merging across it
      if (!is_space_cp(cp.value) && !ts.break_after.empty()) ts.break_after.back() = true;
    }
    i += cp.length;
  }
  flush();
  return ts;
}

std::vector<std::string> tokenize(std::string_view text) {
  return tokenize_with_breaks(text).tokens;
}

CooccurrenceGraph build_cooccurrence_graph(const TokenStream& ts, const StopwordList& stop,
                                           std::size_t window) {
  CooccurrenceGraph g;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> sequence;  // node ids of non-stopword tokens, in order
  for (const auto& tok : ts.tokens) {
    if (stop.contains(tok)) continue;
    auto it = index.find(tok);
    std::size_t id;
    if (it == index.end()) {
      id = g.nodes.size();
      index.emplace(tok, id);
      g.nodes.push_back(tok);
      g.edges.emplace_back();
    } else {
      id = it->second;
    }
    sequence.push_back(id);
  }
  if (window < 2) window = 2;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    for (std::size_t j = i + 1; j < sequence.size() && j < i + window; ++j) {
      const std::size_t a = sequence[i];
      const std::size_t b = sequence[j];
      if (a == b) continue;
      g.edges[a][b] += 1.0;
      g.edges[b][a] += 1.0;
    }
  }
  return g;
}

std::vector<double> textrank_scores(const CooccurrenceGraph& graph, double damping, double tol,
                                    std::size_t max_iter) {
  const std::size_t n = graph.nodes.size();
  std::vector<double> score(n, 1.0);
  if (n == 0) return score;

  std::vector<double> out_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, w] : graph.edges[i]) out_sum[i] += w;
  }

  std::vector<double> next(n, 0.0);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    double max_delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (const auto& [j, w] : graph.edges[i]) {
        s += w / out_sum[j] * score[j];
      }
      next[i] = (1.0 - damping) + damping * s;
      max_delta = std::max(max_delta, std::abs(next[i] - score[i]));
    }
    score.swap(next);
    if (max_delta < tol) break;
  }
  return score;
}

std::vector<ScoredPhrase> textrank_phrases(std::string_view text, const ExtractorConfig& config,
                                           const StopwordList& stop,
                                           const SentimentLexicon& lexicon) {
  config.validate();
  const TokenStream ts = tokenize_with_breaks(text);
  const CooccurrenceGraph graph = build_cooccurrence_graph(ts, stop, config.window);
  const std::vector<double> scores =
      textrank_scores(graph, config.damping, config.tol, config.max_iter);

  // Rank unigrams, then merge adjacent top-ranked ones into phrases.
  std::unordered_map<std::string, double> node_score;
  std::unordered_map<std::string, std::size_t> first_pos;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) node_score[graph.nodes[i]] = scores[i];
  for (std::size_t i = 0; i < ts.tokens.size(); ++i) {
    if (!first_pos.count(ts.tokens[i]) && node_score.count(ts.tokens[i])) {
      first_pos[ts.tokens[i]] = i;
    }
  }

  std::vector<ScoredPhrase> ranked;
  ranked.reserve(graph.nodes.size());
  for (const auto& node : graph.nodes) {
    ranked.push_back({node, node_score[node], first_pos[node]});
  }
  std::sort(ranked.begin(), ranked.end(), phrase_less);
  std::unordered_set<std::string> marked;
  for (std::size_t i = 0; i < ranked.size() && i < config.top_k; ++i) {
    marked.insert(ranked[i].text);
  }

  std::vector<ScoredPhrase> phrases;
  std::unordered_set<std::string> seen;
  std::size_t i = 0;
  const std::size_t n = ts.tokens.size();
  while (i < n) {
    if (!marked.count(ts.tokens[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && !ts.break_after[j] && marked.count(ts.tokens[j + 1])) ++j;
    const std::size_t keep = std::min<std::size_t>(j - i + 1, 3);
    std::string phrase;
    double score = 0.0;
    for (std::size_t k = 0; k < keep; ++k) {
      if (k) phrase += ' ';
      phrase += ts.tokens[i + k];
      score += node_score[ts.tokens[i + k]];
    }
    if (seen.insert(phrase).second) phrases.push_back({std::move(phrase), score, i});
    i = j + 1;
  }
  return rank_and_truncate(std::move(phrases), config, lexicon);
}

KeywordSequence extract_textrank(std::string_view text, const ExtractorConfig& config,
                                 const StopwordList& stop, const SentimentLexicon& lexicon) {
  KeywordSequence seq;
  seq.source = KeywordSource::extracted;
  for (auto& p : textrank_phrases(text, config, stop, lexicon)) {
    seq.items.push_back(std::move(p.text));
  }
  return seq;
}

std::vector<ScoredPhrase> rake_phrases(const TokenStream& ts, const StopwordList& stop) {
  const auto runs = content_runs(ts, stop);

  // Degree/frequency over the truncated candidates.
  std::unordered_map<std::string, double> freq;
  std::unordered_map<std::string, double> degree;
  std::vector<std::pair<std::vector<std::string>, std::size_t>> candidates;
  for (const auto& [b, e] : runs) {
    std::vector<std::string> words;
    for (std::size_t k = b; k < e && words.size() < 3; ++k) words.push_back(ts.tokens[k]);
    for (const auto& w : words) {
      freq[w] += 1.0;
      degree[w] += static_cast<double>(words.size());
    }
    candidates.emplace_back(std::move(words), b);
  }

  std::vector<ScoredPhrase> phrases;
  std::unordered_set<std::string> seen;
  for (const auto& [words, pos] : candidates) {
    double score = 0.0;
    for (const auto& w : words) score += degree[w] / freq[w];
    std::string text = join(words, " ");
    if (seen.insert(text).second) phrases.push_back({std::move(text), score, pos});
  }
  return phrases;
}

KeywordSequence extract_rake(std::string_view text, const ExtractorConfig& config,
                             const StopwordList& stop, const SentimentLexicon& lexicon) {
  config.validate();
  const TokenStream ts = tokenize_with_breaks(text);
  return finish_phrases(rake_phrases(ts, stop), config, lexicon);
}

std::vector<ScoredPhrase> ngram_candidates(const TokenStream& ts, const StopwordList& stop,
                                           std::size_t ngram_min, std::size_t ngram_max) {
  std::vector<ScoredPhrase> out;
  for (const auto& [b, e] : content_runs(ts, stop)) {
    for (std::size_t len = ngram_min; len <= ngram_max; ++len) {
      if (b + len > e) break;
      for (std::size_t s = b; s + len <= e; ++s) {
        std::string gram = ts.tokens[s];
        for (std::size_t k = 1; k < len; ++k) {
          gram += ' ';
          gram += ts.tokens[s + k];
        }
        out.push_back({std::move(gram), 0.0, s});
      }
    }
  }
  return out;
}

IdfTable IdfTable::fit(const std::vector<std::string>& corpus, const StopwordList& stop,
                       std::size_t ngram_min, std::size_t ngram_max) {
  if (corpus.empty()) throw ValidationError("idf: empty corpus");
  IdfTable table;
  table.n_docs_ = corpus.size();
  for (const auto& doc : corpus) {
    const TokenStream ts = tokenize_with_breaks(doc);
    std::unordered_set<std::string> grams;
    for (auto& cand : ngram_candidates(ts, stop, ngram_min, ngram_max)) {
      grams.insert(std::move(cand.text));
    }
    for (const auto& g : grams) ++table.df_[g];
  }
  return table;
}

double IdfTable::idf(const std::string& gram) const {
  const auto it = df_.find(gram);
  const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + df)) + 1.0;
}

KeywordSequence extract_tfidf(std::string_view text, const IdfTable& idf,
                              const ExtractorConfig& config, const StopwordList& stop,
                              const SentimentLexicon& lexicon) {
  config.validate();
  if (!idf.fitted()) throw ValidationError("tfidf extraction requires a fitted idf table");
  const TokenStream ts = tokenize_with_breaks(text);
  const auto occurrences = ngram_candidates(ts, stop, config.ngram_min, config.ngram_max);

  std::unordered_map<std::string, double> tf;
  std::unordered_map<std::string, std::size_t> first_pos;
  for (const auto& occ : occurrences) {
    tf[occ.text] += 1.0;
    auto it = first_pos.find(occ.text);
    if (it == first_pos.end() || occ.first_pos < it->second) first_pos[occ.text] = occ.first_pos;
  }

  std::vector<ScoredPhrase> phrases;
  phrases.reserve(tf.size());
  for (const auto& [gram, count] : tf) {
    phrases.push_back({gram, count * idf.idf(gram), first_pos[gram]});
  }
  return finish_phrases(std::move(phrases), config, lexicon);
}

KeywordSequence filter_sentiment(const KeywordSequence& seq, const SentimentLexicon& lexicon) {
  KeywordSequence out;
  out.source = seq.source;
  for (const auto& item : seq.items) {
    if (!lexicon.hits_phrase(item)) out.items.push_back(item);
  }
  return out;
}

KeywordSequence extract_keywords(std::string_view text, const ExtractorConfig& config,
                                 const StopwordList& stop, const SentimentLexicon& lexicon,
                                 const IdfTable* idf) {
  switch (config.method) {
    case ExtractorMethod::textrank: return extract_textrank(text, config, stop, lexicon);
    case ExtractorMethod::rake: return extract_rake(text, config, stop, lexicon);
    case ExtractorMethod::tfidf:
      if (idf == nullptr) throw ValidationError("tfidf extraction requires an idf table");
      return extract_tfidf(text, *idf, config, stop, lexicon);
  }
  throw ValidationError("unknown extractor method");
}

}  // namespace coke
