// coke: fine-grained story evaluation toolkit.
//
// Subcommands: data, keywords, corpus, backend, infer, eval, humanperf, icc,
// viz, metric, run. Exit codes: 0 success, 2 validation error, 3
// backend/transport error, 4 metric undefined.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "coke/corpus.hpp"
#include "coke/dataset.hpp"
#include "coke/harness.hpp"
#include "coke/inference.hpp"
#include "coke/keywords.hpp"
#include "coke/metrics.hpp"
#include "coke/remote.hpp"
#include "coke/ridge.hpp"
#include "coke/viz.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

coke::StopwordList load_stopwords(const std::string& path) {
  return path.empty() ? coke::StopwordList::builtin() : coke::StopwordList::from_file(path);
}

coke::SentimentLexicon load_lexicon(const std::string& path) {
  return path.empty() ? coke::SentimentLexicon::builtin()
                      : coke::SentimentLexicon::from_file(path);
}

// Extractor flags shared by several subcommands.
struct ExtractorFlags {
  std::string method = "textrank";
  std::size_t top_k = 10;
  std::size_t window = 4;
  double damping = 0.85;
  double tol = 1e-6;
  std::size_t max_iter = 100;
  bool filter_after_topk = false;
  std::string stopwords_path;
  std::string lexicon_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--method", method, "Keyword extractor: textrank|rake|tfidf");
    cmd->add_option("--top-k", top_k, "Keyphrases kept per text");
    cmd->add_option("--window", window, "TextRank co-occurrence window");
    cmd->add_option("--damping", damping, "TextRank damping factor");
    cmd->add_option("--tol", tol, "TextRank convergence tolerance");
    cmd->add_option("--max-iter", max_iter, "TextRank iteration cap");
    cmd->add_flag("--filter-after-topk", filter_after_topk,
                  "Apply sentiment filtering after top-k truncation instead of before");
    cmd->add_option("--stopwords", stopwords_path, "Stopword list file (default: builtin)");
    cmd->add_option("--lexicon", lexicon_path, "Sentiment lexicon file (default: builtin)");
  }

  coke::ExtractorConfig config() const {
    coke::ExtractorConfig cfg;
    cfg.method = coke::parse_method(method);
    cfg.top_k = top_k;
    cfg.window = window;
    cfg.damping = damping;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.filter_after_topk = filter_after_topk;
    cfg.validate();
    return cfg;
  }
};

std::vector<coke::AnnotationRecord> load_records(const std::string& path,
                                                 const std::string& format_name,
                                                 const std::string& split) {
  auto format = format_name.empty() && path.ends_with(".csv")
                    ? coke::DataFormat::csv
                    : coke::parse_format(format_name.empty() ? "jsonl" : format_name);
  auto records = coke::load_dataset(path, format);
  if (!split.empty() && split != "all") {
    records = coke::filter_split(records, coke::parse_split(split));
  }
  return records;
}

std::vector<double> parse_number_list(const std::string& arg) {
  std::string text = arg;
  if (!text.empty() && text[0] == '@') text = coke::read_file(text.substr(1));
  std::vector<double> out;
  std::string current;
  auto flush = [&]() {
    const std::string t = coke::trim(current);
    current.clear();
    if (t.empty()) return;
    std::size_t used = 0;
    out.push_back(std::stod(t, &used));
    if (used != t.size()) throw coke::ValidationError("not a number: '" + t + "'");
  };
  for (char c : text) {
    if (c == ',' || c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      flush();
    } else {
      current += c;
    }
  }
  flush();
  return out;
}

std::string default_endpoint(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  const char* env = std::getenv("COKE_REMOTE_URL");
  if (env != nullptr && *env != '\0') return env;
  throw coke::ValidationError("remote backend needs --endpoint or COKE_REMOTE_URL");
}

void print_stats(const coke::DatasetStats& stats) {
  std::printf("records: %zu\n", stats.n_records);
  std::printf("splits:\n");
  for (const auto& [split, count] : stats.per_split) {
    std::printf("  %-8s %zu\n", split.c_str(), count);
  }
  std::printf("aspects:\n");
  std::vector<std::pair<std::string, std::size_t>> aspects(stats.per_aspect.begin(),
                                                           stats.per_aspect.end());
  std::sort(aspects.begin(), aspects.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [aspect, count] : aspects) {
    std::printf("  %-26s %6zu  %6.2f%%\n", aspect.c_str(), count,
                stats.aspect_share_percent.at(aspect));
  }
  std::printf("annotators per pair:\n");
  for (const auto& [k, count] : stats.annotators_per_pair) {
    std::printf("  %zu annotator(s): %zu pair(s)\n", k, count);
  }
  if (!stats.unknown_aspects.empty()) {
    std::printf("non-canonical aspect labels (kept verbatim):\n");
    for (const auto& a : stats.unknown_aspects) std::printf("  %s\n", a.c_str());
  }
}

// ---------------------------------------------------------------------
// run pipeline
// ---------------------------------------------------------------------

struct RunConfig {
  // data
  std::string data_path;
  std::string data_format;  // inferred from extension when empty
  std::size_t min_annotators = 2;
  bool derive_dev = true;
  // keywords
  ExtractorFlags extractor;
  // corpus
  std::string composition = "s,a,k";
  std::string ablation = "keywords_then_explanation";
  std::size_t max_story_tokens = 480;
  // backend
  std::string rationalizer = "mock";  // mock | remote | none
  std::string scorer = "ridge";       // ridge | remote | hash
  std::string endpoint;
  std::string model_path;  // load instead of training
  std::uint32_t dim = 4096;
  double lambda = 1e-3;
  double cg_tol = 1e-8;
  std::size_t cg_max_iter = 500;
  double temperature = 1.0;
  std::size_t pool_size = 30;
  std::string train_split = "train";
  // infer
  std::size_t n = 100;
  bool n_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string aggregation = "mean";
  std::string eval_split = "test";
  bool skip_failed = false;
  std::size_t jobs = 1;
  // output
  std::string out_dir;

  // Canonical serialization; hashed into the manifest so reruns with the
  // same effective configuration are detectable.
  std::string canonical() const {
    ordered_json j;
    j["data.path"] = data_path;
    j["data.format"] = data_format;
    j["data.min_annotators"] = min_annotators;
    j["data.derive_dev"] = derive_dev;
    j["keywords.method"] = extractor.method;
    j["keywords.top_k"] = extractor.top_k;
    j["keywords.window"] = extractor.window;
    j["keywords.damping"] = extractor.damping;
    j["keywords.tol"] = extractor.tol;
    j["keywords.max_iter"] = extractor.max_iter;
    j["keywords.filter_after_topk"] = extractor.filter_after_topk;
    j["keywords.stopwords"] = extractor.stopwords_path;
    j["keywords.lexicon"] = extractor.lexicon_path;
    j["corpus.composition"] = composition;
    j["corpus.ablation"] = ablation;
    j["corpus.max_story_tokens"] = max_story_tokens;
    j["backend.rationalizer"] = rationalizer;
    j["backend.scorer"] = scorer;
    j["backend.endpoint"] = endpoint;
    j["backend.model"] = model_path;
    j["backend.dim"] = dim;
    j["backend.lambda"] = lambda;
    j["backend.cg_tol"] = cg_tol;
    j["backend.cg_max_iter"] = cg_max_iter;
    j["backend.temperature"] = temperature;
    j["backend.pool_size"] = pool_size;
    j["backend.train_split"] = train_split;
    j["infer.n"] = n;
    j["infer.seed"] = seed;
    j["infer.aggregation"] = aggregation;
    j["infer.split"] = eval_split;
    j["infer.skip_failed"] = skip_failed;
    j["output.dir"] = out_dir;
    return j.dump();
  }
};

// Minimal TOML-style reader: [section] headers and key = value lines.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::map<std::string, std::string> values;
  std::string section;
  coke::for_each_line(path, [&](std::string_view line, std::size_t lineno) {
    std::string text = coke::trim(line);
    if (text.empty() || text[0] == '#' || text[0] == ';') return;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw coke::ValidationError(path + ":" + std::to_string(lineno) + ": bad section header");
      }
      section = coke::trim(text.substr(1, text.size() - 2));
      return;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw coke::ValidationError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = coke::trim(text.substr(0, eq));
    std::string value = coke::trim(text.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else {
      const std::size_t hash = value.find('#');
      if (hash != std::string::npos) value = coke::trim(value.substr(0, hash));
    }
    if (key.empty()) {
      throw coke::ValidationError(path + ":" + std::to_string(lineno) + ": empty key");
    }
    values[section.empty() ? key : section + "." + key] = value;
  });
  return values;
}

bool parse_bool(const std::string& v, const std::string& key) {
  const std::string t = coke::to_lower_ascii(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw coke::ValidationError("config " + key + ": expected a boolean, got '" + v + "'");
}

void apply_config_file(RunConfig& cfg, const std::map<std::string, std::string>& file) {
  auto str = [&](const char* key, std::string& out) {
    auto it = file.find(key);
    if (it != file.end()) out = it->second;
  };
  auto uint = [&](const char* key, auto& out) {
    auto it = file.find(key);
    if (it != file.end()) out = static_cast<std::decay_t<decltype(out)>>(std::stoull(it->second));
  };
  auto real = [&](const char* key, double& out) {
    auto it = file.find(key);
    if (it != file.end()) out = std::stod(it->second);
  };
  auto boolean = [&](const char* key, bool& out) {
    auto it = file.find(key);
    if (it != file.end()) out = parse_bool(it->second, key);
  };
  str("data.path", cfg.data_path);
  str("data.format", cfg.data_format);
  uint("data.min_annotators", cfg.min_annotators);
  boolean("data.derive_dev", cfg.derive_dev);
  str("keywords.method", cfg.extractor.method);
  uint("keywords.top_k", cfg.extractor.top_k);
  uint("keywords.window", cfg.extractor.window);
  real("keywords.damping", cfg.extractor.damping);
  real("keywords.tol", cfg.extractor.tol);
  uint("keywords.max_iter", cfg.extractor.max_iter);
  boolean("keywords.filter_after_topk", cfg.extractor.filter_after_topk);
  str("keywords.stopwords", cfg.extractor.stopwords_path);
  str("keywords.lexicon", cfg.extractor.lexicon_path);
  str("corpus.composition", cfg.composition);
  str("corpus.ablation", cfg.ablation);
  uint("corpus.max_story_tokens", cfg.max_story_tokens);
  str("backend.rationalizer", cfg.rationalizer);
  str("backend.scorer", cfg.scorer);
  str("backend.endpoint", cfg.endpoint);
  str("backend.model", cfg.model_path);
  uint("backend.dim", cfg.dim);
  real("backend.lambda", cfg.lambda);
  real("backend.cg_tol", cfg.cg_tol);
  uint("backend.cg_max_iter", cfg.cg_max_iter);
  real("backend.temperature", cfg.temperature);
  uint("backend.pool_size", cfg.pool_size);
  str("backend.train_split", cfg.train_split);
  if (file.count("infer.n")) {
    cfg.n = std::stoull(file.at("infer.n"));
    cfg.n_set = true;
  }
  if (file.count("infer.seed")) {
    cfg.seed = std::stoull(file.at("infer.seed"));
    cfg.seed_set = true;
  }
  str("infer.aggregation", cfg.aggregation);
  str("infer.split", cfg.eval_split);
  boolean("infer.skip_failed", cfg.skip_failed);
  uint("run.jobs", cfg.jobs);
  str("output.dir", cfg.out_dir);
}

struct ManifestArtifact {
  std::string name;
  std::string path;
};

void write_manifest(const RunConfig& cfg, const std::string& out_dir,
                    const std::vector<ManifestArtifact>& artifacts,
                    const std::vector<std::string>& stages_done, const std::string& failed_stage,
                    const std::string& error) {
  ordered_json m;
  m["tool"] = std::string("coke ") + coke::kVersion;
  m["config_hash"] = coke::hex_u64(coke::fnv1a64(cfg.canonical()));
  m["config"] = ordered_json::parse(cfg.canonical());
  m["status"] = failed_stage.empty() ? "complete" : "incomplete";
  if (!failed_stage.empty()) {
    m["failed_stage"] = failed_stage;
    m["error"] = error;
  }
  m["stages"] = stages_done;
  ordered_json arts = ordered_json::array();
  for (const auto& a : artifacts) {
    ordered_json entry;
    entry["name"] = a.name;
    entry["path"] = a.path;
    const std::string full = (fs::path(out_dir) / a.path).string();
    entry["bytes"] = fs::file_size(full);
    entry["fnv1a64"] = coke::file_checksum_hex(full);
    arts.push_back(std::move(entry));
  }
  m["artifacts"] = std::move(arts);
  coke::write_file((fs::path(out_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

int run_pipeline(RunConfig cfg) {
  if (cfg.data_path.empty()) throw coke::ValidationError("run: data path is required");
  if (!cfg.seed_set) throw coke::ValidationError("run: a seed is required for sampling runs");
  if (cfg.out_dir.empty()) throw coke::ValidationError("run: output directory is required");
  if (!fs::exists(cfg.data_path)) {
    throw coke::ValidationError("run: data path does not exist: " + cfg.data_path);
  }
  if (!cfg.n_set && cfg.aggregation == "majority_vote") cfg.n = 40;  // SC-style default

  fs::create_directories(cfg.out_dir);
  std::vector<ManifestArtifact> artifacts;
  std::vector<std::string> stages_done;
  std::string stage = "setup";

  try {
    const coke::StopwordList stop = load_stopwords(cfg.extractor.stopwords_path);
    const coke::SentimentLexicon lexicon = load_lexicon(cfg.extractor.lexicon_path);
    const coke::ExtractorConfig extractor = cfg.extractor.config();
    const coke::Composition comp = coke::Composition::parse(cfg.composition);
    coke::CorpusOptions corpus_opts;
    corpus_opts.max_story_tokens = cfg.max_story_tokens;

    stage = "load";
    auto records = load_records(cfg.data_path, cfg.data_format, "");
    if (cfg.derive_dev) coke::ensure_dev_split(records);
    std::vector<coke::AnnotationRecord> train_records;
    for (const auto& r : records) {
      if (coke::split_name(r.split) == cfg.train_split ||
          (cfg.train_split == "train" && r.split == coke::Split::train)) {
        train_records.push_back(r);
      }
    }
    if (cfg.train_split == "train+dev") {
      train_records = records;
      std::erase_if(train_records,
                    [](const auto& r) { return r.split == coke::Split::test; });
    }
    stages_done.push_back(stage);

    stage = "extract";
    {
      coke::IdfTable idf;
      if (extractor.method == coke::ExtractorMethod::tfidf) {
        std::vector<std::string> texts;
        for (const auto& r : train_records) texts.push_back(r.explanation);
        if (!texts.empty()) {
          idf = coke::IdfTable::fit(texts, stop, extractor.ngram_min, extractor.ngram_max);
        }
      }
      std::string out;
      for (const auto& rec : train_records) {
        const auto seq = coke::extract_keywords(rec.explanation, extractor, stop, lexicon, &idf);
        ordered_json row;
        row["story_id"] = rec.story_id;
        row["aspect"] = rec.aspect;
        row["keywords"] = seq.items;
        out += row.dump();
        out += '\n';
      }
      coke::write_file((fs::path(cfg.out_dir) / "keywords.jsonl").string(), out);
      artifacts.push_back({"keywords", "keywords.jsonl"});
    }
    stages_done.push_back(stage);

    stage = "corpus";
    std::vector<coke::ScorerExample> scorer_examples;
    {
      const auto rationalizer_examples = coke::build_rationalizer_corpus(
          train_records, extractor, stop, lexicon, coke::parse_ablation(cfg.ablation),
          corpus_opts);
      std::string out;
      for (const auto& ex : rationalizer_examples) {
        ordered_json row;
        row["input"] = ex.input_text;
        row["target"] = ex.target_text;
        out += row.dump();
        out += '\n';
      }
      coke::write_file((fs::path(cfg.out_dir) / "rationalizer_corpus.jsonl").string(), out);
      artifacts.push_back({"rationalizer_corpus", "rationalizer_corpus.jsonl"});

      scorer_examples =
          coke::build_scorer_corpus(train_records, extractor, stop, lexicon, comp, corpus_opts);
      out.clear();
      for (const auto& ex : scorer_examples) {
        ordered_json row;
        row["input"] = ex.input_text;
        row["target"] = ex.target;
        out += row.dump();
        out += '\n';
      }
      coke::write_file((fs::path(cfg.out_dir) / "scorer_corpus.jsonl").string(), out);
      artifacts.push_back({"scorer_corpus", "scorer_corpus.jsonl"});
    }
    stages_done.push_back(stage);

    std::unique_ptr<coke::Scorer> scorer;
    std::unique_ptr<coke::Rationalizer> rationalizer;
    std::unique_ptr<coke::RemoteBackend> remote;
    if (cfg.scorer == "remote" || cfg.rationalizer == "remote") {
      coke::RemoteOptions ropts;
      ropts.base_url = default_endpoint(cfg.endpoint);
      ropts.temperature = cfg.temperature;
      remote = std::make_unique<coke::RemoteBackend>(ropts);
    }

    if (cfg.scorer == "ridge") {
      stage = "train";
      coke::RidgeScorerModel model;
      if (!cfg.model_path.empty()) {
        model = coke::RidgeScorerModel::load(cfg.model_path);
      } else {
        coke::RidgeTrainOptions opts;
        opts.dim = cfg.dim;
        opts.lambda = cfg.lambda;
        opts.cg_tol = cfg.cg_tol;
        opts.cg_max_iter = cfg.cg_max_iter;
        model = coke::train_ridge(scorer_examples, opts, comp, cfg.max_story_tokens);
        model.save((fs::path(cfg.out_dir) / "ridge.json").string());
        artifacts.push_back({"ridge_model", "ridge.json"});
      }
      std::printf("[train] ridge dim=%u lambda=%g train_mse=%.6f cg_iters=%zu\n", model.dim,
                  model.lambda, model.train_mse, model.cg_iterations);
      scorer = std::make_unique<coke::RidgeScorer>(std::move(model));
      stages_done.push_back(stage);
    } else if (cfg.scorer == "hash") {
      scorer = std::make_unique<coke::HashScorer>(cfg.seed);
    } else if (cfg.scorer != "remote") {
      throw coke::ValidationError("unknown scorer backend: " + cfg.scorer);
    }

    if (cfg.rationalizer == "mock") {
      coke::MockRationalizerConfig mcfg;
      mcfg.extractor = extractor;
      mcfg.pool_size = cfg.pool_size;
      mcfg.temperature = cfg.temperature;
      rationalizer = std::make_unique<coke::MockRationalizer>(mcfg, stop, lexicon);
    } else if (cfg.rationalizer == "none") {
      rationalizer = std::make_unique<coke::EmptyRationalizer>();
    } else if (cfg.rationalizer != "remote") {
      throw coke::ValidationError("unknown rationalizer backend: " + cfg.rationalizer);
    }

    coke::Rationalizer& rat = rationalizer ? *rationalizer : *remote;
    coke::Scorer& sco = scorer ? *scorer : *remote;

    stage = "infer";
    const auto eval_records = coke::filter_split(records, coke::parse_split(cfg.eval_split));
    const auto groups = coke::group_pairs(eval_records, cfg.min_annotators);
    if (groups.empty()) {
      throw coke::ValidationError("no eligible pairs in split '" + cfg.eval_split + "'");
    }
    coke::InferOptions iopts;
    iopts.n = cfg.n;
    iopts.seed = cfg.seed;
    iopts.aggregation = coke::parse_aggregation(cfg.aggregation);
    iopts.skip_failed = cfg.skip_failed;
    iopts.jobs = cfg.jobs;
    const auto predictions = coke::infer_dataset(groups, rat, sco, iopts);
    coke::write_predictions((fs::path(cfg.out_dir) / "predictions.jsonl").string(), predictions);
    artifacts.push_back({"predictions", "predictions.jsonl"});
    stages_done.push_back(stage);

    stage = "eval";
    coke::EvalReport report = coke::expand_and_score(predictions, groups);
    report.config.backend = cfg.rationalizer + "+" + cfg.scorer;
    report.config.n = cfg.n;
    report.config.aggregation = cfg.aggregation;
    report.config.seed = cfg.seed;
    coke::write_file((fs::path(cfg.out_dir) / "report.json").string(),
                     coke::eval_report_to_json(report) + "\n");
    artifacts.push_back({"report", "report.json"});
    stages_done.push_back(stage);

    std::fputs(coke::format_report_table(report).c_str(), stdout);
    write_manifest(cfg, cfg.out_dir, artifacts, stages_done, "", "");
    std::printf("[run] complete; artifacts in %s\n", cfg.out_dir.c_str());
    return 0;
  } catch (const std::exception& e) {
    write_manifest(cfg, cfg.out_dir, artifacts, stages_done, stage, e.what());
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coke: keyword-guided story evaluation toolkit"};
  app.require_subcommand(1);
  int exit_code = 0;

  // ---- data ----
  auto* data = app.add_subcommand("data", "Inspect and validate annotation datasets");
  data->require_subcommand(1);
  struct {
    std::string path;
    std::string format;
  } data_args;
  auto* data_stats = data->add_subcommand("stats", "Dataset statistics");
  data_stats->add_option("path", data_args.path, "Dataset file (.jsonl or .csv)")->required();
  data_stats->add_option("--format", data_args.format, "jsonl|csv (default from extension)");
  data_stats->callback([&]() {
    const auto records = load_records(data_args.path, data_args.format, "");
    print_stats(coke::compute_stats(records));
  });
  auto* data_validate = data->add_subcommand("validate", "Validate every record");
  data_validate->add_option("path", data_args.path, "Dataset file")->required();
  data_validate->add_option("--format", data_args.format, "jsonl|csv");
  data_validate->callback([&]() {
    const auto records = load_records(data_args.path, data_args.format, "");
    const auto stats = coke::compute_stats(records);
    std::printf("ok: %zu records, %zu aspects\n", records.size(), stats.per_aspect.size());
    for (const auto& a : stats.unknown_aspects) {
      std::printf("note: non-canonical aspect label '%s'\n", a.c_str());
    }
  });

  // ---- keywords ----
  auto* keywords = app.add_subcommand("keywords", "Keyword extraction");
  keywords->require_subcommand(1);
  struct {
    ExtractorFlags extractor;
    std::string input;
    std::string field = "explanation";
    std::string out;
    std::string split;
  } kw_args;
  auto* kw_extract = keywords->add_subcommand("extract", "Extract keywords per record");
  kw_args.extractor.attach(kw_extract);
  kw_extract->add_option("--input", kw_args.input, "Dataset jsonl")->required();
  kw_extract->add_option("--field", kw_args.field, "explanation|story");
  kw_extract->add_option("--split", kw_args.split, "Restrict to one split");
  kw_extract->add_option("--out", kw_args.out, "Output jsonl")->required();
  kw_extract->callback([&]() {
    if (kw_args.field != "explanation" && kw_args.field != "story") {
      throw coke::ValidationError("--field must be explanation or story");
    }
    const auto records = load_records(kw_args.input, "", kw_args.split);
    const auto stop = load_stopwords(kw_args.extractor.stopwords_path);
    const auto lexicon = load_lexicon(kw_args.extractor.lexicon_path);
    const auto cfg = kw_args.extractor.config();
    auto text_of = [&](const coke::AnnotationRecord& r) {
      return kw_args.field == "story" ? r.story : r.explanation;
    };
    coke::IdfTable idf;
    if (cfg.method == coke::ExtractorMethod::tfidf) {
      std::vector<std::string> texts;
      for (const auto& r : records) texts.push_back(text_of(r));
      if (texts.empty()) throw coke::ValidationError("no records to fit the idf table on");
      idf = coke::IdfTable::fit(texts, stop, cfg.ngram_min, cfg.ngram_max);
    }
    std::string out;
    for (const auto& rec : records) {
      const auto seq = coke::extract_keywords(text_of(rec), cfg, stop, lexicon, &idf);
      ordered_json row;
      row["story_id"] = rec.story_id;
      row["aspect"] = rec.aspect;
      row["keywords"] = seq.items;
      out += row.dump();
      out += '\n';
    }
    coke::write_file(kw_args.out, out);
    std::printf("wrote %zu rows to %s\n", records.size(), kw_args.out.c_str());
  });

  // ---- corpus ----
  auto* corpus = app.add_subcommand("corpus", "Render training corpora");
  corpus->require_subcommand(1);
  struct {
    ExtractorFlags extractor;
    std::string data;
    std::string out;
    std::string split = "train";
    std::string ablation = "keywords_then_explanation";
    std::string composition = "s,a,k";
    std::size_t max_story_tokens = 480;
  } corpus_args;
  auto attach_corpus_common = [&](CLI::App* cmd) {
    corpus_args.extractor.attach(cmd);
    cmd->add_option("--data", corpus_args.data, "Dataset jsonl")->required();
    cmd->add_option("--out", corpus_args.out, "Output jsonl")->required();
    cmd->add_option("--split", corpus_args.split, "Source split (default train; 'all' for all)");
    cmd->add_option("--max-story-tokens", corpus_args.max_story_tokens,
                    "Story token budget before truncation (0 = unlimited)");
  };
  auto* corpus_rat = corpus->add_subcommand("rationalizer", "Rationalizer training examples");
  attach_corpus_common(corpus_rat);
  corpus_rat->add_option("--ablation", corpus_args.ablation,
                         "keywords_then_explanation|keywords_only|explanation_only");
  corpus_rat->callback([&]() {
    const auto records = load_records(corpus_args.data, "", corpus_args.split);
    const auto stop = load_stopwords(corpus_args.extractor.stopwords_path);
    const auto lexicon = load_lexicon(corpus_args.extractor.lexicon_path);
    coke::CorpusOptions opts;
    opts.max_story_tokens = corpus_args.max_story_tokens;
    std::vector<std::string> warnings;
    const auto examples = coke::build_rationalizer_corpus(
        records, corpus_args.extractor.config(), stop, lexicon,
        coke::parse_ablation(corpus_args.ablation), opts, &warnings);
    std::string out;
    for (const auto& ex : examples) {
      ordered_json row;
      row["input"] = ex.input_text;
      row["target"] = ex.target_text;
      out += row.dump();
      out += '\n';
    }
    coke::write_file(corpus_args.out, out);
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("wrote %zu examples to %s\n", examples.size(), corpus_args.out.c_str());
  });
  auto* corpus_scorer = corpus->add_subcommand("scorer", "Scorer training examples");
  attach_corpus_common(corpus_scorer);
  corpus_scorer->add_option("--composition", corpus_args.composition,
                            "Input components, e.g. s,a,k or s,a,e or s,a");
  corpus_scorer->callback([&]() {
    const auto records = load_records(corpus_args.data, "", corpus_args.split);
    const auto stop = load_stopwords(corpus_args.extractor.stopwords_path);
    const auto lexicon = load_lexicon(corpus_args.extractor.lexicon_path);
    coke::CorpusOptions opts;
    opts.max_story_tokens = corpus_args.max_story_tokens;
    std::vector<std::string> warnings;
    const auto examples = coke::build_scorer_corpus(
        records, corpus_args.extractor.config(), stop, lexicon,
        coke::Composition::parse(corpus_args.composition), opts, &warnings);
    std::string out;
    for (const auto& ex : examples) {
      ordered_json row;
      row["input"] = ex.input_text;
      row["target"] = ex.target;
      out += row.dump();
      out += '\n';
    }
    coke::write_file(corpus_args.out, out);
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("wrote %zu examples to %s\n", examples.size(), corpus_args.out.c_str());
  });

  // ---- backend ----
  auto* backend = app.add_subcommand("backend", "Scorer backends and the mock server");
  backend->require_subcommand(1);
  struct {
    ExtractorFlags extractor;
    std::string data;
    std::string out;
    std::string split = "train";
    std::string composition = "s,a,k";
    std::size_t max_story_tokens = 480;
    std::uint32_t dim = 4096;
    double lambda = 1e-3;
    double cg_tol = 1e-8;
    std::size_t cg_max_iter = 500;
  } train_args;
  auto* train_ridge_cmd = backend->add_subcommand("train-ridge", "Train the reference scorer");
  train_args.extractor.attach(train_ridge_cmd);
  train_ridge_cmd->add_option("--data", train_args.data, "Dataset jsonl")->required();
  train_ridge_cmd->add_option("--out", train_args.out, "Model output path")->required();
  train_ridge_cmd->add_option("--split", train_args.split, "Training split");
  train_ridge_cmd->add_option("--composition", train_args.composition, "Scorer input components");
  train_ridge_cmd->add_option("--max-story-tokens", train_args.max_story_tokens,
                              "Story token budget");
  train_ridge_cmd->add_option("--dim", train_args.dim, "Hashed feature dimension (power of two)");
  train_ridge_cmd->add_option("--lambda", train_args.lambda, "Ridge regularization");
  train_ridge_cmd->add_option("--cg-tol", train_args.cg_tol, "CG residual tolerance");
  train_ridge_cmd->add_option("--cg-max-iter", train_args.cg_max_iter, "CG iteration cap");
  train_ridge_cmd->callback([&]() {
    const auto records = load_records(train_args.data, "", train_args.split);
    if (records.empty()) throw coke::ValidationError("no training records in split");
    const auto stop = load_stopwords(train_args.extractor.stopwords_path);
    const auto lexicon = load_lexicon(train_args.extractor.lexicon_path);
    const auto comp = coke::Composition::parse(train_args.composition);
    coke::CorpusOptions copts;
    copts.max_story_tokens = train_args.max_story_tokens;
    const auto examples = coke::build_scorer_corpus(records, train_args.extractor.config(), stop,
                                                    lexicon, comp, copts);
    coke::RidgeTrainOptions opts;
    opts.dim = train_args.dim;
    opts.lambda = train_args.lambda;
    opts.cg_tol = train_args.cg_tol;
    opts.cg_max_iter = train_args.cg_max_iter;
    const auto model = coke::train_ridge(examples, opts, comp, train_args.max_story_tokens);
    model.save(train_args.out);
    std::printf("trained on %zu examples; train_mse=%.6f cg_iters=%zu; saved to %s\n",
                examples.size(), model.train_mse, model.cg_iterations, train_args.out.c_str());
  });

  struct {
    int port = 8089;
    std::uint64_t seed = 7;
    std::string model;
    bool distribution = false;
    double temperature = 1.0;
    std::size_t pool_size = 30;
  } serve_args;
  auto* serve_mock = backend->add_subcommand("serve-mock", "Serve the wire protocol locally");
  serve_mock->add_option("--port", serve_args.port, "Listen port");
  serve_mock->add_option("--seed", serve_args.seed, "Server-side default seed");
  serve_mock->add_option("--model", serve_args.model, "Ridge model for /v1/score");
  serve_mock->add_flag("--distribution", serve_args.distribution,
                       "Answer /v1/score with Likert distributions");
  serve_mock->add_option("--temperature", serve_args.temperature, "Mock sampling temperature");
  serve_mock->add_option("--pool-size", serve_args.pool_size, "Mock keyword pool size");
  serve_mock->callback([&]() {
    coke::MockServerOptions opts;
    opts.port = serve_args.port;
    opts.seed = serve_args.seed;
    opts.ridge_model_path = serve_args.model;
    opts.serve_distribution = serve_args.distribution;
    opts.rationalizer.temperature = serve_args.temperature;
    opts.rationalizer.pool_size = serve_args.pool_size;
    coke::MockServer server(opts, coke::StopwordList::builtin(),
                            coke::SentimentLexicon::builtin());
    std::printf("serving mock backend on port %d (ctrl-c to stop)\n", serve_args.port);
    server.run();
  });

  // ---- infer ----
  struct {
    ExtractorFlags extractor;
    std::string data;
    std::string backend_kind = "mock";
    std::string model;
    std::string endpoint;
    std::string out;
    std::string split = "test";
    std::size_t n = 100;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string aggregation = "mean";
    bool skip_failed = false;
    std::size_t jobs = 1;
    double temperature = 1.0;
    std::size_t pool_size = 30;
    std::size_t min_annotators = 2;
  } infer_args;
  auto* infer = app.add_subcommand("infer", "Sample, score and aggregate per pair");
  infer_args.extractor.attach(infer);
  infer->add_option("--data", infer_args.data, "Dataset jsonl")->required();
  infer->add_option("--backend", infer_args.backend_kind,
                    "mock (mock rationalizer + ridge/hash scorer), remote, or ridge "
                    "(no rationalizer)");
  infer->add_option("--model", infer_args.model, "Ridge model path");
  infer->add_option("--endpoint", infer_args.endpoint, "Remote base URL");
  infer->add_option("--out", infer_args.out, "Prediction jsonl")->required();
  infer->add_option("--split", infer_args.split, "Evaluation split");
  infer->add_option("--n", infer_args.n, "Candidates per pair");
  infer->add_option("--seed", infer_args.seed, "Sampling seed")
      ->required()
      ->each([&](const std::string&) { infer_args.seed_set = true; });
  infer->add_option("--aggregation", infer_args.aggregation, "mean|majority_vote|prob_avg");
  infer->add_flag("--skip-failed", infer_args.skip_failed,
                  "Drop failed candidates instead of failing the pair");
  infer->add_option("--jobs", infer_args.jobs, "Concurrent pairs");
  infer->add_option("--temperature", infer_args.temperature, "Mock sampling temperature");
  infer->add_option("--pool-size", infer_args.pool_size, "Mock keyword pool size");
  infer->add_option("--min-annotators", infer_args.min_annotators, "Pair eligibility threshold");
  infer->callback([&]() {
    const auto records = load_records(infer_args.data, "", infer_args.split);
    const auto groups = coke::group_pairs(records, infer_args.min_annotators);
    if (groups.empty()) throw coke::ValidationError("no eligible pairs to infer on");

    std::unique_ptr<coke::Rationalizer> rationalizer;
    std::unique_ptr<coke::Scorer> scorer;
    std::unique_ptr<coke::RemoteBackend> remote;
    const std::string kind = infer_args.backend_kind;
    if (kind == "remote") {
      coke::RemoteOptions ropts;
      ropts.base_url = default_endpoint(infer_args.endpoint);
      ropts.temperature = infer_args.temperature;
      remote = std::make_unique<coke::RemoteBackend>(ropts);
    } else if (kind == "mock" || kind == "ridge") {
      if (kind == "mock") {
        coke::MockRationalizerConfig mcfg;
        mcfg.extractor = infer_args.extractor.config();
        mcfg.pool_size = infer_args.pool_size;
        mcfg.temperature = infer_args.temperature;
        rationalizer = std::make_unique<coke::MockRationalizer>(
            mcfg, load_stopwords(infer_args.extractor.stopwords_path),
            load_lexicon(infer_args.extractor.lexicon_path));
      } else {
        rationalizer = std::make_unique<coke::EmptyRationalizer>();
      }
      if (!infer_args.model.empty()) {
        scorer = std::make_unique<coke::RidgeScorer>(coke::RidgeScorerModel::load(infer_args.model));
      } else if (kind == "ridge") {
        throw coke::ValidationError("--backend ridge requires --model");
      } else {
        scorer = std::make_unique<coke::HashScorer>(infer_args.seed);
      }
    } else {
      throw coke::ValidationError("unknown backend: " + kind);
    }

    coke::InferOptions opts;
    opts.n = infer_args.n;
    opts.seed = infer_args.seed;
    opts.aggregation = coke::parse_aggregation(infer_args.aggregation);
    opts.skip_failed = infer_args.skip_failed;
    opts.jobs = infer_args.jobs;
    coke::Rationalizer& rat = rationalizer ? *rationalizer : *remote;
    coke::Scorer& sco = scorer ? *scorer : *remote;
    const auto predictions = coke::infer_dataset(groups, rat, sco, opts);
    coke::write_predictions(infer_args.out, predictions);
    std::printf("wrote %zu predictions to %s (mean diversity sd %.4f)\n", predictions.size(),
                infer_args.out.c_str(), coke::diversity_report(predictions));
  });

  // ---- eval ----
  struct {
    std::string predictions;
    std::string data;
    std::string split;
    std::string out;
    std::size_t min_annotators = 2;
  } eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Expand predictions against every annotator");
  eval_cmd->add_option("--predictions", eval_args.predictions, "Prediction jsonl")->required();
  eval_cmd->add_option("--data", eval_args.data, "Dataset jsonl")->required();
  eval_cmd->add_option("--split", eval_args.split, "Restrict reference data to one split");
  eval_cmd->add_option("--out", eval_args.out, "Write the JSON report here");
  eval_cmd->add_option("--min-annotators", eval_args.min_annotators, "Pair eligibility");
  eval_cmd->callback([&]() {
    const auto predictions = coke::read_predictions(eval_args.predictions);
    const auto records = load_records(eval_args.data, "", eval_args.split);
    const auto groups = coke::group_pairs(records, eval_args.min_annotators);
    const auto report = coke::expand_and_score(predictions, groups);
    std::fputs(coke::format_report_table(report).c_str(), stdout);
    if (!eval_args.out.empty()) {
      coke::write_file(eval_args.out, coke::eval_report_to_json(report) + "\n");
    }
  });

  // ---- humanperf ----
  struct {
    std::string data;
    std::string variant = "hph";
    std::string split;
    std::string out;
    bool sample_one = false;
    std::uint64_t seed = 0;
    std::size_t min_annotators = 2;
  } hp_args;
  auto* humanperf = app.add_subcommand("humanperf", "Human performance estimates");
  humanperf->add_option("--data", hp_args.data, "Dataset jsonl")->required();
  humanperf->add_option("--variant", hp_args.variant, "hph|optimal|majority");
  humanperf->add_option("--split", hp_args.split, "Restrict to one split");
  humanperf->add_option("--out", hp_args.out, "Write the JSON report here");
  humanperf->add_flag("--sample-one", hp_args.sample_one,
                      "Sample one predictor per pair instead of pooling all ordered pairs");
  humanperf->add_option("--seed", hp_args.seed, "Seed for --sample-one");
  humanperf->add_option("--min-annotators", hp_args.min_annotators, "Pair eligibility");
  humanperf->callback([&]() {
    const auto records = load_records(hp_args.data, "", hp_args.split);
    const auto groups = coke::group_pairs(records, std::max<std::size_t>(2, hp_args.min_annotators));
    coke::HumanPerfOptions opts;
    opts.sample_one = hp_args.sample_one;
    opts.seed = hp_args.seed;
    const auto report =
        coke::human_performance(groups, coke::parse_human_variant(hp_args.variant), opts);
    std::fputs(coke::format_metric_table(report.report,
                                         coke::human_variant_name(report.variant))
                   .c_str(),
               stdout);
    if (!hp_args.out.empty()) {
      coke::write_file(hp_args.out, coke::human_perf_report_to_json(report) + "\n");
    }
  });

  // ---- icc ----
  struct {
    std::string data;
    std::string aspect = "all";
    std::string split;
    std::string form = "single";
    std::size_t min_annotators = 2;
  } icc_args;
  auto* icc_cmd = app.add_subcommand("icc", "Annotator agreement (one-way ICC)");
  icc_cmd->add_option("--data", icc_args.data, "Dataset jsonl")->required();
  icc_cmd->add_option("--aspect", icc_args.aspect, "Aspect label or 'all'");
  icc_cmd->add_option("--split", icc_args.split, "Restrict to one split");
  icc_cmd->add_option("--form", icc_args.form, "single (ICC(1,1)) or average (ICC(1,k))");
  icc_cmd->add_option("--min-annotators", icc_args.min_annotators, "Pair eligibility");
  icc_cmd->callback([&]() {
    const auto records = load_records(icc_args.data, "", icc_args.split);
    const auto groups = coke::group_pairs(records, std::max<std::size_t>(2, icc_args.min_annotators));
    const coke::IccForm form = icc_args.form == "average" ? coke::IccForm::average
                                                          : coke::IccForm::single;
    auto report_one = [&](const std::string& aspect) {
      const auto matrix = coke::icc_matrix(groups, aspect);
      if (matrix.size() < 2) {
        std::printf("  %-26s (insufficient data: %zu targets)\n", aspect.c_str(), matrix.size());
        return;
      }
      try {
        std::printf("  %-26s %+.4f  (%zu targets)\n", aspect.c_str(),
                    coke::icc_oneway(matrix, form), matrix.size());
      } catch (const coke::MetricError& e) {
        std::printf("  %-26s undefined (%s)\n", aspect.c_str(), e.what());
      }
    };
    if (coke::to_lower_ascii(icc_args.aspect) == "all") {
      std::set<std::string> aspects;
      for (const auto& g : groups) aspects.insert(g.aspect);
      for (const auto& a : aspects) report_one(a);
      report_one("all");
    } else {
      report_one(icc_args.aspect);
    }
  });

  // ---- viz ----
  struct {
    ExtractorFlags extractor;
    std::string prediction;
    std::string pair;
    std::string global_index;
    std::string out;
    bool build_index = false;
    std::string data;
    std::string split = "train";
  } viz_args;
  auto* viz_cmd = app.add_subcommand("viz", "Keyword scatter data and plots");
  viz_args.extractor.attach(viz_cmd);
  viz_cmd->add_option("--prediction", viz_args.prediction, "Prediction jsonl");
  viz_cmd->add_option("--pair", viz_args.pair, "story_id:aspect to plot");
  viz_cmd->add_option("--global-index", viz_args.global_index, "Keyword index jsonl");
  viz_cmd->add_option("--out", viz_args.out, "Output .svg or .csv (or index jsonl)")->required();
  viz_cmd->add_flag("--build-index", viz_args.build_index,
                    "Build the global keyword index from --data instead of plotting");
  viz_cmd->add_option("--data", viz_args.data, "Training data for --build-index");
  viz_cmd->add_option("--split", viz_args.split, "Split for --build-index");
  viz_cmd->callback([&]() {
    if (viz_args.build_index) {
      if (viz_args.data.empty()) throw coke::ValidationError("--build-index requires --data");
      const auto records = load_records(viz_args.data, "", viz_args.split);
      const auto index = coke::build_global_index(
          records, viz_args.extractor.config(),
          load_stopwords(viz_args.extractor.stopwords_path),
          load_lexicon(viz_args.extractor.lexicon_path));
      coke::write_global_index(viz_args.out, index);
      std::printf("wrote %zu keywords to %s\n", index.size(), viz_args.out.c_str());
      return;
    }
    if (viz_args.prediction.empty() || viz_args.pair.empty() || viz_args.global_index.empty()) {
      throw coke::ValidationError("viz needs --prediction, --pair and --global-index");
    }
    const auto sep = viz_args.pair.rfind(':');
    if (sep == std::string::npos) {
      throw coke::ValidationError("--pair must look like story_id:aspect");
    }
    const std::string story_id = viz_args.pair.substr(0, sep);
    const std::string aspect = viz_args.pair.substr(sep + 1);
    const auto predictions = coke::read_predictions(viz_args.prediction);
    const coke::ScoredPrediction* chosen = nullptr;
    for (const auto& p : predictions) {
      if (p.story_id == story_id && coke::to_lower_ascii(p.aspect) == coke::to_lower_ascii(aspect)) {
        chosen = &p;
        break;
      }
    }
    if (chosen == nullptr) {
      throw coke::ValidationError("pair not found in predictions: " + viz_args.pair);
    }
    if (chosen->candidates.empty()) {
      throw coke::ValidationError("prediction for " + viz_args.pair +
                                  " carries no candidates to plot");
    }
    const auto index = coke::read_global_index(viz_args.global_index);
    const auto points = coke::keyword_points(*chosen, index);
    if (points.empty()) throw coke::ValidationError("no keywords to plot for " + viz_args.pair);
    const bool csv = viz_args.out.ends_with(".csv");
    coke::render_scatter(points, viz_args.out,
                         csv ? coke::ScatterFormat::csv : coke::ScatterFormat::svg);
    std::printf("wrote %zu points to %s\n", points.size(), viz_args.out.c_str());
  });

  // ---- metric ----
  struct {
    std::string name;
    std::string a;
    std::string b;
    double threshold = 0.5;
  } metric_args;
  auto* metric_cmd = app.add_subcommand("metric", "Metric kernels on raw vectors");
  metric_cmd->add_option("name", metric_args.name, "pearson|mse|f1|population_sd")->required();
  metric_cmd->add_option("--a", metric_args.a, "Comma-separated values or @file")->required();
  metric_cmd->add_option("--b", metric_args.b, "Second vector (unused for population_sd)");
  metric_cmd->add_option("--threshold", metric_args.threshold, "F1 binarization threshold");
  metric_cmd->callback([&]() {
    const auto a = parse_number_list(metric_args.a);
    const auto b = metric_args.b.empty() ? std::vector<double>{} : parse_number_list(metric_args.b);
    double value = 0.0;
    const std::string name = coke::to_lower_ascii(metric_args.name);
    if (name == "pearson") {
      value = coke::pearson(a, b);
    } else if (name == "mse") {
      value = coke::mse(a, b);
    } else if (name == "f1") {
      value = coke::f1_binarized(a, b, metric_args.threshold);
    } else if (name == "population_sd" || name == "sd") {
      value = coke::population_sd(a);
    } else {
      throw coke::ValidationError("unknown metric: " + metric_args.name);
    }
    std::printf("%.17g\n", value);
  });

  // ---- run ----
  RunConfig run_cfg;
  struct {
    std::string config_path;
    std::string backend;
  } run_args;
  auto* run_cmd = app.add_subcommand("run", "Full pipeline: extract, corpus, train, infer, eval");
  run_cmd->add_option("--config", run_args.config_path, "TOML-style run configuration");
  auto* run_data = run_cmd->add_option("--data", run_cfg.data_path, "Dataset path override");
  auto* run_out = run_cmd->add_option("--out-dir", run_cfg.out_dir, "Output directory override");
  auto* run_seed = run_cmd->add_option("--seed", run_cfg.seed, "Sampling seed override");
  auto* run_n = run_cmd->add_option("--n", run_cfg.n, "Candidates per pair override");
  auto* run_jobs = run_cmd->add_option("--jobs", run_cfg.jobs, "Concurrent pairs");
  auto* run_agg = run_cmd->add_option("--aggregation", run_cfg.aggregation, "Aggregation override");
  auto* run_backend = run_cmd->add_option("--backend", run_args.backend,
                                          "Shorthand: mock, ridge (no rationalizer) or remote");
  auto* run_model = run_cmd->add_option("--model", run_cfg.model_path, "Ridge model override");
  auto* run_endpoint = run_cmd->add_option("--endpoint", run_cfg.endpoint, "Remote URL override");
  run_cmd->callback([&]() {
    RunConfig cfg;  // defaults
    if (!run_args.config_path.empty()) {
      apply_config_file(cfg, parse_config_file(run_args.config_path));
    }
    // flag > file > default
    if (run_data->count()) cfg.data_path = run_cfg.data_path;
    if (run_out->count()) cfg.out_dir = run_cfg.out_dir;
    if (run_seed->count()) {
      cfg.seed = run_cfg.seed;
      cfg.seed_set = true;
    }
    if (run_n->count()) {
      cfg.n = run_cfg.n;
      cfg.n_set = true;
    }
    if (run_jobs->count()) cfg.jobs = run_cfg.jobs;
    if (run_agg->count()) cfg.aggregation = run_cfg.aggregation;
    if (run_model->count()) cfg.model_path = run_cfg.model_path;
    if (run_endpoint->count()) cfg.endpoint = run_cfg.endpoint;
    if (run_backend->count()) {
      if (run_args.backend == "mock") {
        cfg.rationalizer = "mock";
        cfg.scorer = "ridge";
      } else if (run_args.backend == "ridge") {
        cfg.rationalizer = "none";
        cfg.scorer = "ridge";
      } else if (run_args.backend == "remote") {
        cfg.rationalizer = "remote";
        cfg.scorer = "remote";
      } else {
        throw coke::ValidationError("unknown backend shorthand: " + run_args.backend);
      }
    }
    exit_code = run_pipeline(std::move(cfg));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const coke::MetricError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const coke::BackendError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const coke::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return exit_code;
}
