#include "coke/ridge.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace coke {

using nlohmann::json;

namespace {

bool is_power_of_two(std::uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::vector<std::string> grams_1_2(const std::string& text) {
  const std::vector<std::string> tokens = tokenize(text);
  std::vector<std::string> grams;
  grams.reserve(tokens.size() * 2);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    grams.push_back(tokens[i]);
    if (i + 1 < tokens.size()) grams.push_back(tokens[i] + ' ' + tokens[i + 1]);
  }
  return grams;
}

}  // namespace

double SparseRow::dot(const std::vector<double>& w) const {
  double acc = 0.0;
  for (const auto& [idx, val] : entries) acc += w[idx] * val;
  return acc;
}

double SparseRow::squared_norm() const {
  double acc = 0.0;
  for (const auto& [idx, val] : entries) acc += val * val;
  return acc;
}

HashedTfidfFeaturizer::HashedTfidfFeaturizer(std::uint32_t dim,
                                             std::unordered_map<std::string, std::size_t> df,
                                             std::size_t n_docs)
    : dim_(dim), df_(std::move(df)), n_docs_(n_docs) {
  if (!is_power_of_two(dim_)) throw ValidationError("featurizer dimension must be a power of two");
}

HashedTfidfFeaturizer HashedTfidfFeaturizer::fit(const std::vector<std::string>& texts,
                                                 std::uint32_t dim) {
  if (texts.empty()) throw ValidationError("featurizer: empty corpus");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& text : texts) {
    std::unordered_set<std::string> seen;
    for (auto& g : grams_1_2(text)) seen.insert(std::move(g));
    for (const auto& g : seen) ++df[g];
  }
  return HashedTfidfFeaturizer(dim, std::move(df), texts.size());
}

double HashedTfidfFeaturizer::idf(const std::string& gram) const {
  const auto it = df_.find(gram);
  const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + df)) + 1.0;
}

SparseRow HashedTfidfFeaturizer::featurize(const std::string& text) const {
  std::unordered_map<std::string, double> tf;
  for (auto& g : grams_1_2(text)) tf[g] += 1.0;

  std::unordered_map<std::uint32_t, double> acc;
  for (const auto& [gram, count] : tf) {
    const std::uint64_t h = fnv1a64(gram);
    const std::uint32_t idx = static_cast<std::uint32_t>(h & (dim_ - 1));
    const double sign = (h >> 63) ? -1.0 : 1.0;
    acc[idx] += sign * count * idf(gram);
  }
  SparseRow row;
  row.entries.assign(acc.begin(), acc.end());
  std::sort(row.entries.begin(), row.entries.end());
  std::erase_if(row.entries, [](const auto& e) { return e.second == 0.0; });
  return row;
}

CgResult solve_ridge_cg(const std::vector<SparseRow>& rows, const std::vector<double>& targets,
                        const RidgeTrainOptions& opts) {
  if (rows.empty()) throw ValidationError("ridge: need at least one example");
  if (rows.size() != targets.size()) throw ValidationError("ridge: row/target count mismatch");
  if (!is_power_of_two(opts.dim)) throw ValidationError("ridge: dim must be a power of two");
  if (!(opts.lambda > 0.0)) throw ValidationError("ridge: lambda must be > 0");

  const std::size_t d = opts.dim;
  const double inv_n = 1.0 / static_cast<double>(rows.size());

  // A v = X^T (X v) / N + lambda v
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& row : rows) {
      const double xv = row.dot(v);
      for (const auto& [idx, val] : row.entries) out[idx] += val * xv;
    }
    for (std::size_t i = 0; i < d; ++i) out[i] = out[i] * inv_n + opts.lambda * v[i];
  };

  std::vector<double> b(d, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [idx, val] : rows[r].entries) b[idx] += val * targets[r];
  }
  for (auto& v : b) v *= inv_n;

  std::vector<double> w(d, 0.0), residual = b, p = b, ap(d, 0.0);
  double rs = 0.0;
  for (double v : residual) rs += v * v;

  CgResult result;
  result.residual = std::sqrt(rs);
  std::size_t iter = 0;
  while (result.residual >= opts.cg_tol && iter < opts.cg_max_iter) {
    apply(p, ap);
    double pap = 0.0;
    for (std::size_t i = 0; i < d; ++i) pap += p[i] * ap[i];
    if (pap <= 0.0) break;  // numerically exhausted
    const double alpha = rs / pap;
    for (std::size_t i = 0; i < d; ++i) {
      w[i] += alpha * p[i];
      residual[i] -= alpha * ap[i];
    }
    double rs_new = 0.0;
    for (double v : residual) rs_new += v * v;
    const double beta = rs_new / rs;
    for (std::size_t i = 0; i < d; ++i) p[i] = residual[i] + beta * p[i];
    rs = rs_new;
    result.residual = std::sqrt(rs);
    ++iter;
  }
  result.iterations = iter;
  if (result.residual >= opts.cg_tol && iter >= opts.cg_max_iter) {
    throw BackendError("ridge: conjugate gradient did not converge within " +
                       std::to_string(opts.cg_max_iter) +
                       " iterations (residual=" + std::to_string(result.residual) + ")");
  }
  result.weights = std::move(w);
  return result;
}

double RidgeScorerModel::raw_predict_text(const std::string& input_text) const {
  return raw_predict(featurizer.featurize(input_text));
}

std::string RidgeScorerModel::to_json() const {
  json doc;
  doc["format"] = "coke-ridge";
  doc["version"] = 1;
  doc["dim"] = dim;
  doc["lambda"] = lambda;
  doc["composition"] = composition.to_string();
  doc["max_story_tokens"] = max_story_tokens;
  doc["train_mse"] = train_mse;
  doc["cg_iterations"] = cg_iterations;
  doc["weights"] = weights;
  json idf;
  idf["n_docs"] = featurizer.n_docs();
  json df = json::object();
  for (const auto& [gram, count] : featurizer.df()) df[gram] = count;
  idf["df"] = std::move(df);
  doc["idf"] = std::move(idf);
  return doc.dump();
}

RidgeScorerModel RidgeScorerModel::from_json(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || doc.value("format", "") != "coke-ridge") {
    throw ValidationError("not a coke-ridge model file");
  }
  if (doc.value("version", 0) != 1) {
    throw ValidationError("unsupported coke-ridge model version");
  }
  RidgeScorerModel model;
  model.dim = doc.at("dim").get<std::uint32_t>();
  model.lambda = doc.at("lambda").get<double>();
  model.composition = Composition::parse(doc.at("composition").get<std::string>());
  model.max_story_tokens = doc.value("max_story_tokens", 480);
  model.train_mse = doc.value("train_mse", 0.0);
  model.cg_iterations = doc.value("cg_iterations", 0);
  model.weights = doc.at("weights").get<std::vector<double>>();
  if (model.weights.size() != model.dim) {
    throw ValidationError("coke-ridge model: weight count does not match dim");
  }
  for (double wv : model.weights) {
    if (!std::isfinite(wv)) throw ValidationError("coke-ridge model: non-finite weight");
  }
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& [gram, count] : doc.at("idf").at("df").items()) {
    df[gram] = count.get<std::size_t>();
  }
  model.featurizer = HashedTfidfFeaturizer(model.dim, std::move(df),
                                           doc.at("idf").at("n_docs").get<std::size_t>());
  return model;
}

void RidgeScorerModel::save(const std::string& path) const { write_file(path, to_json()); }

RidgeScorerModel RidgeScorerModel::load(const std::string& path) {
  return from_json(read_file(path));
}

RidgeScorerModel train_ridge(const std::vector<ScorerExample>& examples,
                             const RidgeTrainOptions& opts, const Composition& comp,
                             std::size_t max_story_tokens) {
  if (examples.empty()) throw ValidationError("ridge: need at least one training example");
  std::vector<std::string> texts;
  texts.reserve(examples.size());
  for (const auto& ex : examples) texts.push_back(ex.input_text);

  RidgeScorerModel model;
  model.dim = opts.dim;
  model.lambda = opts.lambda;
  model.composition = comp;
  model.max_story_tokens = max_story_tokens;
  model.featurizer = HashedTfidfFeaturizer::fit(texts, opts.dim);

  std::vector<SparseRow> rows;
  rows.reserve(examples.size());
  std::vector<double> targets;
  targets.reserve(examples.size());
  for (const auto& ex : examples) {
    rows.push_back(model.featurizer.featurize(ex.input_text));
    targets.push_back(ex.target);
  }

  CgResult cg = solve_ridge_cg(rows, targets, opts);
  model.weights = std::move(cg.weights);
  model.cg_iterations = cg.iterations;

  KahanSum err;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double d = model.raw_predict(rows[i]) - targets[i];
    err.add(d * d);
  }
  model.train_mse = err.value() / static_cast<double>(rows.size());
  return model;
}

ScoreResult RidgeScorer::score(const std::string& story, const std::string& aspect,
                               const std::vector<std::string>& keywords) {
  CorpusOptions opts;
  opts.max_story_tokens = model_.max_story_tokens;
  const std::string input =
      render_scorer_input(aspect, story, keywords, "", model_.composition, opts);
  const double raw = model_.raw_predict_text(input);
  ScoreResult result;
  result.score = std::clamp(raw, 0.0, 1.0);
  result.clamped = raw != result.score;
  return result;
}

}  // namespace coke
