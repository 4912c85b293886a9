#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "coke/backends.hpp"
#include "coke/corpus.hpp"

namespace coke {

// Hashed feature vector; indices are unique and sorted.
struct SparseRow {
  std::vector<std::pair<std::uint32_t, double>> entries;

  double dot(const std::vector<double>& w) const;
  double squared_norm() const;
};

// tf-idf over contiguous 1-2 grams of the tokenized text, signed-hashed into
// a power-of-two dimension.
class HashedTfidfFeaturizer {
 public:
  HashedTfidfFeaturizer() = default;
  HashedTfidfFeaturizer(std::uint32_t dim, std::unordered_map<std::string, std::size_t> df,
                        std::size_t n_docs);

  static HashedTfidfFeaturizer fit(const std::vector<std::string>& texts, std::uint32_t dim);

  SparseRow featurize(const std::string& text) const;

  std::uint32_t dim() const { return dim_; }
  std::size_t n_docs() const { return n_docs_; }
  const std::unordered_map<std::string, std::size_t>& df() const { return df_; }
  double idf(const std::string& gram) const;

 private:
  std::uint32_t dim_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
  std::size_t n_docs_ = 0;
};

struct RidgeTrainOptions {
  std::uint32_t dim = 4096;  // must be a power of two
  double lambda = 1e-3;
  double cg_tol = 1e-8;
  std::size_t cg_max_iter = 500;
};

// Solves (X^T X / N + lambda I) w = X^T y / N by conjugate gradient over the
// sparse rows. Throws BackendError carrying the final residual when the
// tolerance is not reached within cg_max_iter.
struct CgResult {
  std::vector<double> weights;
  std::size_t iterations = 0;
  double residual = 0.0;
};
CgResult solve_ridge_cg(const std::vector<SparseRow>& rows, const std::vector<double>& targets,
                        const RidgeTrainOptions& opts);

struct RidgeScorerModel {
  std::uint32_t dim = 0;
  double lambda = 0.0;
  std::vector<double> weights;
  HashedTfidfFeaturizer featurizer;
  Composition composition;
  std::size_t max_story_tokens = 480;
  double train_mse = 0.0;
  std::size_t cg_iterations = 0;

  // Raw (unclamped) prediction; linear in the feature vector.
  double raw_predict(const SparseRow& row) const { return row.dot(weights); }
  double raw_predict_text(const std::string& input_text) const;

  std::string to_json() const;
  static RidgeScorerModel from_json(const std::string& text);
  void save(const std::string& path) const;
  static RidgeScorerModel load(const std::string& path);
};

RidgeScorerModel train_ridge(const std::vector<ScorerExample>& examples,
                             const RidgeTrainOptions& opts, const Composition& comp,
                             std::size_t max_story_tokens = 480);

// Scorer backend over a trained model; clamps predictions into [0, 1] and
// flags when clamping occurred.
class RidgeScorer final : public Scorer {
 public:
  explicit RidgeScorer(RidgeScorerModel model) : model_(std::move(model)) {}

  ScoreResult score(const std::string& story, const std::string& aspect,
                    const std::vector<std::string>& keywords) override;

  const RidgeScorerModel& model() const { return model_; }

 private:
  RidgeScorerModel model_;
};

}  // namespace coke
