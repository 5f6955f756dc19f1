#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "densedex/corpus_io.hpp"
#include "densedex/toy_encoder.hpp"

namespace densedex {

struct TrainingPair {
  std::string query_id;
  std::string doc_id;
  TokenSeq query;  // Role::Query
  TokenSeq doc;    // Role::Document
  // Optional provided hard negative (triple input mode).
  std::optional<std::pair<std::string, TokenSeq>> hard_negative;
};

// One mini-batch of (query, positive document) pairs. Every document in the
// batch is a candidate for every query; with hard negatives included, each
// provided negative becomes one extra candidate column visible to all rows.
struct TrainingBatch {
  std::vector<TrainingPair> pairs;       // B >= 2
  const Qrels* qrels = nullptr;          // marks cross-pair positives
  bool include_hard_negatives = false;
};

// Row i scores query i against every candidate document column. Columns
// 0..B-1 are the batch positives (diagonal = own positive); columns >= B are
// hard negatives. positive(i, j) beyond the diagonal requires qrels saying
// doc j is relevant to query i.
struct ScoreMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> scores;    // rows x cols
  std::vector<uint8_t> positive; // rows x cols mask

  double at(size_t i, size_t j) const { return scores[i * cols + j]; }
  bool is_positive(size_t i, size_t j) const { return positive[i * cols + j] != 0; }
  std::span<const double> row(size_t i) const { return {scores.data() + i * cols, cols}; }
};

ScoreMatrix build_score_matrix(const TrainingBatch& batch, const ToyEncoderParams& params);

// (1/n) * sum over (positive i, negative j) of max(0, 1 - (s_i - s_j)),
// n = scores.size(). positive_indices must be a non-empty proper subset.
double margin_loss(std::span<const double> scores,
                   const std::vector<size_t>& positive_indices);

// Mean of margin_loss over the rows of the matrix.
double batch_loss(const ScoreMatrix& matrix);
double batch_loss(const TrainingBatch& batch, const ToyEncoderParams& params);

// Sparse over token rows: only tokens that occur in the batch carry entries.
struct ParamGradient {
  uint32_t vocab_size = 0;
  uint32_t dim = 0;
  std::unordered_map<uint32_t, std::vector<double>> token_rows;
  std::vector<double> seg_query;
  std::vector<double> seg_doc;

  double token_component(uint32_t token, uint32_t j) const;
  void accumulate(const ParamGradient& other);
};

// Analytic gradient of batch_loss with respect to the encoder params.
// Subgradient 0 at the hinge kink: a pair contributes only when
// 1 - (s_pos - s_neg) > 0.
ParamGradient loss_gradient(const TrainingBatch& batch, const ToyEncoderParams& params);

struct TrainConfig {
  uint32_t vocab_size = 65536;
  uint32_t dim = 64;
  size_t batch_size = 26;
  size_t accumulation = 2;  // micro-batches averaged per optimizer step
  size_t steps = 0;         // required
  double lr = 5.0;
  size_t warmup_steps = 0;  // 0 = steps/35, at least 1
  uint64_t seed = 1;
  bool use_triple_negative = false;
  const Qrels* qrels = nullptr;
};

// Reference hyperparameters of the full-scale ADAM recipe this toy trainer
// mirrors; recorded for porting, unused by the plain-SGD loop below.
struct FullScaleReference {
  static constexpr double kAdamLr = 3e-6;
  static constexpr double kAdamBeta1 = 0.9;
  static constexpr double kAdamBeta2 = 0.999;
  static constexpr double kWeightDecay = 0.01;
  static constexpr double kDropout = 0.1;
  static constexpr size_t kWarmupSteps = 10000;
  static constexpr size_t kTotalSteps = 350000;
  static constexpr size_t kBatchSize = 26;
  static constexpr size_t kAccumulationSteps = 2;
};

struct TrainResult {
  ToyEncoderParams params;
  std::vector<double> loss_curve;  // one mean loss per optimizer step
};

// Plain SGD with linear warmup then linear decay. Deterministic given the
// seed: initialization, shuffling, and batch order are all derived from it.
TrainResult train(const std::vector<TrainingPair>& dataset, const TrainConfig& config);

// Loads `qid<TAB>query<TAB>did<TAB>doc` pairs; with expect_triples, two extra
// columns `neg_did<TAB>neg_doc` attach a hard negative to each pair.
std::vector<TrainingPair> load_training_pairs(const std::filesystem::path& path,
                                              uint32_t vocab_size,
                                              bool expect_triples = false);

}  // namespace densedex
