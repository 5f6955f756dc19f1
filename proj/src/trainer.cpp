#include "densedex/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "densedex/binio.hpp"
#include "densedex/error.hpp"
#include "densedex/rng.hpp"

namespace densedex {

namespace {

struct BatchEmbeddings {
  std::vector<std::vector<double>> queries;  // B
  std::vector<std::vector<double>> docs;     // cols
  std::vector<const std::string*> doc_ids;   // cols, for qrels lookups
  std::vector<const TokenSeq*> doc_seqs;     // cols
};

void check_batch(const TrainingBatch& batch) {
  if (batch.pairs.size() < 2) {
    throw DataError(ErrKind::BadArgument, "in-batch negatives need at least 2 pairs, got " +
                                              std::to_string(batch.pairs.size()));
  }
}

BatchEmbeddings embed_batch(const TrainingBatch& batch, const ToyEncoderParams& params) {
  BatchEmbeddings out;
  const size_t b = batch.pairs.size();
  out.queries.reserve(b);
  out.docs.reserve(b);
  for (const auto& pair : batch.pairs) {
    out.queries.push_back(encode(pair.query, params));
    out.docs.push_back(encode(pair.doc, params));
    out.doc_ids.push_back(&pair.doc_id);
    out.doc_seqs.push_back(&pair.doc);
  }
  if (batch.include_hard_negatives) {
    for (const auto& pair : batch.pairs) {
      if (!pair.hard_negative) continue;
      out.docs.push_back(encode(pair.hard_negative->second, params));
      out.doc_ids.push_back(&pair.hard_negative->first);
      out.doc_seqs.push_back(&pair.hard_negative->second);
    }
  }
  return out;
}

std::vector<size_t> row_positives(const ScoreMatrix& m, size_t i) {
  std::vector<size_t> pos;
  for (size_t j = 0; j < m.cols; ++j) {
    if (m.is_positive(i, j)) pos.push_back(j);
  }
  return pos;
}

ScoreMatrix matrix_from_embeddings(const TrainingBatch& batch, const BatchEmbeddings& emb) {
  ScoreMatrix m;
  m.rows = batch.pairs.size();
  m.cols = emb.docs.size();
  m.scores.resize(m.rows * m.cols);
  m.positive.assign(m.rows * m.cols, 0);
  for (size_t i = 0; i < m.rows; ++i) {
    const auto& q = emb.queries[i];
    const std::string& qid = batch.pairs[i].query_id;
    for (size_t j = 0; j < m.cols; ++j) {
      m.scores[i * m.cols + j] = relevance(q, emb.docs[j]);
      const bool pos = (i == j) || (batch.qrels != nullptr &&
                                    batch.qrels->is_relevant(qid, *emb.doc_ids[j]));
      m.positive[i * m.cols + j] = pos ? 1 : 0;
    }
  }
  return m;
}

}  // namespace

ScoreMatrix build_score_matrix(const TrainingBatch& batch, const ToyEncoderParams& params) {
  check_batch(batch);
  return matrix_from_embeddings(batch, embed_batch(batch, params));
}

double margin_loss(std::span<const double> scores,
                   const std::vector<size_t>& positive_indices) {
  const size_t n = scores.size();
  if (positive_indices.empty()) {
    throw DataError(ErrKind::BadArgument, "margin loss needs at least one positive");
  }
  std::vector<uint8_t> is_pos(n, 0);
  for (const size_t p : positive_indices) {
    if (p >= n) throw DataError(ErrKind::BadArgument, "positive index out of range");
    is_pos[p] = 1;
  }
  size_t pos_count = 0;
  for (const auto f : is_pos) pos_count += f;
  if (pos_count == n) {
    throw DataError(ErrKind::BadArgument, "margin loss needs at least one negative");
  }
  double sum = 0.0;
  for (size_t p = 0; p < n; ++p) {
    if (!is_pos[p]) continue;
    for (size_t j = 0; j < n; ++j) {
      if (is_pos[j]) continue;
      const double hinge = 1.0 - (scores[p] - scores[j]);
      // negated comparison so NaN from non-finite scores propagates into
      // the sum instead of being skipped
      if (!(hinge <= 0.0)) sum += hinge;
    }
  }
  return sum / static_cast<double>(n);
}

double batch_loss(const ScoreMatrix& matrix) {
  if (matrix.rows < 2) {
    throw DataError(ErrKind::BadArgument, "batch loss needs at least 2 rows");
  }
  double sum = 0.0;
  for (size_t i = 0; i < matrix.rows; ++i) {
    sum += margin_loss(matrix.row(i), row_positives(matrix, i));
  }
  return sum / static_cast<double>(matrix.rows);
}

double batch_loss(const TrainingBatch& batch, const ToyEncoderParams& params) {
  return batch_loss(build_score_matrix(batch, params));
}

double ParamGradient::token_component(uint32_t token, uint32_t j) const {
  const auto it = token_rows.find(token);
  return it == token_rows.end() ? 0.0 : it->second[j];
}

void ParamGradient::accumulate(const ParamGradient& other) {
  for (const auto& [token, row] : other.token_rows) {
    auto& mine = token_rows[token];
    if (mine.empty()) mine.assign(dim, 0.0);
    for (uint32_t j = 0; j < dim; ++j) mine[j] += row[j];
  }
  for (uint32_t j = 0; j < dim; ++j) {
    seg_query[j] += other.seg_query[j];
    seg_doc[j] += other.seg_doc[j];
  }
}

namespace {

// Shared by loss_gradient and the train loop; returns the batch loss and
// accumulates the analytic gradient into `grad`.
double gradient_into(const TrainingBatch& batch, const ToyEncoderParams& params,
                     ParamGradient& grad) {
  check_batch(batch);
  const BatchEmbeddings emb = embed_batch(batch, params);
  const ScoreMatrix m = matrix_from_embeddings(batch, emb);
  const size_t rows = m.rows;
  const size_t cols = m.cols;

  // coeff[i][j] = d(batch_loss)/d(score[i][j]); each active hinge pair
  // (p positive, j negative) moves its positive down and negative up by
  // 1/(rows*cols).
  std::vector<double> coeff(rows * cols, 0.0);
  const double w = 1.0 / (static_cast<double>(rows) * static_cast<double>(cols));
  double loss = 0.0;
  for (size_t i = 0; i < rows; ++i) {
    const auto positives = row_positives(m, i);
    loss += margin_loss(m.row(i), positives);
    for (const size_t p : positives) {
      for (size_t j = 0; j < cols; ++j) {
        if (m.is_positive(i, j)) continue;
        if (1.0 - (m.at(i, p) - m.at(i, j)) > 0.0) {
          coeff[i * cols + p] -= w;
          coeff[i * cols + j] += w;
        }
      }
    }
  }
  loss /= static_cast<double>(rows);

  if (grad.seg_query.empty()) {
    grad.vocab_size = params.vocab_size;
    grad.dim = params.dim;
    grad.seg_query.assign(params.dim, 0.0);
    grad.seg_doc.assign(params.dim, 0.0);
  }

  const auto scatter = [&](const TokenSeq& seq, const std::vector<double>& emb_grad,
                           std::vector<double>& seg_grad) {
    const double inv_len = 1.0 / static_cast<double>(seq.ids.size());
    for (const uint32_t t : seq.ids) {
      auto& row = grad.token_rows[t];
      if (row.empty()) row.assign(params.dim, 0.0);
      for (uint32_t j = 0; j < params.dim; ++j) row[j] += inv_len * emb_grad[j];
    }
    for (uint32_t j = 0; j < params.dim; ++j) seg_grad[j] += emb_grad[j];
  };

  std::vector<double> emb_grad(params.dim);
  for (size_t i = 0; i < rows; ++i) {
    std::fill(emb_grad.begin(), emb_grad.end(), 0.0);
    for (size_t j = 0; j < cols; ++j) {
      const double c = coeff[i * cols + j];
      if (c == 0.0) continue;
      const auto& d = emb.docs[j];
      for (uint32_t x = 0; x < params.dim; ++x) emb_grad[x] += c * d[x];
    }
    scatter(batch.pairs[i].query, emb_grad, grad.seg_query);
  }
  for (size_t j = 0; j < cols; ++j) {
    std::fill(emb_grad.begin(), emb_grad.end(), 0.0);
    for (size_t i = 0; i < rows; ++i) {
      const double c = coeff[i * cols + j];
      if (c == 0.0) continue;
      const auto& q = emb.queries[i];
      for (uint32_t x = 0; x < params.dim; ++x) emb_grad[x] += c * q[x];
    }
    scatter(*emb.doc_seqs[j], emb_grad, grad.seg_doc);
  }
  return loss;
}

}  // namespace

ParamGradient loss_gradient(const TrainingBatch& batch, const ToyEncoderParams& params) {
  ParamGradient grad;
  gradient_into(batch, params, grad);
  return grad;
}

TrainResult train(const std::vector<TrainingPair>& dataset, const TrainConfig& config) {
  if (config.steps == 0) throw DataError(ErrKind::BadArgument, "steps must be >= 1");
  if (config.batch_size < 2) throw DataError(ErrKind::BadArgument, "batch size must be >= 2");
  if (config.accumulation == 0) {
    throw DataError(ErrKind::BadArgument, "accumulation must be >= 1");
  }
  if (dataset.size() < config.batch_size) {
    throw DataError(ErrKind::BadArgument,
                    "dataset has " + std::to_string(dataset.size()) +
                        " pairs, need at least batch size " +
                        std::to_string(config.batch_size));
  }
  if (config.lr < 0.0 || !std::isfinite(config.lr)) {
    throw DataError(ErrKind::BadArgument, "learning rate must be finite and >= 0");
  }

  std::mt19937_64 rng(config.seed);
  ToyEncoderParams params = init_params(config.vocab_size, config.dim, rng);

  const size_t total = config.steps;
  const size_t warmup =
      config.warmup_steps > 0 ? config.warmup_steps : std::max<size_t>(1, total / 35);
  const auto lr_at = [&](size_t step) {  // 1-based
    if (step <= warmup) {
      return config.lr * static_cast<double>(step) / static_cast<double>(warmup);
    }
    const size_t decay_span = total > warmup ? total - warmup : 1;
    return config.lr * static_cast<double>(total - step) / static_cast<double>(decay_span);
  };

  // Shuffled index stream; a tail shorter than B is dropped and the pool is
  // reshuffled, so a batch never contains the same pair twice.
  std::vector<size_t> perm(dataset.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  size_t pos = perm.size();
  const auto next_batch = [&]() {
    if (pos + config.batch_size > perm.size()) {
      shuffle_vec(perm, rng);
      pos = 0;
    }
    TrainingBatch batch;
    batch.qrels = config.qrels;
    batch.include_hard_negatives = config.use_triple_negative;
    batch.pairs.reserve(config.batch_size);
    for (size_t i = 0; i < config.batch_size; ++i) batch.pairs.push_back(dataset[perm[pos + i]]);
    pos += config.batch_size;
    return batch;
  };

  TrainResult result;
  result.loss_curve.reserve(total);
  for (size_t step = 1; step <= total; ++step) {
    ParamGradient accum;
    accum.vocab_size = params.vocab_size;
    accum.dim = params.dim;
    accum.seg_query.assign(params.dim, 0.0);
    accum.seg_doc.assign(params.dim, 0.0);
    double loss_sum = 0.0;
    for (size_t micro = 0; micro < config.accumulation; ++micro) {
      const TrainingBatch batch = next_batch();
      loss_sum += gradient_into(batch, params, accum);
    }
    const double step_loss = loss_sum / static_cast<double>(config.accumulation);
    if (!std::isfinite(step_loss)) {
      throw DataError(ErrKind::Numeric,
                      "non-finite loss at step " + std::to_string(step));
    }
    result.loss_curve.push_back(step_loss);

    const double scale = lr_at(step) / static_cast<double>(config.accumulation);
    if (scale > 0.0) {
      for (const auto& [token, row] : accum.token_rows) {
        auto prow = params.token_row(token);
        for (uint32_t j = 0; j < params.dim; ++j) prow[j] -= scale * row[j];
      }
      for (uint32_t j = 0; j < params.dim; ++j) {
        params.seg_query[j] -= scale * accum.seg_query[j];
        params.seg_doc[j] -= scale * accum.seg_doc[j];
      }
    }
  }
  result.params = std::move(params);
  return result;
}

std::vector<TrainingPair> load_training_pairs(const std::filesystem::path& path,
                                              uint32_t vocab_size, bool expect_triples) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(ErrKind::Io, "cannot open " + path.string());
  const std::string label = path.filename().string();
  const size_t want = expect_triples ? 6 : 4;

  std::vector<TrainingPair> pairs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!binio::is_valid_utf8(line)) {
      throw DataError(ErrKind::Utf8,
                      label + ":" + std::to_string(line_no) + ": invalid UTF-8");
    }
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      const size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.emplace_back(line.substr(start));
        break;
      }
      fields.emplace_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != want) {
      throw DataError(ErrKind::Parse, label + ":" + std::to_string(line_no) +
                                          ": expected " + std::to_string(want) +
                                          " tab-separated fields, got " +
                                          std::to_string(fields.size()));
    }
    TrainingPair pair;
    pair.query_id = fields[0];
    pair.query = tokenize(fields[1], Role::Query, vocab_size);
    pair.doc_id = fields[2];
    pair.doc = tokenize(fields[3], Role::Document, vocab_size);
    if (expect_triples) {
      pair.hard_negative = {fields[4], tokenize(fields[5], Role::Document, vocab_size)};
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace densedex
