// Copyright 2026-present the mmlsr project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "mmlsr/training.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "mmlsr/error.h"
#include "mmlsr/random.h"

namespace mmlsr {

using nlohmann::json;

void TrainingConfig::Validate() const {
  if (epochs < 1) throw ContractViolation("training: epochs must be >= 1");
  if (batch_size < 1) throw ContractViolation("training: batch_size must be >= 1");
  if (!(temperature > 0.0)) {
    throw ContractViolation("training: temperature must be > 0");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ContractViolation("training: learning_rate must be >= 0");
  }
  if (!(flops_lambda >= 0.0) || !std::isfinite(flops_lambda)) {
    throw ContractViolation("training: flops_lambda must be >= 0");
  }
}

TrainingConfig ReadTrainingConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open training config " + path.string());
  TrainingConfig c;
  try {
    const json j = json::parse(in);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.temperature = j.value("temperature", c.temperature);
    c.flops_lambda = j.value("flops_lambda", c.flops_lambda);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  try {
    c.Validate();
  } catch (const ContractViolation& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return c;
}

std::vector<TrainingPair> LoadTrainingPairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open training pairs " + path.string());
  std::vector<TrainingPair> pairs;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(path.string(), n, "expected 'query_id<TAB>doc_id'");
    }
    pairs.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return pairs;
}

namespace {

void CheckSquare(const ScoreMatrix& scores) {
  for (const auto& row : scores) {
    if (row.size() != scores.size()) {
      throw ContractViolation("InfoNCE: score matrix is not square");
    }
  }
}

// Softmax of row / temperature with max subtraction.
std::vector<double> RowSoftmax(const std::vector<double>& row,
                               double temperature, double* log_norm) {
  const double m = *std::max_element(row.begin(), row.end()) / temperature;
  std::vector<double> p(row.size());
  double z = 0.0;
  for (std::size_t d = 0; d < row.size(); ++d) {
    p[d] = std::exp(row[d] / temperature - m);
    z += p[d];
  }
  for (auto& x : p) x /= z;
  if (log_norm != nullptr) *log_norm = m + std::log(z);
  return p;
}

}  // namespace

double InfoNceLoss(const ScoreMatrix& scores, double temperature) {
  CheckSquare(scores);
  if (!(temperature > 0.0)) throw ContractViolation("InfoNCE: temperature <= 0");
  if (scores.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t q = 0; q < scores.size(); ++q) {
    double log_norm = 0.0;
    RowSoftmax(scores[q], temperature, &log_norm);
    // log-sum-exp >= any single term, so each row is >= 0 up to rounding.
    total += std::max(0.0, log_norm - scores[q][q] / temperature);
  }
  return total / static_cast<double>(scores.size());
}

ScoreMatrix InfoNceScoreGradient(const ScoreMatrix& scores,
                                 double temperature) {
  CheckSquare(scores);
  const double scale = 1.0 / (static_cast<double>(scores.size()) * temperature);
  ScoreMatrix grad(scores.size());
  for (std::size_t q = 0; q < scores.size(); ++q) {
    grad[q] = RowSoftmax(scores[q], temperature, nullptr);
    grad[q][q] -= 1.0;
    for (auto& x : grad[q]) x *= scale;
  }
  return grad;
}

double FlopsPenalty(std::span<const SparseVector> batch,
                    std::size_t vocab_size) {
  if (batch.empty()) return 0.0;
  std::vector<double> sums(vocab_size, 0.0);
  for (const auto& v : batch) {
    v.CheckVocabulary(vocab_size);
    for (const auto& e : v.entries()) sums[e.term] += e.weight;
  }
  const double n = static_cast<double>(batch.size());
  double penalty = 0.0;
  for (double s : sums) penalty += (s / n) * (s / n);
  return penalty;
}

namespace {

std::size_t VocabSize(const ModelParams& params) {
  if (params.doc_mlm) return params.doc_mlm->vocab_size();
  if (params.query_mlm) return params.query_mlm->vocab_size();
  return 0;
}

// Largest term id + 1 across the batch, used when no MLM head fixes |V|.
std::size_t SupportBound(std::span<const SparseVector> a,
                         std::span<const SparseVector> b) {
  std::size_t bound = 0;
  for (auto vs : {a, b}) {
    for (const auto& v : vs) {
      if (!v.empty()) bound = std::max<std::size_t>(bound, v.entries().back().term + 1);
    }
  }
  return bound;
}

struct Forward {
  std::vector<SparseVector> queries;
  std::vector<SparseVector> docs;
  ScoreMatrix scores;
  std::size_t vocab_size = 0;
  LossBreakdown loss;
};

Forward RunForward(const Batch& batch, const EncoderConfig& encoder,
                   const TrainingConfig& config, const ModelParams& params) {
  if (batch.queries.size() != batch.docs.size()) {
    throw ContractViolation("batch: query and document counts differ");
  }
  Forward f;
  for (const auto& q : batch.queries) {
    f.queries.push_back(EncodeQuery(q, encoder, params));
  }
  for (const auto& d : batch.docs) {
    f.docs.push_back(EncodeDocument(d, encoder, params));
  }
  const std::size_t b = batch.size();
  f.scores.assign(b, std::vector<double>(b, 0.0));
  for (std::size_t q = 0; q < b; ++q) {
    for (std::size_t d = 0; d < b; ++d) {
      f.scores[q][d] = dot(f.queries[q], f.docs[d]);
    }
  }
  f.vocab_size = std::max(VocabSize(params), SupportBound(f.queries, f.docs));
  f.loss.infonce = InfoNceLoss(f.scores, config.temperature);
  f.loss.flops = FlopsPenalty(f.queries, f.vocab_size) +
                 FlopsPenalty(f.docs, f.vocab_size);
  f.loss.total = f.loss.infonce + config.flops_lambda * f.loss.flops;
  return f;
}

// Accumulates dL/dW, dL/db given dL/dw for every vocabulary term.
void MlpBackward(const TextFeatures& text, const MlpHeadParams& params,
                 std::span<const double> term_grad, MlpHeadParams& grad) {
  for (std::size_t j = 0; j < text.tokens.size(); ++j) {
    const double z = MlpScore(text.embeddings[j], params);
    if (!(z > 0.0)) continue;
    const double c = term_grad[text.tokens.ids[j]] / (1.0 + z);
    if (c == 0.0) continue;
    const auto& h = text.embeddings[j].values;
    for (std::size_t k = 0; k < h.size(); ++k) grad.W[k] += c * h[k];
    grad.b += c;
  }
}

// Only the entries that survived encoding carry gradient.
void MlmBackward(const DenseEmbedding& pooled, const SparseVector& encoded,
                 std::span<const double> term_grad, MlmHeadParams& grad) {
  for (const auto& e : encoded.entries()) {
    const double c = term_grad[e.term];
    if (c == 0.0) continue;
    auto row = grad.row(e.term);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] += c * pooled.values[k];
    grad.bias[e.term] += c;
  }
}

// dL/dw for every item of one side of the batch: the InfoNCE part through
// `other` plus the FLOPS part.
std::vector<std::vector<double>> TermGradients(
    const ScoreMatrix& score_grad, bool rows_are_items,
    std::span<const SparseVector> items, std::span<const SparseVector> other,
    std::size_t vocab_size, double flops_lambda) {
  const std::size_t b = items.size();
  std::vector<std::vector<double>> g(b, std::vector<double>(vocab_size, 0.0));
  for (std::size_t x = 0; x < b; ++x) {
    for (std::size_t y = 0; y < b; ++y) {
      const double s = rows_are_items ? score_grad[x][y] : score_grad[y][x];
      for (const auto& e : other[y].entries()) g[x][e.term] += s * e.weight;
    }
  }
  if (flops_lambda > 0.0 && b > 0) {
    std::vector<double> mean(vocab_size, 0.0);
    for (const auto& v : items) {
      for (const auto& e : v.entries()) mean[e.term] += e.weight;
    }
    const double n = static_cast<double>(b);
    for (auto& m : mean) m /= n;
    for (std::size_t x = 0; x < b; ++x) {
      for (std::size_t i = 0; i < vocab_size; ++i) {
        g[x][i] += flops_lambda * 2.0 * mean[i] / n;
      }
    }
  }
  return g;
}

}  // namespace

LossBreakdown ComputeLoss(const Batch& batch, const EncoderConfig& encoder,
                          const TrainingConfig& config,
                          const ModelParams& params) {
  return RunForward(batch, encoder, config, params).loss;
}

LossAndGradients Backward(const Batch& batch, const EncoderConfig& encoder,
                          const TrainingConfig& config,
                          const ModelParams& params) {
  const Forward f = RunForward(batch, encoder, config, params);
  LossAndGradients out{f.loss, ZerosLike(params)};
  const std::size_t b = batch.size();
  if (b == 0) return out;

  const ScoreMatrix score_grad = InfoNceScoreGradient(f.scores, config.temperature);
  const auto query_grad = TermGradients(score_grad, true, f.queries, f.docs,
                                        f.vocab_size, config.flops_lambda);
  const auto doc_grad = TermGradients(score_grad, false, f.docs, f.queries,
                                      f.vocab_size, config.flops_lambda);

  for (std::size_t q = 0; q < b; ++q) {
    const auto& feats = batch.queries[q];
    if (encoder.query_head() == HeadKind::kMlp) {
      MlpBackward(*feats.text, *params.mlp, query_grad[q], *out.gradients.mlp);
    } else {
      MlmBackward(*feats.pooled, f.queries[q], query_grad[q],
                  *out.gradients.query_mlm);
    }
  }

  for (std::size_t d = 0; d < b; ++d) {
    const auto& feats = batch.docs[d];
    const auto& g = doc_grad[d];
    switch (encoder.variant) {
      case Variant::kM1:
      case Variant::kM2:
        MlmBackward(*feats.image, f.docs[d], g, *out.gradients.doc_mlm);
        break;
      case Variant::kM3:
        MlpBackward(*feats.caption, *params.mlp, g, *out.gradients.mlp);
        break;
      case Variant::kM4: {
        const SparseVector image_vec =
            MlmEncode(*feats.image, *params.doc_mlm, encoder.mlm_top_k);
        if (encoder.fusion == Fusion::kSum) {
          MlpBackward(*feats.caption, *params.mlp, g, *out.gradients.mlp);
          MlmBackward(*feats.image, image_vec, g, *out.gradients.doc_mlm);
          break;
        }
        const SparseVector caption_vec = MlpEncode(
            feats.caption->tokens, feats.caption->embeddings, *params.mlp);
        std::vector<double> to_caption(g.size(), 0.0);
        std::vector<double> to_image(g.size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const auto term = static_cast<TermId>(i);
          if (caption_vec.weight(term) > image_vec.weight(term)) {
            to_caption[i] = g[i];
          } else {
            to_image[i] = g[i];
          }
        }
        MlpBackward(*feats.caption, *params.mlp, to_caption, *out.gradients.mlp);
        MlmBackward(*feats.image, image_vec, to_image, *out.gradients.doc_mlm);
        break;
      }
    }
  }
  return out;
}

namespace {

// Visits every scalar parameter with a stable name, in a fixed order.
void ForEachCoordinate(ModelParams& p,
                       const std::function<void(const std::string&, double&)>& fn) {
  if (p.mlp) {
    for (std::size_t k = 0; k < p.mlp->W.size(); ++k) {
      fn("mlp.W[" + std::to_string(k) + "]", p.mlp->W[k]);
    }
    fn("mlp.b", p.mlp->b);
  }
  auto visit_mlm = [&](const char* name, MlmHeadParams& h) {
    for (std::size_t i = 0; i < h.E.size(); ++i) {
      fn(std::string(name) + ".E[" + std::to_string(i / h.dim) + "][" +
             std::to_string(i % h.dim) + "]",
         h.E[i]);
    }
    for (std::size_t i = 0; i < h.bias.size(); ++i) {
      fn(std::string(name) + ".bias[" + std::to_string(i) + "]", h.bias[i]);
    }
  };
  if (p.query_mlm) visit_mlm("query_mlm", *p.query_mlm);
  if (p.doc_mlm) visit_mlm("doc_mlm", *p.doc_mlm);
}

}  // namespace

GradCheckResult FiniteDiffCheck(const Batch& batch, const EncoderConfig& encoder,
                                const TrainingConfig& config,
                                const ModelParams& params, double epsilon,
                                std::size_t max_coordinates,
                                std::uint64_t sample_seed) {
  if (!(epsilon > 0.0) || epsilon > 1e-3) {
    throw ContractViolation("finite differences: epsilon must be in (0, 1e-3]");
  }
  const ModelParams analytic = Backward(batch, encoder, config, params).gradients;

  std::vector<double> analytic_flat;
  ModelParams analytic_copy = analytic;
  ForEachCoordinate(analytic_copy, [&](const std::string&, double& g) {
    analytic_flat.push_back(g);
  });

  std::vector<std::size_t> chosen(analytic_flat.size());
  std::iota(chosen.begin(), chosen.end(), 0);
  if (max_coordinates > 0 && max_coordinates < chosen.size()) {
    Rng rng(sample_seed);
    rng.shuffle(std::span<std::size_t>(chosen));
    chosen.resize(max_coordinates);
    std::sort(chosen.begin(), chosen.end());
  }

  GradCheckResult result;
  ModelParams probe = params;
  std::size_t flat = 0;
  std::size_t next = 0;
  ForEachCoordinate(probe, [&](const std::string& name, double& x) {
    const std::size_t index = flat++;
    if (next >= chosen.size() || chosen[next] != index) return;
    ++next;
    const double saved = x;
    x = saved + epsilon;
    const double up = ComputeLoss(batch, encoder, config, probe).total;
    x = saved - epsilon;
    const double down = ComputeLoss(batch, encoder, config, probe).total;
    x = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = analytic_flat[index];
    const double scale = std::max(std::abs(a), std::abs(numeric));
    const double err =
        scale < 1e-8 ? std::abs(a - numeric) : std::abs(a - numeric) / scale;
    ++result.coordinates_checked;
    if (err > result.max_error || result.worst_coordinate.empty()) {
      result.max_error = std::max(result.max_error, err);
      result.worst_coordinate = name;
    }
  });
  return result;
}

ModelParams InitParams(const EncoderConfig& encoder, std::size_t vocab_size,
                       std::size_t text_dim, std::size_t image_dim,
                       std::uint64_t seed) {
  auto fill = [](std::vector<double>& xs, std::size_t dim, std::uint64_t stream) {
    Rng rng(stream);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    for (auto& x : xs) x = rng.uniform(-bound, bound);
  };
  ModelParams p;
  if (encoder.variant != Variant::kM1) {
    if (text_dim == 0) throw ContractViolation("init: text dimension is 0");
    p.mlp = MlpHeadParams{std::vector<double>(text_dim), 0.0};
    fill(p.mlp->W, text_dim, DeriveSeed(seed, 0));
  }
  if (encoder.variant == Variant::kM1) {
    if (text_dim == 0) throw ContractViolation("init: text dimension is 0");
    p.query_mlm = MlmHeadParams(vocab_size, text_dim);
    fill(p.query_mlm->E, text_dim, DeriveSeed(seed, 1));
  }
  if (encoder.uses_image()) {
    if (image_dim == 0) throw ContractViolation("init: image dimension is 0");
    p.doc_mlm = MlmHeadParams(vocab_size, image_dim);
    fill(p.doc_mlm->E, image_dim, DeriveSeed(seed, 2));
  }
  return p;
}

namespace {

void SgdStep(ModelParams& params, ModelParams& grads, double lr) {
  std::vector<double*> grad_ptrs;
  ForEachCoordinate(grads, [&](const std::string&, double& g) {
    grad_ptrs.push_back(&g);
  });
  std::size_t i = 0;
  ForEachCoordinate(params, [&](const std::string&, double& x) {
    x -= lr * *grad_ptrs[i++];
  });
}

}  // namespace

TrainingResult Train(std::span<const TrainingPair> pairs,
                     std::span<const QueryRecord> queries,
                     std::span<const DocumentRecord> corpus,
                     const TrainingConfig& config, const EncoderConfig& encoder,
                     const Vocabulary& vocab, const Providers& providers,
                     ModelParams initial) {
  config.Validate();
  ValidateParams(encoder, initial, vocab.size());
  if (pairs.empty()) throw DataError("training: no training pairs");

  std::unordered_map<std::string, const QueryRecord*> query_by_id;
  for (const auto& q : queries) query_by_id.emplace(q.id, &q);
  std::unordered_map<std::string, const DocumentRecord*> doc_by_id;
  for (const auto& d : corpus) doc_by_id.emplace(d.id, &d);

  // Resolve everything up front; encoder inputs do not depend on parameters.
  std::unordered_map<std::string, QueryFeatures> query_features;
  std::unordered_map<std::string, DocumentFeatures> doc_features;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    auto q = query_by_id.find(p.query_id);
    if (q == query_by_id.end()) {
      throw DataError("training pair " + std::to_string(i + 1) +
                      ": unknown query id '" + p.query_id + "'");
    }
    auto d = doc_by_id.find(p.doc_id);
    if (d == doc_by_id.end()) {
      throw DataError("training pair " + std::to_string(i + 1) +
                      ": unknown document id '" + p.doc_id + "'");
    }
    if (!query_features.contains(p.query_id)) {
      query_features.emplace(
          p.query_id, PrepareQuery(p.query_id, BuildQueryText(*q->second),
                                   encoder, vocab, providers));
    }
    if (!doc_features.contains(p.doc_id)) {
      doc_features.emplace(p.doc_id,
                           PrepareDocument(*d->second, encoder, vocab, providers));
    }
  }

  TrainingResult result;
  result.params = std::move(initial);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(config.seed, 0x73687566666c65ULL));
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    EpochLog epoch_log{epoch, 0.0, 0.0, 0.0};
    std::size_t steps_in_epoch = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      Batch batch;
      for (std::size_t k = start; k < end; ++k) {
        const auto& p = pairs[order[k]];
        batch.queries.push_back(query_features.at(p.query_id));
        batch.docs.push_back(doc_features.at(p.doc_id));
      }
      auto lg = Backward(batch, encoder, config, result.params);
      SgdStep(result.params, lg.gradients, config.learning_rate);
      result.steps.push_back({++step, epoch, lg.loss});
      epoch_log.mean_infonce += lg.loss.infonce;
      epoch_log.mean_flops += lg.loss.flops;
      epoch_log.mean_total += lg.loss.total;
      ++steps_in_epoch;
    }
    const double n = static_cast<double>(steps_in_epoch);
    epoch_log.mean_infonce /= n;
    epoch_log.mean_flops /= n;
    epoch_log.mean_total /= n;
    result.epochs.push_back(epoch_log);
  }
  return result;
}

void WriteLossLog(const std::filesystem::path& path,
                  std::span<const StepLog> steps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write loss log " + path.string());
  out << "step,epoch,infonce,flops,total\n";
  char buf[160];
  for (const auto& s : steps) {
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g,%.17g\n", s.step,
                  s.epoch, s.loss.infonce, s.loss.flops, s.loss.total);
    out << buf;
  }
}

}  // namespace mmlsr
