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
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mmlsr/encoders.h"
#include "mmlsr/ingest.h"

namespace mmlsr {

struct TrainingConfig {
  std::size_t epochs = 5;
  std::size_t batch_size = 32;
  double learning_rate = 0.1;
  /// Softmax temperature of the contrastive loss.
  double temperature = 1.0;
  std::uint64_t seed = 0;
  /// Weight of the FLOPS sparsity regulariser; 0 disables it.
  double flops_lambda = 0.0;

  /// Throws ContractViolation on a non-positive epoch count, batch size or
  /// temperature, or on a negative learning rate / lambda.
  void Validate() const;
};

/// {"epochs": 5, "batch_size": 32, "learning_rate": 0.1, "temperature": 1.0,
///  "flops_lambda": 0.0}; missing keys keep their defaults. The seed comes
/// from the command line, not from this file.
TrainingConfig ReadTrainingConfig(const std::filesystem::path& path);

struct TrainingPair {
  std::string query_id;
  std::string doc_id;
};

/// TSV: query_id <TAB> doc_id, one pair per line.
std::vector<TrainingPair> LoadTrainingPairs(const std::filesystem::path& path);

using ScoreMatrix = std::vector<std::vector<double>>;

/// Mean over rows of -log softmax(scores[q] / temperature)[q]. Rows are
/// queries, columns documents, the diagonal holds the positives.
double InfoNceLoss(const ScoreMatrix& scores, double temperature);

/// d InfoNceLoss / d scores = (softmax(scores[q]/t)[d] - [q == d]) / (B t).
ScoreMatrix InfoNceScoreGradient(const ScoreMatrix& scores, double temperature);

/// sum_i (mean over the batch of w_i)^2.
double FlopsPenalty(std::span<const SparseVector> batch, std::size_t vocab_size);

/// Aligned query/document features: queries[b] pairs with docs[b].
struct Batch {
  std::vector<QueryFeatures> queries;
  std::vector<DocumentFeatures> docs;

  std::size_t size() const { return queries.size(); }
};

struct LossBreakdown {
  double infonce = 0.0;
  /// Unweighted FLOPS penalty of the query batch plus the document batch.
  double flops = 0.0;
  /// infonce + flops_lambda * flops.
  double total = 0.0;
};

LossBreakdown ComputeLoss(const Batch& batch, const EncoderConfig& encoder,
                          const TrainingConfig& config,
                          const ModelParams& params);

struct LossAndGradients {
  LossBreakdown loss;
  ModelParams gradients;
};

/// Analytic gradient of LossBreakdown::total with respect to every head
/// parameter. ReLU'(0) is taken as 0; MLM entries removed by top-k truncation
/// pass no gradient; under max fusion a tied term routes its gradient to the
/// image head.
LossAndGradients Backward(const Batch& batch, const EncoderConfig& encoder,
                          const TrainingConfig& config,
                          const ModelParams& params);

struct GradCheckResult {
  /// Worst error over the checked coordinates. Relative error
  /// |a - n| / max(|a|, |n|), or the absolute error when both the analytic
  /// and numeric gradient are below 1e-8 in magnitude.
  double max_error = 0.0;
  std::string worst_coordinate;
  std::size_t coordinates_checked = 0;
};

/// Central differences (L(p + eps) - L(p - eps)) / (2 eps) against
/// Backward(). max_coordinates == 0 checks every coordinate; otherwise a
/// seeded uniform sample of that many.
GradCheckResult FiniteDiffCheck(const Batch& batch, const EncoderConfig& encoder,
                                const TrainingConfig& config,
                                const ModelParams& params, double epsilon,
                                std::size_t max_coordinates = 0,
                                std::uint64_t sample_seed = 0);

/// W and E entries from uniform(-1/sqrt(d), 1/sqrt(d)) drawn from
/// per-head streams of `seed`; biases start at zero.
ModelParams InitParams(const EncoderConfig& encoder, std::size_t vocab_size,
                       std::size_t text_dim, std::size_t image_dim,
                       std::uint64_t seed);

struct StepLog {
  std::size_t step = 0;   // 1-based, global
  std::size_t epoch = 0;  // 1-based
  LossBreakdown loss;
};

struct EpochLog {
  std::size_t epoch = 0;
  double mean_infonce = 0.0;
  double mean_flops = 0.0;
  double mean_total = 0.0;
};

struct TrainingResult {
  ModelParams params;
  std::vector<StepLog> steps;
  std::vector<EpochLog> epochs;
};

/// Plain SGD with in-batch negatives. Each epoch shuffles the pairs with the
/// config seed and walks them in batches of batch_size; the final batch may
/// be smaller. All ids are resolved and encoder inputs prepared before the
/// first step, so a bad id fails early with DataError.
TrainingResult Train(std::span<const TrainingPair> pairs,
                     std::span<const QueryRecord> queries,
                     std::span<const DocumentRecord> corpus,
                     const TrainingConfig& config, const EncoderConfig& encoder,
                     const Vocabulary& vocab, const Providers& providers,
                     ModelParams initial);

/// CSV with header "step,epoch,infonce,flops,total"; values at 17 significant
/// digits.
void WriteLossLog(const std::filesystem::path& path,
                  std::span<const StepLog> steps);

}  // namespace mmlsr
