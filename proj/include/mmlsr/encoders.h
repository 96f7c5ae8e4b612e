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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmlsr/embedding_provider.h"
#include "mmlsr/ingest.h"
#include "mmlsr/sparse_vector.h"
#include "mmlsr/tokenizer.h"
#include "mmlsr/vocabulary.h"

namespace mmlsr {

/// Per-token importance head: score(h) = ReLU(h . W + b).
struct MlpHeadParams {
  std::vector<double> W;
  double b = 0.0;

  std::size_t dim() const { return W.size(); }
  friend bool operator==(const MlpHeadParams&, const MlpHeadParams&) = default;
};

/// Vocabulary projection head: w_i = ReLU(h_0 . e_i + bias_i).
/// E is stored row-major, one row of length dim per vocabulary term.
struct MlmHeadParams {
  std::size_t dim = 0;
  std::vector<double> E;
  std::vector<double> bias;

  MlmHeadParams() = default;
  MlmHeadParams(std::size_t vocab_size, std::size_t dim)
      : dim(dim), E(vocab_size * dim, 0.0), bias(vocab_size, 0.0) {}

  std::size_t vocab_size() const { return bias.size(); }
  std::span<const double> row(TermId i) const {
    return std::span<const double>(E).subspan(i * dim, dim);
  }
  std::span<double> row(TermId i) {
    return std::span<double>(E).subspan(i * dim, dim);
  }
  friend bool operator==(const MlmHeadParams&, const MlmHeadParams&) = default;
};

enum class Variant { kM1, kM2, kM3, kM4 };
enum class Fusion { kSum, kMax };
enum class HeadKind { kMlp, kMlm };

std::string_view ToString(Variant v);
std::string_view ToString(Fusion f);
Variant ParseVariant(std::string_view s);
Fusion ParseFusion(std::string_view s);

/// Bi-encoder layout:
///   M1  query MLM | document image MLM
///   M2  query MLP | document image MLM
///   M3  query MLP | document caption MLP (the query head, shared)
///   M4  query MLP | caption MLP (shared) fused with image MLM
struct EncoderConfig {
  Variant variant = Variant::kM2;
  Fusion fusion = Fusion::kSum;
  std::optional<std::size_t> mlm_top_k;

  HeadKind query_head() const {
    return variant == Variant::kM1 ? HeadKind::kMlm : HeadKind::kMlp;
  }
  bool uses_caption() const {
    return variant == Variant::kM3 || variant == Variant::kM4;
  }
  bool uses_image() const { return variant != Variant::kM3; }

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

/// Every learnable parameter of a bi-encoder. The caption encoder of M3/M4 is
/// `mlp` itself: there is no separate caption head to drift out of sync.
/// The same struct doubles as the gradient container during training.
struct ModelParams {
  std::optional<MlpHeadParams> mlp;        // M2, M3, M4
  std::optional<MlmHeadParams> query_mlm;  // M1
  std::optional<MlmHeadParams> doc_mlm;    // M1, M2, M4

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Checks that exactly the heads required by `config` are present with
/// consistent shapes. Throws ContractViolation.
void ValidateParams(const EncoderConfig& config, const ModelParams& params,
                    std::size_t vocab_size);

/// Zero-valued parameters shaped like `params` (same heads, same sizes).
ModelParams ZerosLike(const ModelParams& params);

/// Term weights w_i = sum over positions j with t_j = i of ln(ReLU(h_j.W+b)+1).
/// Output support is a subset of the input tokens. Per-term contributions are
/// summed in ascending order so the result does not depend on token order.
SparseVector MlpEncode(const TokenSequence& tokens,
                       std::span<const DenseEmbedding> embeddings,
                       const MlpHeadParams& params);

/// Pre-activation h.W + b for one token.
double MlpScore(const DenseEmbedding& h, const MlpHeadParams& params);

/// w_i = ReLU(h_0.e_i + bias_i) over the whole vocabulary. With top_k only the
/// top_k largest weights are kept, ties going to the smaller term id.
SparseVector MlmEncode(const DenseEmbedding& pooled,
                       const MlmHeadParams& params,
                       std::optional<std::size_t> top_k = std::nullopt);

/// Pre-activations h_0.e_i + bias_i for every term.
std::vector<double> MlmScores(const DenseEmbedding& pooled,
                              const MlmHeadParams& params);

SparseVector FuseDocumentVectors(const SparseVector& caption,
                                 const SparseVector& image, Fusion rule);

/// Embedding sources. `image` may be null for M3, which never reads images.
struct Providers {
  const EmbeddingProvider* text = nullptr;
  const EmbeddingProvider* image = nullptr;
};

struct TextFeatures {
  TokenSequence tokens;
  std::vector<DenseEmbedding> embeddings;
};

/// Parameter-independent encoder inputs for a query.
struct QueryFeatures {
  std::string id;
  std::optional<TextFeatures> text;     // MLP query head
  std::optional<DenseEmbedding> pooled; // MLM query head
};

/// Parameter-independent encoder inputs for a document.
struct DocumentFeatures {
  std::string id;
  std::optional<TextFeatures> caption;
  std::optional<DenseEmbedding> image;
};

TextFeatures PrepareText(std::string_view text, const Vocabulary& vocab,
                         const EmbeddingProvider& provider);

QueryFeatures PrepareQuery(std::string_view query_id,
                           std::string_view query_text,
                           const EncoderConfig& config, const Vocabulary& vocab,
                           const Providers& providers);

/// Throws DataError naming the document when a field required by the
/// variant is missing or its image embedding cannot be found.
DocumentFeatures PrepareDocument(const DocumentRecord& doc,
                                 const EncoderConfig& config,
                                 const Vocabulary& vocab,
                                 const Providers& providers);

SparseVector EncodeQuery(const QueryFeatures& query,
                         const EncoderConfig& config,
                         const ModelParams& params);

SparseVector EncodeDocument(const DocumentFeatures& doc,
                            const EncoderConfig& config,
                            const ModelParams& params);

}  // namespace mmlsr
