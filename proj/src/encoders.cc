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
#include "mmlsr/encoders.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mmlsr/error.h"

namespace mmlsr {

std::string_view ToString(Variant v) {
  switch (v) {
    case Variant::kM1: return "M1";
    case Variant::kM2: return "M2";
    case Variant::kM3: return "M3";
    case Variant::kM4: return "M4";
  }
  return "?";
}

std::string_view ToString(Fusion f) {
  return f == Fusion::kSum ? "sum" : "max";
}

Variant ParseVariant(std::string_view s) {
  if (s == "M1") return Variant::kM1;
  if (s == "M2") return Variant::kM2;
  if (s == "M3") return Variant::kM3;
  if (s == "M4") return Variant::kM4;
  throw DataError("unknown encoder variant '" + std::string(s) + "'");
}

Fusion ParseFusion(std::string_view s) {
  if (s == "sum") return Fusion::kSum;
  if (s == "max") return Fusion::kMax;
  throw DataError("unknown fusion rule '" + std::string(s) + "'");
}

namespace {

void CheckFinite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) {
      throw ContractViolation(std::string(what) + ": non-finite parameter");
    }
  }
}

void CheckMlm(const MlmHeadParams& p, std::size_t vocab_size,
              const char* what) {
  if (p.vocab_size() != vocab_size) {
    throw ContractViolation(std::string(what) + ": " +
                            std::to_string(p.vocab_size()) +
                            " rows for a vocabulary of " +
                            std::to_string(vocab_size));
  }
  if (p.dim == 0 || p.E.size() != p.vocab_size() * p.dim) {
    throw ContractViolation(std::string(what) + ": E has wrong shape");
  }
  CheckFinite(p.E, what);
  CheckFinite(p.bias, what);
}

void Require(bool present, Variant v, const char* head) {
  if (!present) {
    throw ContractViolation(std::string(ToString(v)) + " requires a " + head +
                            " head");
  }
}

void Forbid(bool present, Variant v, const char* head) {
  if (present) {
    throw ContractViolation(std::string(ToString(v)) + " has no " + head +
                            " head");
  }
}

}  // namespace

void ValidateParams(const EncoderConfig& config, const ModelParams& params,
                    std::size_t vocab_size) {
  const Variant v = config.variant;
  const bool wants_mlp = v != Variant::kM1;
  const bool wants_query_mlm = v == Variant::kM1;
  const bool wants_doc_mlm = v != Variant::kM3;
  wants_mlp ? Require(params.mlp.has_value(), v, "MLP")
            : Forbid(params.mlp.has_value(), v, "MLP");
  wants_query_mlm ? Require(params.query_mlm.has_value(), v, "query MLM")
                  : Forbid(params.query_mlm.has_value(), v, "query MLM");
  wants_doc_mlm ? Require(params.doc_mlm.has_value(), v, "document MLM")
                : Forbid(params.doc_mlm.has_value(), v, "document MLM");
  if (params.mlp) {
    if (params.mlp->W.empty()) throw ContractViolation("MLP head: empty W");
    CheckFinite(params.mlp->W, "MLP head");
    CheckFinite(std::span<const double>(&params.mlp->b, 1), "MLP head");
  }
  if (params.query_mlm) CheckMlm(*params.query_mlm, vocab_size, "query MLM head");
  if (params.doc_mlm) CheckMlm(*params.doc_mlm, vocab_size, "document MLM head");
  if (config.mlm_top_k && *config.mlm_top_k == 0) {
    throw ContractViolation("mlm_top_k must be positive");
  }
}

ModelParams ZerosLike(const ModelParams& params) {
  ModelParams z;
  if (params.mlp) z.mlp = MlpHeadParams{std::vector<double>(params.mlp->dim()), 0.0};
  if (params.query_mlm) {
    z.query_mlm = MlmHeadParams(params.query_mlm->vocab_size(), params.query_mlm->dim);
  }
  if (params.doc_mlm) {
    z.doc_mlm = MlmHeadParams(params.doc_mlm->vocab_size(), params.doc_mlm->dim);
  }
  return z;
}

double MlpScore(const DenseEmbedding& h, const MlpHeadParams& params) {
  return Dot(h.values, params.W) + params.b;
}

SparseVector MlpEncode(const TokenSequence& tokens,
                       std::span<const DenseEmbedding> embeddings,
                       const MlpHeadParams& params) {
  if (tokens.size() != embeddings.size()) {
    throw ContractViolation("MLP encode: " + std::to_string(tokens.size()) +
                            " tokens but " + std::to_string(embeddings.size()) +
                            " embeddings");
  }
  std::vector<SparseEntry> contributions;
  contributions.reserve(tokens.size());
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    const double z = MlpScore(embeddings[j], params);
    if (z > 0.0) contributions.push_back({tokens.ids[j], std::log1p(z)});
  }
  std::sort(contributions.begin(), contributions.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.term != b.term ? a.term < b.term : a.weight < b.weight;
            });
  return SparseVector::FromUnsorted(std::move(contributions));
}

std::vector<double> MlmScores(const DenseEmbedding& pooled,
                              const MlmHeadParams& params) {
  if (pooled.dim() != params.dim) {
    throw ContractViolation("MLM encode: pooled dimension " +
                            std::to_string(pooled.dim()) + ", head expects " +
                            std::to_string(params.dim));
  }
  std::vector<double> z(params.vocab_size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = Dot(pooled.values, params.row(static_cast<TermId>(i))) + params.bias[i];
  }
  return z;
}

SparseVector MlmEncode(const DenseEmbedding& pooled,
                       const MlmHeadParams& params,
                       std::optional<std::size_t> top_k) {
  if (top_k && *top_k == 0) {
    throw ContractViolation("MLM encode: top_k must be positive");
  }
  const auto z = MlmScores(pooled, params);
  std::vector<SparseEntry> entries;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] > 0.0) entries.push_back({static_cast<TermId>(i), z[i]});
  }
  if (top_k && entries.size() > *top_k) {
    auto by_weight = [](const SparseEntry& a, const SparseEntry& b) {
      return a.weight != b.weight ? a.weight > b.weight : a.term < b.term;
    };
    std::nth_element(entries.begin(), entries.begin() + *top_k, entries.end(),
                     by_weight);
    entries.resize(*top_k);
    std::sort(entries.begin(), entries.end(),
              [](const SparseEntry& a, const SparseEntry& b) {
                return a.term < b.term;
              });
  }
  return SparseVector(std::move(entries));
}

SparseVector FuseDocumentVectors(const SparseVector& caption,
                                 const SparseVector& image, Fusion rule) {
  return rule == Fusion::kSum ? add(caption, image)
                              : elementwise_max(caption, image);
}

TextFeatures PrepareText(std::string_view text, const Vocabulary& vocab,
                         const EmbeddingProvider& provider) {
  TextFeatures f;
  f.tokens = Tokenize(text, vocab);
  f.embeddings = provider.EmbedTokens(f.tokens);
  return f;
}

QueryFeatures PrepareQuery(std::string_view query_id,
                           std::string_view query_text,
                           const EncoderConfig& config, const Vocabulary& vocab,
                           const Providers& providers) {
  if (providers.text == nullptr) {
    throw ContractViolation("query encoding needs a text embedding provider");
  }
  QueryFeatures q;
  q.id = std::string(query_id);
  if (config.query_head() == HeadKind::kMlp) {
    q.text = PrepareText(query_text, vocab, *providers.text);
  } else {
    q.pooled = providers.text->EmbedPooled(query_id, Tokenize(query_text, vocab));
  }
  return q;
}

DocumentFeatures PrepareDocument(const DocumentRecord& doc,
                                 const EncoderConfig& config,
                                 const Vocabulary& vocab,
                                 const Providers& providers) {
  DocumentFeatures d;
  d.id = doc.id;
  if (config.uses_caption()) {
    if (!doc.caption) {
      throw DataError("document '" + doc.id + "' has no caption, required by " +
                      std::string(ToString(config.variant)));
    }
    if (providers.text == nullptr) {
      throw ContractViolation("caption encoding needs a text embedding provider");
    }
    d.caption = PrepareText(*doc.caption, vocab, *providers.text);
  }
  if (config.uses_image()) {
    if (!doc.image_embedding_ref) {
      throw DataError("document '" + doc.id +
                      "' has no image embedding, required by " +
                      std::string(ToString(config.variant)));
    }
    if (providers.image == nullptr) {
      throw ContractViolation("image encoding needs an image embedding provider");
    }
    try {
      d.image = providers.image->EmbedPooled(*doc.image_embedding_ref, std::nullopt);
    } catch (const LookupError& e) {
      throw DataError("document '" + doc.id + "': image embedding '" + e.id() +
                      "' not found");
    }
  }
  return d;
}

SparseVector EncodeQuery(const QueryFeatures& query,
                         const EncoderConfig& config,
                         const ModelParams& params) {
  if (config.query_head() == HeadKind::kMlp) {
    if (!query.text || !params.mlp) {
      throw ContractViolation("query '" + query.id + "': MLP inputs missing");
    }
    return MlpEncode(query.text->tokens, query.text->embeddings, *params.mlp);
  }
  if (!query.pooled || !params.query_mlm) {
    throw ContractViolation("query '" + query.id + "': MLM inputs missing");
  }
  return MlmEncode(*query.pooled, *params.query_mlm, config.mlm_top_k);
}

SparseVector EncodeDocument(const DocumentFeatures& doc,
                            const EncoderConfig& config,
                            const ModelParams& params) {
  SparseVector caption_vec;
  SparseVector image_vec;
  if (config.uses_caption()) {
    if (!doc.caption || !params.mlp) {
      throw ContractViolation("document '" + doc.id + "': caption inputs missing");
    }
    caption_vec =
        MlpEncode(doc.caption->tokens, doc.caption->embeddings, *params.mlp);
  }
  if (config.uses_image()) {
    if (!doc.image || !params.doc_mlm) {
      throw ContractViolation("document '" + doc.id + "': image inputs missing");
    }
    image_vec = MlmEncode(*doc.image, *params.doc_mlm, config.mlm_top_k);
  }
  switch (config.variant) {
    case Variant::kM1:
    case Variant::kM2:
      return image_vec;
    case Variant::kM3:
      return caption_vec;
    case Variant::kM4:
      return FuseDocumentVectors(caption_vec, image_vec, config.fusion);
  }
  return {};
}

}  // namespace mmlsr
