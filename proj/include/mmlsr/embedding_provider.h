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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mmlsr/tokenizer.h"

namespace mmlsr {

struct DenseEmbedding {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  friend bool operator==(const DenseEmbedding&, const DenseEmbedding&) = default;
};

double Norm(const DenseEmbedding& v);
double Dot(std::span<const double> a, std::span<const double> b);

/// Mean of the inputs rescaled to unit Euclidean length. Throws
/// EmptyInputError for an empty span and DataError when the mean is zero.
DenseEmbedding MeanPoolNormalized(std::span<const DenseEmbedding> vectors);

/// Stand-in for the dense backbone: supplies per-token vectors h_1..h_L for
/// the MLP head and a pooled vector h_0 for the MLM head.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dimension() const = 0;

  /// Exactly tokens.size() vectors of dimension(), in input order.
  virtual std::vector<DenseEmbedding> EmbedTokens(
      const TokenSequence& tokens) const = 0;

  /// Pooled vector for an item. Table providers look up `item_id`; the toy
  /// provider pools `fallback_tokens`.
  virtual DenseEmbedding EmbedPooled(
      std::string_view item_id,
      const std::optional<TokenSequence>& fallback_tokens) const = 0;
};

/// Context-free deterministic embeddings.
///
/// Token t under global seed s gets the vector produced by
///   rng = mt19937_64(DeriveSeed(s, t))
///   x_k = 2 * ((rng() >> 11) * 2^-53) - 1      for k = 0..d-1
///   h   = x / ||x||_2
/// Pooled vectors are MeanPoolNormalized over the fallback tokens.
class ToyEmbeddingProvider final : public EmbeddingProvider {
 public:
  ToyEmbeddingProvider(std::size_t dimension, std::uint64_t seed);

  std::size_t dimension() const override { return dimension_; }
  std::uint64_t seed() const { return seed_; }

  DenseEmbedding TokenEmbedding(TermId token) const;

  std::vector<DenseEmbedding> EmbedTokens(
      const TokenSequence& tokens) const override;
  DenseEmbedding EmbedPooled(
      std::string_view item_id,
      const std::optional<TokenSequence>& fallback_tokens) const override;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

/// In-memory id -> vector table, loadable from the JSONL embedding format:
///   {"dim": d}
///   {"id": "<string>", "values": [f, ...]}
/// Token-level tables key tokens by their decimal term id.
class TableEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit TableEmbeddingProvider(std::size_t dimension);

  /// Reads the whole file. Throws ParseError on malformed lines, wrong
  /// dimensions, non-finite values or duplicate ids.
  static TableEmbeddingProvider Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  /// Throws ContractViolation on a dimension mismatch and DataError on a
  /// duplicate id.
  void Add(std::string id, DenseEmbedding embedding);

  bool contains(std::string_view id) const;
  /// Throws LookupError naming the id when absent.
  const DenseEmbedding& Get(std::string_view id) const;
  const std::vector<std::string>& ids() const { return order_; }

  std::size_t dimension() const override { return dimension_; }
  std::vector<DenseEmbedding> EmbedTokens(
      const TokenSequence& tokens) const override;
  DenseEmbedding EmbedPooled(
      std::string_view item_id,
      const std::optional<TokenSequence>& fallback_tokens) const override;

 private:
  std::size_t dimension_;
  std::vector<std::string> order_;
  std::unordered_map<std::string, DenseEmbedding> table_;
};

}  // namespace mmlsr
