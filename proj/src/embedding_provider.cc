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
#include "mmlsr/embedding_provider.h"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "mmlsr/error.h"
#include "mmlsr/random.h"

namespace mmlsr {

using nlohmann::json;

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractViolation("dot: dimension mismatch " +
                            std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm(const DenseEmbedding& v) {
  return std::sqrt(Dot(v.values, v.values));
}

DenseEmbedding MeanPoolNormalized(std::span<const DenseEmbedding> vectors) {
  if (vectors.empty()) {
    throw EmptyInputError("cannot pool an empty token sequence");
  }
  const std::size_t d = vectors.front().dim();
  DenseEmbedding mean{std::vector<double>(d, 0.0)};
  for (const auto& v : vectors) {
    if (v.dim() != d) throw ContractViolation("pool: mixed dimensions");
    for (std::size_t k = 0; k < d; ++k) mean.values[k] += v.values[k];
  }
  for (auto& x : mean.values) x /= static_cast<double>(vectors.size());
  const double n = Norm(mean);
  if (!(n > 0.0)) throw DataError("pool: mean embedding has zero norm");
  for (auto& x : mean.values) x /= n;
  return mean;
}

ToyEmbeddingProvider::ToyEmbeddingProvider(std::size_t dimension,
                                           std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension == 0) {
    throw ContractViolation("toy provider: dimension must be positive");
  }
}

DenseEmbedding ToyEmbeddingProvider::TokenEmbedding(TermId token) const {
  Rng rng(DeriveSeed(seed_, token));
  DenseEmbedding h{std::vector<double>(dimension_)};
  for (auto& x : h.values) x = 2.0 * rng.uniform01() - 1.0;
  const double n = Norm(h);
  for (auto& x : h.values) x /= n;
  return h;
}

std::vector<DenseEmbedding> ToyEmbeddingProvider::EmbedTokens(
    const TokenSequence& tokens) const {
  std::vector<DenseEmbedding> out;
  out.reserve(tokens.size());
  for (TermId t : tokens.ids) out.push_back(TokenEmbedding(t));
  return out;
}

DenseEmbedding ToyEmbeddingProvider::EmbedPooled(
    std::string_view item_id,
    const std::optional<TokenSequence>& fallback_tokens) const {
  if (!fallback_tokens || fallback_tokens->empty()) {
    throw EmptyInputError("toy provider: no tokens to pool for item '" +
                          std::string(item_id) + "'");
  }
  return MeanPoolNormalized(EmbedTokens(*fallback_tokens));
}

TableEmbeddingProvider::TableEmbeddingProvider(std::size_t dimension)
    : dimension_(dimension) {
  if (dimension == 0) {
    throw ContractViolation("embedding table: dimension must be positive");
  }
}

TableEmbeddingProvider TableEmbeddingProvider::Load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path.string());
  const std::string source = path.string();
  std::string line;
  std::size_t n = 0;
  std::optional<TableEmbeddingProvider> table;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, n, e.what());
    }
    try {
      if (!table) {
        const auto& dim = j.at("dim");
        if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0) {
          throw ParseError(source, n, "header 'dim' must be a positive integer");
        }
        table.emplace(dim.get<std::size_t>());
        continue;
      }
      std::string id = j.at("id").get<std::string>();
      DenseEmbedding v{j.at("values").get<std::vector<double>>()};
      if (v.dim() != table->dimension()) {
        throw ParseError(source, n,
                         "record '" + id + "' has dimension " +
                             std::to_string(v.dim()) + ", header declares " +
                             std::to_string(table->dimension()));
      }
      for (double x : v.values) {
        if (!std::isfinite(x)) {
          throw ParseError(source, n, "record '" + id + "' has a non-finite value");
        }
      }
      if (table->contains(id)) {
        throw ParseError(source, n, "duplicate id '" + id + "'");
      }
      table->Add(std::move(id), std::move(v));
    } catch (const json::exception& e) {
      throw ParseError(source, n, e.what());
    }
  }
  if (!table) throw ParseError(source, 1, "missing {\"dim\": d} header");
  return std::move(*table);
}

void TableEmbeddingProvider::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embedding file " + path.string());
  out << json{{"dim", dimension_}}.dump() << '\n';
  for (const auto& id : order_) {
    json j;
    j["id"] = id;
    j["values"] = table_.at(id).values;
    out << j.dump() << '\n';
  }
}

void TableEmbeddingProvider::Add(std::string id, DenseEmbedding embedding) {
  if (embedding.dim() != dimension_) {
    throw ContractViolation("embedding table: '" + id + "' has dimension " +
                            std::to_string(embedding.dim()) + ", expected " +
                            std::to_string(dimension_));
  }
  if (table_.contains(id)) {
    throw DataError("embedding table: duplicate id '" + id + "'");
  }
  order_.push_back(id);
  table_.emplace(std::move(id), std::move(embedding));
}

bool TableEmbeddingProvider::contains(std::string_view id) const {
  return table_.contains(std::string(id));
}

const DenseEmbedding& TableEmbeddingProvider::Get(std::string_view id) const {
  auto it = table_.find(std::string(id));
  if (it == table_.end()) throw LookupError(std::string(id));
  return it->second;
}

std::vector<DenseEmbedding> TableEmbeddingProvider::EmbedTokens(
    const TokenSequence& tokens) const {
  std::vector<DenseEmbedding> out;
  out.reserve(tokens.size());
  for (TermId t : tokens.ids) out.push_back(Get(std::to_string(t)));
  return out;
}

DenseEmbedding TableEmbeddingProvider::EmbedPooled(
    std::string_view item_id, const std::optional<TokenSequence>&) const {
  return Get(item_id);
}

}  // namespace mmlsr
