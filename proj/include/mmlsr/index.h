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
#include <span>
#include <string>
#include <vector>

#include "mmlsr/sparse_vector.h"

namespace mmlsr {

struct Hit {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const Hit&, const Hit&) = default;
};

/// Hits ordered by score descending, then doc_id ascending.
struct RankedList {
  std::string query_id;
  std::vector<Hit> hits;

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// True when `a` ranks ahead of `b`.
inline bool RanksBefore(const Hit& a, const Hit& b) {
  return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
}

struct Posting {
  std::uint32_t doc = 0;  // ordinal into the document table
  double impact = 0.0;

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct IndexStats {
  std::size_t doc_count = 0;
  std::size_t vocab_size = 0;
  std::size_t terms_used = 0;
  std::size_t total_postings = 0;
  /// Over terms with a non-empty posting list.
  double mean_posting_length = 0.0;
  std::size_t max_posting_length = 0;
};

/// Immutable impact-scored inverted index. Ordinals follow input order.
class InvertedIndex {
 public:
  /// Throws DataError on a duplicate or empty document id and
  /// ContractViolation on a term outside the vocabulary.
  static InvertedIndex Build(std::span<const NamedSparseVector> docs,
                             std::size_t vocab_size);

  /// Directory layout: manifest.json {"doc_count", "vocab_size"},
  /// doc_table.tsv (ordinal <TAB> doc_id), postings.bin (for every term in
  /// id order: uint32 length, then length x (uint32 ordinal, float64 impact),
  /// all little-endian).
  static InvertedIndex Load(const std::filesystem::path& dir);
  void Save(const std::filesystem::path& dir) const;

  std::size_t doc_count() const { return doc_ids_.size(); }
  std::size_t vocab_size() const { return postings_.size(); }
  const std::string& doc_id(std::uint32_t ordinal) const { return doc_ids_.at(ordinal); }
  std::span<const Posting> postings(TermId term) const { return postings_.at(term); }

  /// Exact top-k by sparse dot product, document-at-a-time over the query's
  /// posting lists with a bounded heap. Documents sharing no term with the
  /// query are never returned. k must be >= 1.
  RankedList Search(const SparseVector& query, std::size_t k,
                    std::string query_id = {}) const;

  IndexStats Stats() const;
  /// Sum of posting-list lengths over the query's terms: the number of
  /// postings a traversal touches.
  std::size_t PostingsForQuery(const SparseVector& query) const;

  /// Rebuilds the indexed vectors from the postings, in ordinal order.
  std::vector<NamedSparseVector> Reconstruct() const;

  friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

 private:
  std::vector<std::string> doc_ids_;
  std::vector<std::vector<Posting>> postings_;
};

/// Reference scorer: dot product against every document, same ordering and
/// zero-overlap exclusion as InvertedIndex::Search.
RankedList BruteForceSearch(std::span<const NamedSparseVector> docs,
                            const SparseVector& query, std::size_t k,
                            std::string query_id = {});

}  // namespace mmlsr
