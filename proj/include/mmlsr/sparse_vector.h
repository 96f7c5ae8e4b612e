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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mmlsr/vocabulary.h"

namespace mmlsr {

struct SparseEntry {
  TermId term = 0;
  double weight = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Bag of weighted terms. Entries are sorted by strictly increasing term id
/// and every stored weight is finite and > 0; zeros are never stored.
class SparseVector {
 public:
  SparseVector() = default;
  /// Takes entries that already satisfy the invariants; throws
  /// ContractViolation otherwise.
  explicit SparseVector(std::vector<SparseEntry> entries);

  /// Accepts entries in any order. Duplicate terms are summed and zero
  /// weights dropped. Negative or non-finite weights throw ContractViolation.
  static SparseVector FromUnsorted(std::vector<SparseEntry> entries);

  std::span<const SparseEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Weight of `term`, 0 when absent.
  double weight(TermId term) const;
  double total_weight() const;

  /// Throws ContractViolation if any term id is >= vocab_size.
  void CheckVocabulary(std::size_t vocab_size) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<SparseEntry> entries_;
};

double dot(const SparseVector& a, const SparseVector& b);

/// Elementwise sum.
SparseVector add(const SparseVector& a, const SparseVector& b);

/// Elementwise maximum.
SparseVector elementwise_max(const SparseVector& a, const SparseVector& b);

struct NamedSparseVector {
  std::string id;
  SparseVector vector;
};

/// {"id": "<id>", "vector": [[term_id, weight], ...]} on one line. Weights are
/// written with shortest round-trip precision.
std::string ToJsonLine(const NamedSparseVector& record);
NamedSparseVector ParseSparseVectorLine(const std::string& line,
                                        const std::string& source = "<string>",
                                        std::size_t line_number = 1);

std::vector<NamedSparseVector> ReadSparseVectors(
    const std::filesystem::path& path);
void WriteSparseVectors(const std::filesystem::path& path,
                        std::span<const NamedSparseVector> records);

}  // namespace mmlsr
