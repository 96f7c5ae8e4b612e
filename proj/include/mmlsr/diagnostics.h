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
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmlsr/sparse_vector.h"
#include "mmlsr/vocabulary.h"

namespace mmlsr {

/// How strongly a collection of vectors shares output dimensions. When every
/// vector lights up the same few terms the posting lists of those terms hold
/// every document (density 1); when vectors use disjoint terms each list holds
/// one document (density 1/N).
struct CoActivationReport {
  std::size_t vocab_size = 0;
  std::size_t doc_count = 0;
  /// Document frequency of every term.
  std::vector<std::size_t> df;
  std::size_t active_terms = 0;
  double mean_active_dims = 0.0;
  std::size_t min_active_dims = 0;
  std::size_t max_active_dims = 0;
  /// Mean of df_i / N over terms with df_i > 0.
  double density = 0.0;
  /// sum_i df_i / |{i : df_i > 0}|.
  double expected_postings_per_active_term = 0.0;

  std::string ToJson() const;
};

CoActivationReport ComputeCoActivation(std::span<const SparseVector> vectors,
                                       std::size_t vocab_size);

/// Highest-weighted terms, ties broken by smaller term id.
std::vector<std::pair<std::string, double>> TopTerms(const SparseVector& vec,
                                                     const Vocabulary& vocab,
                                                     std::size_t k);

/// Share of the vector's total weight that sits on stoplisted terms; 0 for
/// an empty vector.
double StopwordMass(const SparseVector& vec, const Vocabulary& vocab,
                    const std::set<std::string>& stoplist);

/// One term per line; blank lines ignored.
std::set<std::string> LoadStoplist(const std::filesystem::path& path);

/// "doc_id<TAB>rank<TAB>term<TAB>weight" rows, rank 1-based, top k per vector.
void WriteTopTermsTsv(const std::filesystem::path& path,
                      std::span<const NamedSparseVector> vectors,
                      const Vocabulary& vocab, std::size_t k);

}  // namespace mmlsr
