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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmlsr/index.h"

namespace mmlsr {

/// Graded relevance judgments, (query_id, doc_id) -> grade >= 0.
class Qrels {
 public:
  /// Throws DataError on a negative grade or a repeated (query, doc) pair.
  void Add(const std::string& query_id, const std::string& doc_id, int grade);

  /// Whitespace-separated "query_id 0 doc_id grade" lines.
  static Qrels Load(const std::filesystem::path& path);
  /// Written sorted by (query_id, doc_id).
  void Save(const std::filesystem::path& path) const;

  bool has_query(const std::string& query_id) const {
    return judgments_.contains(query_id);
  }
  /// 0 when unjudged.
  int grade(const std::string& query_id, const std::string& doc_id) const;
  /// Judged documents of a query; empty when the query is unknown.
  const std::map<std::string, int>& judged(const std::string& query_id) const;
  /// Number of documents with grade > 0.
  std::size_t relevant_count(const std::string& query_id) const;
  const std::map<std::string, std::map<std::string, int>>& all() const {
    return judgments_;
  }

 private:
  std::map<std::string, std::map<std::string, int>> judgments_;
};

/// DCG@k / IDCG@k with gain = grade and discount log2(rank + 1). Returns 0
/// when the query has no document with grade > 0.
double NdcgAtK(const RankedList& ranked, const Qrels& qrels, std::size_t k);

/// (1/R) * sum of precision@i over relevant hits at rank i <= k, R being the
/// total number of relevant documents for the query (grade > 0).
double MapAtK(const RankedList& ranked, const Qrels& qrels, std::size_t k);

/// |relevant within top k| / R.
double RecallAtK(const RankedList& ranked, const Qrels& qrels, std::size_t k);

struct Cutoffs {
  std::vector<std::size_t> ndcg{5, 10, 100, 500, 1000};
  std::vector<std::size_t> map{5, 10, 100, 500, 1000};
  std::vector<std::size_t> recall{20, 100, 500, 1000};

  /// The same list for all three metrics.
  static Cutoffs Uniform(std::vector<std::size_t> ks);
};

struct MetricReport {
  /// "NDCG@5", ..., "MAP@5", ..., "R@20", ... in that order.
  std::vector<std::string> columns;
  /// Per evaluated query, values aligned with `columns`.
  std::map<std::string, std::vector<double>> per_query;
  /// Arithmetic means over evaluated queries.
  std::vector<double> mean;
  /// Run queries absent from the qrels.
  std::vector<std::string> skipped_queries;
  /// Queries judged but without any relevant document; excluded from means.
  std::vector<std::string> no_relevant_queries;

  std::optional<double> Mean(const std::string& column) const;

  /// JSON with fractions at full precision plus the percent form.
  std::string ToJson() const;
  /// "metric<TAB>fraction<TAB>percent" rows, 4 and 2 decimals.
  std::string ToTable() const;
};

/// Throws DataError if two ranked lists share a query id.
MetricReport EvaluateRun(std::span<const RankedList> run, const Qrels& qrels,
                         const Cutoffs& cutoffs = {});

/// TREC run file: "query_id Q0 doc_id rank score tag", ranks 1-based,
/// scores with 6 decimals, sorted by (query_id, rank).
void WriteRun(const std::filesystem::path& path,
              std::span<const RankedList> run, const std::string& tag);

struct Run {
  std::vector<RankedList> lists;  // by query_id
  std::string tag;
};

/// Hits come back in rank order. Throws ParseError on malformed lines and
/// DataError on duplicate (query, doc) or rank entries.
Run ReadRun(const std::filesystem::path& path);

}  // namespace mmlsr
