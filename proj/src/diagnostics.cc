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
#include "mmlsr/diagnostics.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "mmlsr/error.h"

namespace mmlsr {

std::string CoActivationReport::ToJson() const {
  nlohmann::ordered_json j;
  j["vocab_size"] = vocab_size;
  j["doc_count"] = doc_count;
  j["active_terms"] = active_terms;
  j["active_dims_per_doc"] = {{"mean", mean_active_dims},
                              {"min", min_active_dims},
                              {"max", max_active_dims}};
  j["density"] = density;
  j["expected_postings_per_active_term"] = expected_postings_per_active_term;
  auto dfs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < df.size(); ++i) {
    if (df[i] > 0) dfs.push_back({i, df[i]});
  }
  j["df"] = std::move(dfs);
  return j.dump(2) + "\n";
}

CoActivationReport ComputeCoActivation(std::span<const SparseVector> vectors,
                                       std::size_t vocab_size) {
  CoActivationReport r;
  r.vocab_size = vocab_size;
  r.doc_count = vectors.size();
  r.df.assign(vocab_size, 0);
  if (vectors.empty()) return r;

  std::size_t total_active = 0;
  r.min_active_dims = std::numeric_limits<std::size_t>::max();
  for (const auto& v : vectors) {
    v.CheckVocabulary(vocab_size);
    for (const auto& e : v.entries()) ++r.df[e.term];
    total_active += v.size();
    r.min_active_dims = std::min(r.min_active_dims, v.size());
    r.max_active_dims = std::max(r.max_active_dims, v.size());
  }
  const double n = static_cast<double>(vectors.size());
  r.mean_active_dims = static_cast<double>(total_active) / n;
  double density_sum = 0.0;
  for (std::size_t df : r.df) {
    if (df == 0) continue;
    ++r.active_terms;
    density_sum += static_cast<double>(df) / n;
  }
  if (r.active_terms > 0) {
    const double active = static_cast<double>(r.active_terms);
    r.density = density_sum / active;
    r.expected_postings_per_active_term =
        static_cast<double>(total_active) / active;
  }
  return r;
}

std::vector<std::pair<std::string, double>> TopTerms(const SparseVector& vec,
                                                     const Vocabulary& vocab,
                                                     std::size_t k) {
  if (k == 0) throw ContractViolation("top_terms: k must be >= 1");
  vec.CheckVocabulary(vocab.size());
  std::vector<SparseEntry> entries(vec.entries().begin(), vec.entries().end());
  const std::size_t n = std::min(k, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + n, entries.end(),
                    [](const SparseEntry& a, const SparseEntry& b) {
                      return a.weight != b.weight ? a.weight > b.weight
                                                  : a.term < b.term;
                    });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(vocab.term(entries[i].term), entries[i].weight);
  }
  return out;
}

double StopwordMass(const SparseVector& vec, const Vocabulary& vocab,
                    const std::set<std::string>& stoplist) {
  vec.CheckVocabulary(vocab.size());
  double stop = 0.0;
  double total = 0.0;
  for (const auto& e : vec.entries()) {
    total += e.weight;
    if (stoplist.contains(vocab.term(e.term))) stop += e.weight;
  }
  return total > 0.0 ? stop / total : 0.0;
}

std::set<std::string> LoadStoplist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stoplist " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.insert(line);
  }
  return out;
}

void WriteTopTermsTsv(const std::filesystem::path& path,
                      std::span<const NamedSparseVector> vectors,
                      const Vocabulary& vocab, std::size_t k) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "doc_id\trank\tterm\tweight\n";
  char weight[64];
  for (const auto& v : vectors) {
    const auto top = TopTerms(v.vector, vocab, k);
    for (std::size_t i = 0; i < top.size(); ++i) {
      std::snprintf(weight, sizeof(weight), "%.6f", top[i].second);
      out << v.id << '\t' << (i + 1) << '\t' << top[i].first << '\t' << weight
          << '\n';
    }
  }
}

}  // namespace mmlsr
