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
#include "mmlsr/sparse_vector.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "mmlsr/error.h"

namespace mmlsr {

using nlohmann::json;

namespace {

void CheckWeight(const SparseEntry& e) {
  if (!std::isfinite(e.weight) || e.weight < 0.0) {
    throw ContractViolation("sparse vector: invalid weight " +
                            std::to_string(e.weight) + " for term " +
                            std::to_string(e.term));
  }
}

// Merges two sorted entry lists, combining weights of shared terms.
template <typename Combine>
SparseVector Merge(const SparseVector& a, const SparseVector& b,
                   Combine combine) {
  auto x = a.entries();
  auto y = b.entries();
  std::vector<SparseEntry> out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].term == y[j].term) {
      out.push_back({x[i].term, combine(x[i].weight, y[j].weight)});
      ++i;
      ++j;
    } else if (x[i].term < y[j].term) {
      out.push_back(x[i++]);
    } else {
      out.push_back(y[j++]);
    }
  }
  out.insert(out.end(), x.begin() + i, x.end());
  out.insert(out.end(), y.begin() + j, y.end());
  return SparseVector(std::move(out));
}

}  // namespace

SparseVector::SparseVector(std::vector<SparseEntry> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    CheckWeight(entries_[i]);
    if (entries_[i].weight == 0.0) {
      throw ContractViolation("sparse vector: zero weight stored for term " +
                              std::to_string(entries_[i].term));
    }
    if (i > 0 && entries_[i - 1].term >= entries_[i].term) {
      throw ContractViolation(
          "sparse vector: term ids not strictly increasing at position " +
          std::to_string(i));
    }
  }
}

SparseVector SparseVector::FromUnsorted(std::vector<SparseEntry> entries) {
  for (const auto& e : entries) CheckWeight(e);
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SparseEntry& a, const SparseEntry& b) {
                     return a.term < b.term;
                   });
  std::vector<SparseEntry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (!out.empty() && out.back().term == e.term) {
      out.back().weight += e.weight;
    } else {
      out.push_back(e);
    }
  }
  std::erase_if(out, [](const SparseEntry& e) { return e.weight == 0.0; });
  return SparseVector(std::move(out));
}

double SparseVector::weight(TermId term) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), term,
      [](const SparseEntry& e, TermId t) { return e.term < t; });
  if (it != entries_.end() && it->term == term) return it->weight;
  return 0.0;
}

double SparseVector::total_weight() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.weight;
  return s;
}

void SparseVector::CheckVocabulary(std::size_t vocab_size) const {
  if (!entries_.empty() && entries_.back().term >= vocab_size) {
    throw ContractViolation("sparse vector: term id " +
                            std::to_string(entries_.back().term) +
                            " outside vocabulary of size " +
                            std::to_string(vocab_size));
  }
}

double dot(const SparseVector& a, const SparseVector& b) {
  auto x = a.entries();
  auto y = b.entries();
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].term == y[j].term) {
      sum += x[i].weight * y[j].weight;
      ++i;
      ++j;
    } else if (x[i].term < y[j].term) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

SparseVector add(const SparseVector& a, const SparseVector& b) {
  return Merge(a, b, [](double u, double v) { return u + v; });
}

SparseVector elementwise_max(const SparseVector& a, const SparseVector& b) {
  return Merge(a, b, [](double u, double v) { return std::max(u, v); });
}

std::string ToJsonLine(const NamedSparseVector& record) {
  json pairs = json::array();
  for (const auto& e : record.vector.entries()) {
    pairs.push_back(json::array({e.term, e.weight}));
  }
  json j;
  j["id"] = record.id;
  j["vector"] = std::move(pairs);
  return j.dump();
}

NamedSparseVector ParseSparseVectorLine(const std::string& line,
                                        const std::string& source,
                                        std::size_t line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_number, e.what());
  }
  try {
    NamedSparseVector out;
    out.id = j.at("id").get<std::string>();
    if (out.id.empty()) throw ParseError(source, line_number, "empty id");
    std::vector<SparseEntry> entries;
    for (const auto& pair : j.at("vector")) {
      if (!pair.is_array() || pair.size() != 2 ||
          !pair[0].is_number_unsigned() || !pair[1].is_number()) {
        throw ParseError(source, line_number,
                         "vector entries must be [term_id, weight] pairs");
      }
      entries.push_back(
          {pair[0].get<TermId>(), pair[1].get<double>()});
    }
    out.vector = SparseVector(std::move(entries));
    return out;
  } catch (const json::exception& e) {
    throw ParseError(source, line_number, e.what());
  } catch (const ContractViolation& e) {
    throw ParseError(source, line_number, e.what());
  }
}

std::vector<NamedSparseVector> ReadSparseVectors(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vector file " + path.string());
  std::vector<NamedSparseVector> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(ParseSparseVectorLine(line, path.string(), n));
  }
  return out;
}

void WriteSparseVectors(const std::filesystem::path& path,
                        std::span<const NamedSparseVector> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vector file " + path.string());
  for (const auto& r : records) out << ToJsonLine(r) << '\n';
}

}  // namespace mmlsr
