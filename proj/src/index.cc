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
#include "mmlsr/index.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <queue>
#include <unordered_set>

#include <json.hpp>

#include "mmlsr/error.h"

namespace mmlsr {

using nlohmann::json;

InvertedIndex InvertedIndex::Build(std::span<const NamedSparseVector> docs,
                                   std::size_t vocab_size) {
  if (docs.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ContractViolation("index: too many documents for 32-bit ordinals");
  }
  InvertedIndex index;
  index.postings_.resize(vocab_size);
  index.doc_ids_.reserve(docs.size());
  std::unordered_set<std::string> seen;
  for (std::size_t ord = 0; ord < docs.size(); ++ord) {
    const auto& d = docs[ord];
    if (d.id.empty()) {
      throw DataError("index: empty document id at position " + std::to_string(ord));
    }
    if (!seen.insert(d.id).second) {
      throw DataError("index: duplicate document id '" + d.id + "'");
    }
    d.vector.CheckVocabulary(vocab_size);
    index.doc_ids_.push_back(d.id);
    for (const auto& e : d.vector.entries()) {
      index.postings_[e.term].push_back({static_cast<std::uint32_t>(ord), e.weight});
    }
  }
  return index;
}

namespace {

struct Candidate {
  std::uint32_t doc;
  double score;
};

}  // namespace

RankedList InvertedIndex::Search(const SparseVector& query, std::size_t k,
                                 std::string query_id) const {
  if (k == 0) throw ContractViolation("search: k must be >= 1");
  RankedList out{std::move(query_id), {}};

  struct Cursor {
    std::span<const Posting> list;
    double query_weight;
    std::size_t pos = 0;
  };
  std::vector<Cursor> cursors;
  for (const auto& e : query.entries()) {
    if (e.term >= postings_.size()) continue;
    const auto& list = postings_[e.term];
    if (!list.empty()) cursors.push_back({list, e.weight});
  }
  if (cursors.empty()) return out;

  auto ranks_before = [this](const Candidate& a, const Candidate& b) {
    return a.score != b.score ? a.score > b.score
                              : doc_ids_[a.doc] < doc_ids_[b.doc];
  };
  // Top of the heap is the weakest of the current top-k.
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(ranks_before)>
      heap(ranks_before);

  constexpr auto kDone = std::numeric_limits<std::uint32_t>::max();
  while (true) {
    std::uint32_t doc = kDone;
    for (const auto& c : cursors) {
      if (c.pos < c.list.size()) doc = std::min(doc, c.list[c.pos].doc);
    }
    if (doc == kDone) break;
    // Cursors are in ascending term order, matching dot()'s summation order.
    double score = 0.0;
    for (auto& c : cursors) {
      if (c.pos < c.list.size() && c.list[c.pos].doc == doc) {
        score += c.query_weight * c.list[c.pos].impact;
        ++c.pos;
      }
    }
    const Candidate cand{doc, score};
    if (heap.size() < k) {
      heap.push(cand);
    } else if (ranks_before(cand, heap.top())) {
      heap.pop();
      heap.push(cand);
    }
  }

  out.hits.resize(heap.size());
  for (std::size_t i = heap.size(); i > 0; --i) {
    out.hits[i - 1] = {doc_ids_[heap.top().doc], heap.top().score};
    heap.pop();
  }
  return out;
}

IndexStats InvertedIndex::Stats() const {
  IndexStats s;
  s.doc_count = doc_count();
  s.vocab_size = vocab_size();
  for (const auto& list : postings_) {
    if (list.empty()) continue;
    ++s.terms_used;
    s.total_postings += list.size();
    s.max_posting_length = std::max(s.max_posting_length, list.size());
  }
  if (s.terms_used > 0) {
    s.mean_posting_length = static_cast<double>(s.total_postings) /
                            static_cast<double>(s.terms_used);
  }
  return s;
}

std::size_t InvertedIndex::PostingsForQuery(const SparseVector& query) const {
  std::size_t n = 0;
  for (const auto& e : query.entries()) {
    if (e.term < postings_.size()) n += postings_[e.term].size();
  }
  return n;
}

std::vector<NamedSparseVector> InvertedIndex::Reconstruct() const {
  std::vector<std::vector<SparseEntry>> entries(doc_ids_.size());
  for (std::size_t t = 0; t < postings_.size(); ++t) {
    for (const auto& p : postings_[t]) {
      entries[p.doc].push_back({static_cast<TermId>(t), p.impact});
    }
  }
  std::vector<NamedSparseVector> out;
  out.reserve(doc_ids_.size());
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
    out.push_back({doc_ids_[i], SparseVector(std::move(entries[i]))});
  }
  return out;
}

namespace {

template <typename T>
void PutLittleEndian(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename T>
T GetLittleEndian(std::istream& in, const std::string& source) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw DataError(source + ": truncated postings file");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void InvertedIndex::Save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw DataError("cannot write index manifest in " + dir.string());
    out << json{{"doc_count", doc_count()}, {"vocab_size", vocab_size()}}.dump()
        << '\n';
  }
  {
    std::ofstream out(dir / "doc_table.tsv", std::ios::binary);
    if (!out) throw DataError("cannot write doc table in " + dir.string());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
      out << i << '\t' << doc_ids_[i] << '\n';
    }
  }
  std::ofstream out(dir / "postings.bin", std::ios::binary);
  if (!out) throw DataError("cannot write postings in " + dir.string());
  for (const auto& list : postings_) {
    PutLittleEndian<std::uint32_t>(out, static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) {
      PutLittleEndian<std::uint32_t>(out, p.doc);
      PutLittleEndian<double>(out, p.impact);
    }
  }
}

InvertedIndex InvertedIndex::Load(const std::filesystem::path& dir) {
  InvertedIndex index;
  std::size_t doc_count = 0;
  std::size_t vocab_size = 0;
  {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw DataError("cannot open index manifest in " + dir.string());
    try {
      const json j = json::parse(in);
      doc_count = j.at("doc_count").get<std::size_t>();
      vocab_size = j.at("vocab_size").get<std::size_t>();
    } catch (const json::exception& e) {
      throw DataError((dir / "manifest.json").string() + ": " + e.what());
    }
  }
  {
    const std::string source = (dir / "doc_table.tsv").string();
    std::ifstream in(dir / "doc_table.tsv");
    if (!in) throw DataError("cannot open " + source);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      const auto tab = line.find('\t');
      if (tab == std::string::npos ||
          line.substr(0, tab) != std::to_string(index.doc_ids_.size())) {
        throw ParseError(source, n, "expected '<ordinal>\\t<doc_id>' in order");
      }
      index.doc_ids_.push_back(line.substr(tab + 1));
    }
    if (index.doc_ids_.size() != doc_count) {
      throw DataError(source + ": " + std::to_string(index.doc_ids_.size()) +
                      " rows, manifest says " + std::to_string(doc_count));
    }
  }
  const std::string source = (dir / "postings.bin").string();
  std::ifstream in(dir / "postings.bin", std::ios::binary);
  if (!in) throw DataError("cannot open " + source);
  index.postings_.resize(vocab_size);
  for (auto& list : index.postings_) {
    const auto len = GetLittleEndian<std::uint32_t>(in, source);
    if (len > doc_count) throw DataError(source + ": posting list too long");
    list.resize(len);
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto& p = list[i];
      p.doc = GetLittleEndian<std::uint32_t>(in, source);
      p.impact = GetLittleEndian<double>(in, source);
      if (p.doc >= doc_count || !(p.impact > 0.0) ||
          (i > 0 && list[i - 1].doc >= p.doc)) {
        throw DataError(source + ": corrupt posting");
      }
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError(source + ": trailing bytes after the last posting list");
  }
  return index;
}

RankedList BruteForceSearch(std::span<const NamedSparseVector> docs,
                            const SparseVector& query, std::size_t k,
                            std::string query_id) {
  if (k == 0) throw ContractViolation("search: k must be >= 1");
  std::vector<Hit> hits;
  for (const auto& d : docs) {
    bool overlap = false;
    for (const auto& e : query.entries()) {
      if (d.vector.weight(e.term) > 0.0) {
        overlap = true;
        break;
      }
    }
    if (overlap) hits.push_back({d.id, dot(query, d.vector)});
  }
  std::sort(hits.begin(), hits.end(), RanksBefore);
  if (hits.size() > k) hits.resize(k);
  return {std::move(query_id), std::move(hits)};
}

}  // namespace mmlsr
