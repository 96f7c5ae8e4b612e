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
#include "mmlsr/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mmlsr/error.h"

namespace mmlsr {

void Qrels::Add(const std::string& query_id, const std::string& doc_id,
                int grade) {
  if (grade < 0) {
    throw DataError("qrels: negative grade for (" + query_id + ", " + doc_id + ")");
  }
  auto [it, inserted] = judgments_[query_id].emplace(doc_id, grade);
  if (!inserted) {
    throw DataError("qrels: duplicate judgment for (" + query_id + ", " +
                    doc_id + ")");
  }
}

Qrels Qrels::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open qrels file " + path.string());
  Qrels q;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::istringstream fields(line);
    std::string qid, iter, doc, grade_text, extra;
    if (!(fields >> qid)) continue;
    if (!(fields >> iter >> doc >> grade_text) || (fields >> extra)) {
      throw ParseError(path.string(), n, "expected 'query_id 0 doc_id grade'");
    }
    int grade = 0;
    std::size_t used = 0;
    try {
      grade = std::stoi(grade_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != grade_text.size()) {
      throw ParseError(path.string(), n, "grade '" + grade_text + "' is not an integer");
    }
    try {
      q.Add(qid, doc, grade);
    } catch (const DataError& e) {
      throw ParseError(path.string(), n, e.what());
    }
  }
  return q;
}

void Qrels::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write qrels file " + path.string());
  for (const auto& [qid, docs] : judgments_) {
    for (const auto& [doc, grade] : docs) {
      out << qid << " 0 " << doc << ' ' << grade << '\n';
    }
  }
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
  auto q = judgments_.find(query_id);
  if (q == judgments_.end()) return 0;
  auto d = q->second.find(doc_id);
  return d == q->second.end() ? 0 : d->second;
}

const std::map<std::string, int>& Qrels::judged(
    const std::string& query_id) const {
  static const std::map<std::string, int> kEmpty;
  auto q = judgments_.find(query_id);
  return q == judgments_.end() ? kEmpty : q->second;
}

std::size_t Qrels::relevant_count(const std::string& query_id) const {
  std::size_t r = 0;
  for (const auto& [doc, grade] : judged(query_id)) r += grade > 0;
  return r;
}

namespace {

void CheckK(std::size_t k) {
  if (k == 0) throw ContractViolation("metric cutoff k must be >= 1");
}

}  // namespace

double NdcgAtK(const RankedList& ranked, const Qrels& qrels, std::size_t k) {
  CheckK(k);
  std::vector<int> ideal;
  for (const auto& [doc, grade] : qrels.judged(ranked.query_id)) {
    if (grade > 0) ideal.push_back(grade);
  }
  if (ideal.empty()) return 0.0;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
    idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
  }
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranked.hits.size()); ++i) {
    const int g = qrels.grade(ranked.query_id, ranked.hits[i].doc_id);
    if (g > 0) dcg += g / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg / idcg;
}

double MapAtK(const RankedList& ranked, const Qrels& qrels, std::size_t k) {
  CheckK(k);
  const std::size_t r = qrels.relevant_count(ranked.query_id);
  if (r == 0) return 0.0;
  double sum = 0.0;
  std::size_t found = 0;
  for (std::size_t i = 0; i < std::min(k, ranked.hits.size()); ++i) {
    if (qrels.grade(ranked.query_id, ranked.hits[i].doc_id) > 0) {
      ++found;
      sum += static_cast<double>(found) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(r);
}

double RecallAtK(const RankedList& ranked, const Qrels& qrels, std::size_t k) {
  CheckK(k);
  const std::size_t r = qrels.relevant_count(ranked.query_id);
  if (r == 0) return 0.0;
  std::size_t found = 0;
  for (std::size_t i = 0; i < std::min(k, ranked.hits.size()); ++i) {
    found += qrels.grade(ranked.query_id, ranked.hits[i].doc_id) > 0;
  }
  return static_cast<double>(found) / static_cast<double>(r);
}

Cutoffs Cutoffs::Uniform(std::vector<std::size_t> ks) {
  return Cutoffs{ks, ks, ks};
}

std::optional<double> MetricReport::Mean(const std::string& column) const {
  auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) return std::nullopt;
  return mean[static_cast<std::size_t>(it - columns.begin())];
}

std::string MetricReport::ToJson() const {
  using ojson = nlohmann::ordered_json;
  ojson j;
  j["columns"] = columns;
  ojson m = ojson::object();
  ojson pct = ojson::object();
  for (std::size_t c = 0; c < columns.size(); ++c) {
    m[columns[c]] = mean[c];
    pct[columns[c]] = std::round(mean[c] * 100.0 * 100.0) / 100.0;
  }
  j["mean"] = std::move(m);
  j["mean_percent"] = std::move(pct);
  j["evaluated_queries"] = per_query.size();
  j["skipped_queries"] = skipped_queries.size();
  j["skipped_query_ids"] = skipped_queries;
  j["no_relevant_query_ids"] = no_relevant_queries;
  ojson per = ojson::object();
  for (const auto& [qid, values] : per_query) {
    ojson row = ojson::object();
    for (std::size_t c = 0; c < columns.size(); ++c) row[columns[c]] = values[c];
    per[qid] = std::move(row);
  }
  j["per_query"] = std::move(per);
  return j.dump(2) + "\n";
}

std::string MetricReport::ToTable() const {
  std::string out = "metric\tfraction\tpercent\n";
  char buf[128];
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::snprintf(buf, sizeof(buf), "%s\t%.4f\t%.2f\n", columns[c].c_str(),
                  mean[c], mean[c] * 100.0);
    out += buf;
  }
  return out;
}

MetricReport EvaluateRun(std::span<const RankedList> run, const Qrels& qrels,
                         const Cutoffs& cutoffs) {
  MetricReport report;
  for (auto k : cutoffs.ndcg) report.columns.push_back("NDCG@" + std::to_string(k));
  for (auto k : cutoffs.map) report.columns.push_back("MAP@" + std::to_string(k));
  for (auto k : cutoffs.recall) report.columns.push_back("R@" + std::to_string(k));
  report.mean.assign(report.columns.size(), 0.0);

  std::set<std::string> seen;
  for (const auto& ranked : run) {
    if (!seen.insert(ranked.query_id).second) {
      throw DataError("run: query '" + ranked.query_id + "' appears twice");
    }
    if (!qrels.has_query(ranked.query_id)) {
      report.skipped_queries.push_back(ranked.query_id);
      continue;
    }
    if (qrels.relevant_count(ranked.query_id) == 0) {
      report.no_relevant_queries.push_back(ranked.query_id);
      continue;
    }
    std::vector<double> values;
    for (auto k : cutoffs.ndcg) values.push_back(NdcgAtK(ranked, qrels, k));
    for (auto k : cutoffs.map) values.push_back(MapAtK(ranked, qrels, k));
    for (auto k : cutoffs.recall) values.push_back(RecallAtK(ranked, qrels, k));
    report.per_query.emplace(ranked.query_id, std::move(values));
  }
  if (!report.per_query.empty()) {
    for (const auto& [qid, values] : report.per_query) {
      for (std::size_t c = 0; c < values.size(); ++c) report.mean[c] += values[c];
    }
    for (auto& m : report.mean) m /= static_cast<double>(report.per_query.size());
  }
  return report;
}

void WriteRun(const std::filesystem::path& path,
              std::span<const RankedList> run, const std::string& tag) {
  std::vector<const RankedList*> sorted;
  for (const auto& r : run) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const RankedList* a, const RankedList* b) {
              return a->query_id < b->query_id;
            });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write run file " + path.string());
  char score[64];
  for (const auto* r : sorted) {
    for (std::size_t i = 0; i < r->hits.size(); ++i) {
      std::snprintf(score, sizeof(score), "%.6f", r->hits[i].score);
      out << r->query_id << " Q0 " << r->hits[i].doc_id << ' ' << (i + 1) << ' '
          << score << ' ' << tag << '\n';
    }
  }
}

Run ReadRun(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open run file " + path.string());
  const std::string source = path.string();
  struct Row {
    std::size_t rank;
    Hit hit;
  };
  std::map<std::string, std::vector<Row>> rows;
  Run run;
  bool have_tag = false;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::istringstream fields(line);
    std::string qid, q0, doc, rank_text, score_text, tag, extra;
    if (!(fields >> qid)) continue;
    if (!(fields >> q0 >> doc >> rank_text >> score_text >> tag) ||
        (fields >> extra)) {
      throw ParseError(source, n, "expected 'query_id Q0 doc_id rank score tag'");
    }
    std::size_t rank = 0;
    double score = 0.0;
    try {
      std::size_t used = 0;
      rank = std::stoul(rank_text, &used);
      if (used != rank_text.size() || rank == 0) throw std::invalid_argument("rank");
      score = std::stod(score_text, &used);
      if (used != score_text.size()) throw std::invalid_argument("score");
    } catch (const std::exception&) {
      throw ParseError(source, n, "bad rank or score");
    }
    if (!have_tag) {
      run.tag = tag;
      have_tag = true;
    }
    rows[qid].push_back({rank, {doc, score}});
  }
  for (auto& [qid, list] : rows) {
    std::sort(list.begin(), list.end(),
              [](const Row& a, const Row& b) { return a.rank < b.rank; });
    RankedList ranked{qid, {}};
    std::set<std::string> docs;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i > 0 && list[i].rank == list[i - 1].rank) {
        throw DataError(source + ": query '" + qid + "' repeats rank " +
                        std::to_string(list[i].rank));
      }
      if (!docs.insert(list[i].hit.doc_id).second) {
        throw DataError(source + ": query '" + qid + "' lists document '" +
                        list[i].hit.doc_id + "' twice");
      }
      ranked.hits.push_back(std::move(list[i].hit));
    }
    run.lists.push_back(std::move(ranked));
  }
  return run;
}

}  // namespace mmlsr
