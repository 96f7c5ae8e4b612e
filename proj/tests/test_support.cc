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
#include "test_support.h"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "cli.h"
#include "mmlsr/eval.h"
#include "mmlsr/ingest.h"

namespace mmlsr::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto candidate = base / ("mmlsr-test-" + std::to_string(::getpid()) + "-" +
                             std::to_string(counter++));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

SparseVector Sv(std::vector<SparseEntry> entries) {
  return SparseVector(std::move(entries));
}

std::vector<NamedSparseVector> RandomSparseCorpus(Rng& rng, std::size_t count,
                                                  std::size_t vocab_size,
                                                  std::size_t max_terms,
                                                  const std::string& prefix) {
  std::vector<NamedSparseVector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 1 + rng.below(max_terms);
    std::vector<SparseEntry> entries;
    for (std::size_t j = 0; j < n; ++j) {
      entries.push_back({static_cast<TermId>(rng.below(vocab_size)),
                         static_cast<double>(1 + rng.below(8)) / 4.0});
    }
    char id[32];
    std::snprintf(id, sizeof(id), "%s%05zu", prefix.c_str(), i);
    out.push_back({id, SparseVector::FromUnsorted(std::move(entries))});
  }
  return out;
}

std::vector<SparseVector> DenseCoActivationFixture() {
  std::vector<SparseVector> docs;
  for (int d = 0; d < 4; ++d) {
    docs.push_back(Sv({{0, 1.0 + d}, {1, 0.5}, {2, 2.0}, {3, 0.25 * (d + 1)}}));
  }
  return docs;
}

std::vector<SparseVector> SparseCoActivationFixture() {
  std::vector<SparseVector> docs;
  for (TermId d = 0; d < 4; ++d) {
    std::vector<SparseEntry> e;
    for (TermId t = 0; t < 4; ++t) e.push_back({4 * d + t, 1.0 + t});
    docs.push_back(Sv(std::move(e)));
  }
  return docs;
}

namespace {

DenseEmbedding RandomDense(Rng& rng, std::size_t dim) {
  DenseEmbedding h{std::vector<double>(dim)};
  for (auto& x : h.values) x = rng.uniform(-1.0, 1.0);
  return h;
}

MlmHeadParams RandomMlm(Rng& rng, std::size_t vocab_size, std::size_t dim) {
  MlmHeadParams p(vocab_size, dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  for (auto& x : p.E) x = rng.uniform(-bound, bound);
  for (auto& x : p.bias) x = rng.uniform(-0.3, 0.3);
  return p;
}

bool AwayFromKinks(const GradInstance& g, double margin) {
  for (const auto& q : g.batch.queries) {
    if (q.text) {
      for (const auto& h : q.text->embeddings) {
        if (std::abs(MlpScore(h, *g.params.mlp)) < margin) return false;
      }
    }
    if (q.pooled) {
      for (double s : MlmScores(*q.pooled, *g.params.query_mlm)) {
        if (std::abs(s) < margin) return false;
      }
    }
  }
  for (const auto& d : g.batch.docs) {
    if (d.caption) {
      for (const auto& h : d.caption->embeddings) {
        if (std::abs(MlpScore(h, *g.params.mlp)) < margin) return false;
      }
    }
    if (d.image) {
      for (double s : MlmScores(*d.image, *g.params.doc_mlm)) {
        if (std::abs(s) < margin) return false;
      }
    }
  }
  return true;
}

TextFeatures RandomText(Rng& rng, std::size_t vocab_size, std::size_t dim) {
  // Occurrences of one token share one embedding, as a real provider would
  // return.
  TextFeatures t;
  const std::size_t n = 1 + rng.below(4);
  for (std::size_t i = 0; i < n; ++i) {
    t.tokens.ids.push_back(static_cast<TermId>(rng.below(vocab_size)));
  }
  std::vector<std::optional<DenseEmbedding>> cache(vocab_size);
  for (TermId id : t.tokens.ids) {
    if (!cache[id]) cache[id] = RandomDense(rng, dim);
    t.embeddings.push_back(*cache[id]);
  }
  return t;
}

}  // namespace

GradInstance RandomGradInstance(Rng& rng, Variant variant, std::size_t dim,
                                std::size_t vocab_size, std::size_t batch_size,
                                double margin) {
  EncoderConfig config{variant, Fusion::kSum, std::nullopt};
  for (;;) {
    GradInstance g;
    if (config.query_head() == HeadKind::kMlp) {
      MlpHeadParams mlp{std::vector<double>(dim), rng.uniform(-0.3, 0.3)};
      const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
      for (auto& x : mlp.W) x = rng.uniform(-bound, bound);
      g.params.mlp = std::move(mlp);
    } else {
      g.params.query_mlm = RandomMlm(rng, vocab_size, dim);
    }
    if (config.uses_image()) g.params.doc_mlm = RandomMlm(rng, vocab_size, dim);

    for (std::size_t i = 0; i < batch_size; ++i) {
      QueryFeatures q;
      q.id = "q" + std::to_string(i);
      if (config.query_head() == HeadKind::kMlp) {
        q.text = RandomText(rng, vocab_size, dim);
      } else {
        q.pooled = RandomDense(rng, dim);
      }
      g.batch.queries.push_back(std::move(q));

      DocumentFeatures d;
      d.id = "d" + std::to_string(i);
      if (config.uses_caption()) d.caption = RandomText(rng, vocab_size, dim);
      if (config.uses_image()) d.image = RandomDense(rng, dim);
      g.batch.docs.push_back(std::move(d));
    }
    if (AwayFromKinks(g, margin)) return g;
  }
}

TrainingConfig ToyTrainingConfig() {
  TrainingConfig c;
  c.epochs = 5;
  c.batch_size = 32;
  c.learning_rate = 2.0;
  c.temperature = 1.0;
  c.seed = 13;
  c.flops_lambda = 0.0;
  return c;
}

ToyTrainingRun TrainOnSynthetic(const SyntheticCorpus& corpus,
                                const SyntheticOptions& options,
                                Variant variant, const TrainingConfig& config) {
  const EncoderConfig encoder{variant, Fusion::kSum, std::nullopt};
  const ToyEmbeddingProvider text(options.dim, options.seed);
  const Providers providers{&text, &corpus.images};
  const auto initial = InitParams(encoder, corpus.vocab.size(), options.dim,
                                  options.dim, config.seed);

  ToyTrainingRun run;
  run.training = Train(corpus.train_pairs, corpus.queries, corpus.corpus,
                       config, encoder, corpus.vocab, providers, initial);
  const auto& params = run.training.params;

  for (const auto& d : corpus.corpus) {
    const auto features = PrepareDocument(d, encoder, corpus.vocab, providers);
    run.docs.push_back({d.id, EncodeDocument(features, encoder, params)});
  }
  std::map<std::string, const QueryRecord*> by_id;
  for (const auto& q : corpus.queries) by_id[q.id] = &q;
  for (const auto& pair : corpus.held_out_pairs) {
    const auto& q = *by_id.at(pair.query_id);
    const auto features =
        PrepareQuery(q.id, BuildQueryText(q), encoder, corpus.vocab, providers);
    run.queries.push_back({q.id, EncodeQuery(features, encoder, params)});
  }

  const auto index = InvertedIndex::Build(run.docs, corpus.vocab.size());
  std::vector<RankedList> lists;
  for (const auto& q : run.queries) {
    lists.push_back(index.Search(q.vector, 10, q.id));
  }
  double total = 0.0;
  for (const auto& l : lists) total += RecallAtK(l, corpus.qrels, 10);
  run.held_out_recall_at_10 =
      lists.empty() ? 0.0 : total / static_cast<double>(lists.size());
  return run;
}

int RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "mmlsr");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::Run(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path PipelineFixture() {
  return std::filesystem::path(MMLSR_FIXTURE_DIR) / "pipeline";
}

std::vector<std::string> RunPipeline(const std::filesystem::path& out) {
  const auto fx = PipelineFixture();
  auto f = [&](const char* name) { return (fx / name).string(); };
  auto o = [&](const char* name) { return (out / name).string(); };
  const std::vector<std::string> providers = {
      "--dim", "16", "--seed", "13", "--image-embeddings", f("images.jsonl")};
  auto step = [&](const std::string& name, std::vector<std::string> args,
                  bool with_providers) {
    if (with_providers) args.insert(args.end(), providers.begin(), providers.end());
    if (RunCli(std::move(args)) != 0) {
      throw std::runtime_error("pipeline step failed: " + name);
    }
  };
  std::ostringstream progress;
  auto* saved_err = std::cerr.rdbuf(progress.rdbuf());
  try {
    step("train",
       {"train", "--config", f("m2.json"), "--vocab", f("vocab.txt"), "--pairs",
        f("train_pairs.tsv"), "--queries", f("queries.jsonl"), "--corpus",
        f("corpus.jsonl"), "--training-config", f("training.json"), "--out",
        o("params.jsonl"), "--loss-log", o("loss.csv")},
       true);
  } catch (...) {
    std::cerr.rdbuf(saved_err);
    throw;
  }
  std::cerr.rdbuf(saved_err);
  step("encode corpus",
       {"encode", "--config", f("m2.json"), "--params", o("params.jsonl"),
        "--vocab", f("vocab.txt"), "--corpus", f("corpus.jsonl"), "--out",
        o("docs.jsonl")},
       true);
  step("encode queries",
       {"encode", "--config", f("m2.json"), "--params", o("params.jsonl"),
        "--vocab", f("vocab.txt"), "--queries", f("queries.jsonl"), "--out",
        o("queries.jsonl")},
       true);
  step("index",
       {"index", "--vectors", o("docs.jsonl"), "--vocab", f("vocab.txt"), "--out",
        o("index")},
       false);
  step("search",
       {"search", "--index", o("index"), "--queries", o("queries.jsonl"), "--k",
        "100", "--out", o("run.txt")},
       false);

  std::ostringstream table;
  auto* saved = std::cout.rdbuf(table.rdbuf());
  try {
    step("eval",
         {"eval", "--run", o("run.txt"), "--qrels", f("qrels.txt"), "--out",
          o("report.json")},
         false);
  } catch (...) {
    std::cout.rdbuf(saved);
    throw;
  }
  std::cout.rdbuf(saved);
  WriteFile(out / "report.txt", table.str());
  return {"params.jsonl",        "params.jsonl.manifest.json",
          "loss.csv",            "docs.jsonl",
          "queries.jsonl",       "index/manifest.json",
          "index/doc_table.tsv", "index/postings.bin",
          "run.txt",             "report.json",
          "report.txt"};
}

}  // namespace mmlsr::testing
