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
#include "cli.h"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmlsr/diagnostics.h"
#include "mmlsr/encoders.h"
#include "mmlsr/error.h"
#include "mmlsr/eval.h"
#include "mmlsr/index.h"
#include "mmlsr/ingest.h"
#include "mmlsr/params_io.h"
#include "mmlsr/synthetic.h"
#include "mmlsr/training.h"

namespace mmlsr::cli {

namespace {

namespace fs = std::filesystem;

// Embedding sources shared by encode and train.
struct ProviderOptions {
  std::size_t dim = 16;
  std::uint64_t seed = 0;
  std::string token_embeddings;
  std::string image_embeddings;

  void Register(CLI::App* cmd) {
    cmd->add_option("--dim", dim, "Toy embedding dimension")->capture_default_str();
    cmd->add_option("--seed", seed, "Seed for toy embeddings and training")
        ->capture_default_str();
    cmd->add_option("--token-embeddings", token_embeddings,
                    "Token-level embedding file (replaces the toy provider)");
    cmd->add_option("--image-embeddings", image_embeddings,
                    "Item-level image embedding file");
  }
};

struct LoadedProviders {
  std::unique_ptr<EmbeddingProvider> text;
  std::unique_ptr<EmbeddingProvider> image;

  Providers view() const { return {text.get(), image.get()}; }
  std::size_t text_dim() const { return text->dimension(); }
  std::size_t image_dim() const { return image ? image->dimension() : 0; }
};

LoadedProviders LoadProviders(const ProviderOptions& o, const EncoderConfig& config) {
  LoadedProviders p;
  if (o.token_embeddings.empty()) {
    p.text = std::make_unique<ToyEmbeddingProvider>(o.dim, o.seed);
  } else {
    p.text = std::make_unique<TableEmbeddingProvider>(
        TableEmbeddingProvider::Load(o.token_embeddings));
  }
  if (!o.image_embeddings.empty()) {
    p.image = std::make_unique<TableEmbeddingProvider>(
        TableEmbeddingProvider::Load(o.image_embeddings));
  } else if (config.uses_image()) {
    throw DataError(std::string(ToString(config.variant)) +
                    " needs --image-embeddings");
  }
  return p;
}

std::vector<std::size_t> ParseCutoffs(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    unsigned long k = 0;
    try {
      k = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || k == 0) {
      throw DataError("bad cutoff '" + item + "' in --cutoffs");
    }
    ks.push_back(k);
  }
  if (ks.empty()) throw DataError("--cutoffs is empty");
  return ks;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

struct EncodeOptions {
  std::string config, params, vocab, corpus, queries, out;
  ProviderOptions providers;
};

void CmdEncode(const EncodeOptions& o) {
  const auto config = ReadEncoderConfig(o.config);
  const auto params = ReadModelParams(o.params);
  const auto vocab = Vocabulary::Load(o.vocab);
  ValidateParams(config, params, vocab.size());
  const auto providers = LoadProviders(o.providers, config);

  std::vector<NamedSparseVector> out;
  if (!o.queries.empty()) {
    std::size_t empty_texts = 0;
    for (const auto& q : LoadQueries(o.queries)) {
      const std::string text = BuildQueryText(q);
      empty_texts += text.empty();
      const auto feats = PrepareQuery(q.id, text, config, vocab, providers.view());
      out.push_back({q.id, EncodeQuery(feats, config, params)});
    }
    if (empty_texts > 0) {
      std::cerr << "mmlsr encode: warning: " << empty_texts
                << " queries have no usable text fields\n";
    }
  } else {
    for (const auto& d : LoadCorpus(o.corpus)) {
      const auto feats = PrepareDocument(d, config, vocab, providers.view());
      out.push_back({d.id, EncodeDocument(feats, config, params)});
    }
  }
  WriteSparseVectors(o.out, out);
}

struct TrainOptions {
  std::string config, vocab, pairs, queries, corpus, training_config, params,
      out, loss_log;
  ProviderOptions providers;
};

void CmdTrain(const TrainOptions& o) {
  const auto encoder = ReadEncoderConfig(o.config);
  const auto vocab = Vocabulary::Load(o.vocab);
  auto training = o.training_config.empty() ? TrainingConfig{}
                                            : ReadTrainingConfig(o.training_config);
  training.seed = o.providers.seed;
  const auto providers = LoadProviders(o.providers, encoder);
  ModelParams initial =
      o.params.empty()
          ? InitParams(encoder, vocab.size(), providers.text_dim(),
                       providers.image_dim(), o.providers.seed)
          : ReadModelParams(o.params);
  const auto pairs = LoadTrainingPairs(o.pairs);
  const auto queries = LoadQueries(o.queries);
  const auto corpus = LoadCorpus(o.corpus);

  const auto result = Train(pairs, queries, corpus, training, encoder, vocab,
                            providers.view(), std::move(initial));
  WriteModelParams(o.out, result.params);
  nlohmann::ordered_json manifest;
  manifest["epoch"] = training.epochs;
  manifest["seed"] = training.seed;
  WriteText(o.out + ".manifest.json", manifest.dump() + "\n");
  if (!o.loss_log.empty()) WriteLossLog(o.loss_log, result.steps);
  for (const auto& e : result.epochs) {
    std::cerr << "epoch " << e.epoch << " mean infonce " << e.mean_infonce
              << " mean total " << e.mean_total << '\n';
  }
}

struct IndexOptions {
  std::string vectors, vocab, out;
  std::size_t vocab_size = 0;
};

void CmdIndex(const IndexOptions& o) {
  std::size_t vocab_size = o.vocab_size;
  if (!o.vocab.empty()) vocab_size = Vocabulary::Load(o.vocab).size();
  if (vocab_size == 0) throw DataError("index needs --vocab or --vocab-size");
  const auto docs = ReadSparseVectors(o.vectors);
  InvertedIndex::Build(docs, vocab_size).Save(o.out);
}

struct SearchOptions {
  std::string index, queries, tag = "mmlsr", out;
  std::size_t k = 1000;
};

void CmdSearch(const SearchOptions& o) {
  if (o.k == 0) throw DataError("--k must be >= 1");
  const auto index = InvertedIndex::Load(o.index);
  std::vector<RankedList> run;
  for (const auto& q : ReadSparseVectors(o.queries)) {
    q.vector.CheckVocabulary(index.vocab_size());
    run.push_back(index.Search(q.vector, o.k, q.id));
  }
  WriteRun(o.out, run, o.tag);
}

struct EvalOptions {
  std::string run, qrels, cutoffs, out;
};

void CmdEval(const EvalOptions& o) {
  const auto run = ReadRun(o.run);
  const auto qrels = Qrels::Load(o.qrels);
  const Cutoffs cutoffs =
      o.cutoffs.empty() ? Cutoffs{} : Cutoffs::Uniform(ParseCutoffs(o.cutoffs));
  const auto report = EvaluateRun(run.lists, qrels, cutoffs);
  if (!o.out.empty()) WriteText(o.out, report.ToJson());
  std::cout << report.ToTable();
}

struct DiagnoseOptions {
  std::string vectors, vocab, stoplist, out, dump;
  std::size_t k = 10;
};

void CmdDiagnose(const DiagnoseOptions& o) {
  const auto vocab = Vocabulary::Load(o.vocab);
  const auto named = ReadSparseVectors(o.vectors);
  std::vector<SparseVector> vectors;
  for (const auto& n : named) vectors.push_back(n.vector);
  const auto report = ComputeCoActivation(vectors, vocab.size());

  auto j = nlohmann::ordered_json::parse(report.ToJson());
  if (!o.stoplist.empty()) {
    const auto stoplist = LoadStoplist(o.stoplist);
    double sum = 0.0;
    for (const auto& v : vectors) sum += StopwordMass(v, vocab, stoplist);
    j["mean_stopword_mass"] =
        vectors.empty() ? 0.0 : sum / static_cast<double>(vectors.size());
  }
  WriteText(o.out, j.dump(2) + "\n");
  if (!o.dump.empty()) WriteTopTermsTsv(o.dump, named, vocab, o.k);
}

struct SynthOptions {
  std::string out;
  SyntheticOptions options;
};

}  // namespace

int Run(int argc, char** argv) {
  CLI::App app{"Multimodal learned sparse retrieval toolkit"};
  app.require_subcommand(1);

  EncodeOptions enc;
  auto* encode = app.add_subcommand("encode", "Encode documents or queries into sparse vectors");
  encode->add_option("--config", enc.config, "Encoder config JSON")->required();
  encode->add_option("--params", enc.params, "Parameter file")->required();
  encode->add_option("--vocab", enc.vocab, "Vocabulary file")->required();
  auto* corpus_opt = encode->add_option("--corpus", enc.corpus, "Corpus JSONL");
  auto* queries_opt = encode->add_option("--queries", enc.queries, "Queries JSONL");
  corpus_opt->excludes(queries_opt);
  encode->add_option("--out", enc.out, "Output vector JSONL")->required();
  enc.providers.Register(encode);

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train head parameters with InfoNCE");
  train->add_option("--config", tr.config, "Encoder config JSON")->required();
  train->add_option("--vocab", tr.vocab, "Vocabulary file")->required();
  train->add_option("--pairs", tr.pairs, "Training pairs TSV")->required();
  train->add_option("--queries", tr.queries, "Queries JSONL")->required();
  train->add_option("--corpus", tr.corpus, "Corpus JSONL")->required();
  train->add_option("--training-config", tr.training_config, "Training config JSON");
  train->add_option("--params", tr.params, "Initial parameters (default: seeded init)");
  train->add_option("--out", tr.out, "Output checkpoint parameter file")->required();
  train->add_option("--loss-log", tr.loss_log, "Loss log CSV");
  tr.providers.Register(train);

  IndexOptions ix;
  auto* index = app.add_subcommand("index", "Build an inverted index");
  index->add_option("--vectors", ix.vectors, "Document vector JSONL")->required();
  index->add_option("--vocab", ix.vocab, "Vocabulary file");
  index->add_option("--vocab-size", ix.vocab_size, "Vocabulary size");
  index->add_option("--out", ix.out, "Output index directory")->required();

  SearchOptions se;
  auto* search = app.add_subcommand("search", "Retrieve top-k documents into a TREC run");
  search->add_option("--index", se.index, "Index directory")->required();
  search->add_option("--queries", se.queries, "Query vector JSONL")->required();
  search->add_option("--k", se.k, "Hits per query")->capture_default_str();
  search->add_option("--tag", se.tag, "Run tag")->capture_default_str();
  search->add_option("--out", se.out, "Output run file")->required();

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "Evaluate a run against qrels");
  eval->add_option("--run", ev.run, "TREC run file")->required();
  eval->add_option("--qrels", ev.qrels, "Qrels file")->required();
  eval->add_option("--cutoffs", ev.cutoffs,
                   "Comma-separated cutoffs for every metric "
                   "(default NDCG/MAP 5,10,100,500,1000; R 20,100,500,1000)");
  eval->add_option("--out", ev.out, "Output report JSON");

  DiagnoseOptions di;
  auto* diagnose = app.add_subcommand("diagnose", "Co-activation and top-term diagnostics");
  diagnose->add_option("--vectors", di.vectors, "Vector JSONL")->required();
  diagnose->add_option("--vocab", di.vocab, "Vocabulary file")->required();
  diagnose->add_option("--stoplist", di.stoplist, "Stoplist file");
  diagnose->add_option("--k", di.k, "Top terms per vector")->capture_default_str();
  diagnose->add_option("--out", di.out, "Output report JSON")->required();
  diagnose->add_option("--dump", di.dump, "Top-terms TSV");

  SynthOptions sy;
  auto* synth = app.add_subcommand("synth", "Write a synthetic image/text fixture");
  synth->add_option("--out", sy.out, "Output directory")->required();
  synth->add_option("--seed", sy.options.seed)->capture_default_str();
  synth->add_option("--pairs", sy.options.pairs)->capture_default_str();
  synth->add_option("--held-out", sy.options.held_out)->capture_default_str();
  synth->add_option("--dim", sy.options.dim)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const CLI::App* chosen = app.get_subcommands().front();
  try {
    if (chosen == encode) {
      if (enc.corpus.empty() == enc.queries.empty()) {
        throw DataError("encode needs exactly one of --corpus or --queries");
      }
      CmdEncode(enc);
    } else if (chosen == train) {
      CmdTrain(tr);
    } else if (chosen == index) {
      CmdIndex(ix);
    } else if (chosen == search) {
      CmdSearch(se);
    } else if (chosen == eval) {
      CmdEval(ev);
    } else if (chosen == diagnose) {
      CmdDiagnose(di);
    } else if (chosen == synth) {
      WriteSyntheticCorpus(MakeSyntheticCorpus(sy.options), sy.out);
    }
  } catch (const std::exception& e) {
    std::cerr << "mmlsr " << chosen->get_name() << ": error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mmlsr::cli
