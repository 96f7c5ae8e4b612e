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
#include <string>
#include <vector>

#include "mmlsr/embedding_provider.h"
#include "mmlsr/eval.h"
#include "mmlsr/ingest.h"
#include "mmlsr/training.h"
#include "mmlsr/vocabulary.h"

namespace mmlsr {

/// Desk-scale stand-in for an image/text collection.
///
/// Every pair draws a distinct combination of `topics_per_pair` topic words.
/// The query and the caption both mention those topic words (padded with
/// stopwords and filler), and the image embedding is the normalized sum of
/// the topic words' toy token embeddings plus uniform noise. The
/// combination is unique to the pair, so each query matches exactly its own
/// document. The last `held_out` pairs are kept out of the training pairs.
struct SyntheticOptions {
  std::size_t pairs = 256;
  std::size_t held_out = 64;
  std::size_t topics = 48;
  std::size_t topics_per_pair = 2;
  std::size_t dim = 16;
  double image_noise = 0.1;
  std::uint64_t seed = 13;
};

struct SyntheticCorpus {
  Vocabulary vocab;
  std::vector<std::string> stopwords;
  std::vector<QueryRecord> queries;
  std::vector<DocumentRecord> corpus;
  TableEmbeddingProvider images{1};
  std::vector<TrainingPair> train_pairs;
  std::vector<TrainingPair> held_out_pairs;
  Qrels qrels;
  /// Topic term ids of each pair, aligned with `queries`.
  std::vector<std::vector<TermId>> topics;
};

/// Deterministic in `options`. Image vectors are built from
/// ToyEmbeddingProvider(options.dim, options.seed).
SyntheticCorpus MakeSyntheticCorpus(const SyntheticOptions& options);

/// Writes vocab.txt, stoplist.txt, queries.jsonl, corpus.jsonl, images.jsonl,
/// train_pairs.tsv, heldout_pairs.tsv and qrels.txt into `dir`.
void WriteSyntheticCorpus(const SyntheticCorpus& corpus,
                          const std::filesystem::path& dir);

}  // namespace mmlsr
