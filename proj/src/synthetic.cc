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
#include "mmlsr/synthetic.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

#include "mmlsr/error.h"
#include "mmlsr/random.h"

namespace mmlsr {

namespace {

constexpr std::array kTopicWords = {
    "mountain", "bike",    "river",   "castle",  "harbor",   "forest",
    "bridge",   "tower",   "desert",  "glacier", "island",   "train",
    "church",   "market",  "garden",  "stadium", "volcano",  "lake",
    "airport",  "museum",  "canal",   "village", "cathedral","lighthouse",
    "waterfall","valley",  "beach",   "palace",  "library",  "factory",
    "farm",     "temple",  "harvest", "festival","soldier",  "ship",
    "horse",    "bird",    "flower",  "statue",  "painting", "car",
    "bus",      "tram",    "street",  "square",  "park",     "dam",
    "mine",     "cave",    "reef",    "canyon",  "meadow",   "orchard",
    "vineyard", "monastery","fortress","windmill","pier",    "quarry",
    "ferry",    "subway",  "arena",   "theater"};

constexpr std::array kStopwords = {"the", "of", "and", "a", "in", "to", "with",
                                   "on", "for", "is", ",", "."};

constexpr std::array kFillers = {"history", "view",   "early", "modern",
                                 "north",   "south",  "old",   "new",
                                 "region",  "people", "life",  "photo"};

// Vocabulary entries no query or caption ever contains.
constexpr std::array kLatent = {"accent", "crown", "natural", "wild",  "now",
                                "yourself", "ra",  "de",      "mo",    "dirt",
                                "path",   "person", "red",    "blue",  "green",
                                "light",  "dark",  "small",   "large", "far",
                                "near",   "high",  "low",     "deep"};

std::string Capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
  return s;
}

template <std::size_t N>
const char* Pick(Rng& rng, const std::array<const char*, N>& words) {
  return words[rng.below(N)];
}

}  // namespace

SyntheticCorpus MakeSyntheticCorpus(const SyntheticOptions& options) {
  if (options.topics > kTopicWords.size() || options.topics < options.topics_per_pair ||
      options.topics_per_pair == 0) {
    throw ContractViolation("synthetic: bad topic configuration");
  }
  if (options.held_out > options.pairs) {
    throw ContractViolation("synthetic: held_out exceeds pairs");
  }
  SyntheticCorpus out;
  std::vector<std::string> terms(kTopicWords.begin(),
                                 kTopicWords.begin() + options.topics);
  terms.insert(terms.end(), kStopwords.begin(), kStopwords.end());
  terms.insert(terms.end(), kFillers.begin(), kFillers.end());
  terms.insert(terms.end(), kLatent.begin(), kLatent.end());
  out.vocab = Vocabulary(terms);
  out.stopwords.assign(kStopwords.begin(), kStopwords.end());

  Rng rng(DeriveSeed(options.seed, 0x73796e7468ULL));
  const ToyEmbeddingProvider toy(options.dim, options.seed);
  out.images = TableEmbeddingProvider(options.dim);

  std::set<std::vector<TermId>> used;
  for (std::size_t p = 0; p < options.pairs; ++p) {
    std::vector<TermId> combo;
    do {
      combo.clear();
      while (combo.size() < options.topics_per_pair) {
        const auto t = static_cast<TermId>(rng.below(options.topics));
        if (std::find(combo.begin(), combo.end(), t) == combo.end()) combo.push_back(t);
      }
      std::sort(combo.begin(), combo.end());
    } while (!used.insert(combo).second);
    std::vector<std::string> words;
    for (TermId t : combo) words.push_back(out.vocab.term(t));
    rng.shuffle(std::span<std::string>(words));

    char id[32];
    std::snprintf(id, sizeof(id), "q%04zu", p);
    QueryRecord q;
    q.id = id;
    q.page_title = Capitalize(words[0]);
    std::string section = std::string(Pick(rng, kFillers)) + " of the";
    for (std::size_t w = 1; w < words.size(); ++w) section += " " + words[w];
    q.section_title = Capitalize(section);
    std::string context;
    for (int w = 0; w < 4; ++w) {
      context += (w ? " " : "") + std::string(rng.below(2) ? Pick(rng, kStopwords)
                                                            : Pick(rng, kFillers));
    }
    context += " " + words[rng.below(words.size())] + " .";
    q.context_section_description = context;
    // Mentions unrelated topics; must never reach the query text.
    q.context_page_description =
        std::string(kTopicWords[rng.below(options.topics)]) + " and " +
        kTopicWords[rng.below(options.topics)];
    out.queries.push_back(q);

    std::snprintf(id, sizeof(id), "d%04zu", p);
    DocumentRecord d;
    d.id = id;
    std::string caption = "a";
    for (std::size_t w = 0; w < words.size(); ++w) {
      caption += (w ? " and " : " ") + words[w];
    }
    caption += " , " + std::string(Pick(rng, kFillers)) + " photo";
    d.caption = caption;
    d.image_embedding_ref = "img-" + std::string(id);

    DenseEmbedding image{std::vector<double>(options.dim, 0.0)};
    for (TermId t : combo) {
      const auto h = toy.TokenEmbedding(t);
      for (std::size_t k = 0; k < options.dim; ++k) image.values[k] += h.values[k];
    }
    for (auto& x : image.values) x += rng.uniform(-options.image_noise, options.image_noise);
    const double n = Norm(image);
    for (auto& x : image.values) x /= n;
    out.images.Add(*d.image_embedding_ref, std::move(image));
    out.corpus.push_back(std::move(d));

    out.qrels.Add(q.id, out.corpus.back().id, 1);
    TrainingPair pair{q.id, out.corpus.back().id};
    if (p + options.held_out < options.pairs) {
      out.train_pairs.push_back(pair);
    } else {
      out.held_out_pairs.push_back(pair);
    }
    out.topics.push_back(combo);
  }
  return out;
}

void WriteSyntheticCorpus(const SyntheticCorpus& c,
                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  c.vocab.Save(dir / "vocab.txt");
  {
    std::ofstream out(dir / "stoplist.txt", std::ios::binary);
    for (const auto& s : c.stopwords) out << s << '\n';
  }
  WriteQueries(dir / "queries.jsonl", c.queries);
  WriteCorpus(dir / "corpus.jsonl", c.corpus);
  c.images.Save(dir / "images.jsonl");
  auto write_pairs = [](const std::filesystem::path& path,
                        const std::vector<TrainingPair>& pairs) {
    std::ofstream out(path, std::ios::binary);
    for (const auto& p : pairs) out << p.query_id << '\t' << p.doc_id << '\n';
  };
  write_pairs(dir / "train_pairs.tsv", c.train_pairs);
  write_pairs(dir / "heldout_pairs.tsv", c.held_out_pairs);
  c.qrels.Save(dir / "qrels.txt");
}

}  // namespace mmlsr
