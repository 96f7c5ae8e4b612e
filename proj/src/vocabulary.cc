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
#include "mmlsr/vocabulary.h"

#include <fstream>

#include "mmlsr/error.h"

namespace mmlsr {

Vocabulary::Vocabulary(std::vector<std::string> terms)
    : terms_(std::move(terms)) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].empty()) {
      throw DataError("vocabulary: empty term at id " + std::to_string(i));
    }
    auto [it, inserted] = index_.emplace(terms_[i], static_cast<TermId>(i));
    if (!inserted) {
      throw DataError("vocabulary: duplicate term '" + terms_[i] + "' at ids " +
                      std::to_string(it->second) + " and " + std::to_string(i));
    }
  }
}

Vocabulary Vocabulary::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open vocabulary file " + path.string());
  }
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    terms.push_back(line);
  }
  try {
    return Vocabulary(std::move(terms));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void Vocabulary::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write vocabulary file " + path.string());
  }
  for (const auto& t : terms_) out << t << '\n';
}

std::optional<TermId> Vocabulary::lookup(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace mmlsr
