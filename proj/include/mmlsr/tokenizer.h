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

#include <string>
#include <string_view>
#include <vector>

#include "mmlsr/vocabulary.h"

namespace mmlsr {

struct TokenSequence {
  std::vector<TermId> ids;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

/// Lowercases ASCII letters, splits on whitespace, and emits every ASCII
/// punctuation character as a token of its own. Non-ASCII bytes are kept
/// inside words untouched.
std::vector<std::string> SplitWords(std::string_view text);

/// SplitWords followed by vocabulary lookup; out-of-vocabulary tokens are
/// dropped.
TokenSequence Tokenize(std::string_view text, const Vocabulary& vocab);

}  // namespace mmlsr
