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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mmlsr {

struct QueryRecord {
  std::string id;
  std::optional<std::string> page_title;
  std::optional<std::string> section_title;
  std::optional<std::string> context_page_description;
  std::optional<std::string> context_section_description;

  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

struct DocumentRecord {
  std::string id;
  std::optional<std::string> caption;
  /// Key into an item-level embedding table.
  std::optional<std::string> image_embedding_ref;

  friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

/// page_title, section_title and context_section_description joined by single
/// spaces. Absent or empty fields are skipped; context_page_description is
/// never used.
std::string BuildQueryText(const QueryRecord& q);

/// JSONL loaders. Blank lines are ignored. Malformed lines raise ParseError
/// with the 1-based line number; duplicate ids raise ParseError naming the
/// line of the second occurrence.
std::vector<QueryRecord> LoadQueries(const std::filesystem::path& path);
std::vector<DocumentRecord> LoadCorpus(const std::filesystem::path& path);

/// Absent fields are omitted from the output records.
void WriteQueries(const std::filesystem::path& path,
                  std::span<const QueryRecord> queries);
void WriteCorpus(const std::filesystem::path& path,
                 std::span<const DocumentRecord> docs);

}  // namespace mmlsr
