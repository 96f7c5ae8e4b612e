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
#include "mmlsr/ingest.h"

#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "mmlsr/error.h"

namespace mmlsr {

using nlohmann::json;

namespace {

std::optional<std::string> OptionalString(const json& j, const char* key,
                                          const std::string& source,
                                          std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw ParseError(source, line, std::string("field '") + key +
                                       "' must be a string or null");
  }
  return it->get<std::string>();
}

// Parses every non-blank line with `parse`, rejecting duplicate ids.
template <typename Record, typename Parse>
std::vector<Record> LoadJsonl(const std::filesystem::path& path,
                              const char* what, Parse parse) {
  std::ifstream in(path);
  if (!in) throw DataError(std::string("cannot open ") + what + " file " +
                           path.string());
  const std::string source = path.string();
  std::vector<Record> out;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, n, e.what());
    }
    if (!j.is_object()) throw ParseError(source, n, "expected a JSON object");
    auto id_it = j.find("id");
    if (id_it == j.end() || !id_it->is_string() ||
        id_it->get<std::string>().empty()) {
      throw ParseError(source, n, "missing or empty string 'id'");
    }
    Record r = parse(j, source, n);
    r.id = id_it->get<std::string>();
    auto [it, inserted] = seen.emplace(r.id, n);
    if (!inserted) {
      throw ParseError(source, n, "duplicate id '" + r.id +
                                      "' (first seen on line " +
                                      std::to_string(it->second) + ")");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void PutOptional(json& j, const char* key, const std::optional<std::string>& v) {
  if (v) j[key] = *v;
}

}  // namespace

std::string BuildQueryText(const QueryRecord& q) {
  std::string out;
  for (const auto* field :
       {&q.page_title, &q.section_title, &q.context_section_description}) {
    if (!*field || (*field)->empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += **field;
  }
  return out;
}

std::vector<QueryRecord> LoadQueries(const std::filesystem::path& path) {
  return LoadJsonl<QueryRecord>(
      path, "queries",
      [](const json& j, const std::string& src, std::size_t n) {
        QueryRecord q;
        q.page_title = OptionalString(j, "page_title", src, n);
        q.section_title = OptionalString(j, "section_title", src, n);
        q.context_page_description =
            OptionalString(j, "context_page_description", src, n);
        q.context_section_description =
            OptionalString(j, "context_section_description", src, n);
        return q;
      });
}

std::vector<DocumentRecord> LoadCorpus(const std::filesystem::path& path) {
  return LoadJsonl<DocumentRecord>(
      path, "corpus",
      [](const json& j, const std::string& src, std::size_t n) {
        DocumentRecord d;
        d.caption = OptionalString(j, "caption", src, n);
        d.image_embedding_ref = OptionalString(j, "image_embedding_ref", src, n);
        if (!d.caption && !d.image_embedding_ref) {
          throw ParseError(src, n,
                           "document needs a caption or an image_embedding_ref");
        }
        return d;
      });
}

void WriteQueries(const std::filesystem::path& path,
                  std::span<const QueryRecord> queries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write queries file " + path.string());
  for (const auto& q : queries) {
    json j;
    j["id"] = q.id;
    PutOptional(j, "page_title", q.page_title);
    PutOptional(j, "section_title", q.section_title);
    PutOptional(j, "context_page_description", q.context_page_description);
    PutOptional(j, "context_section_description",
                q.context_section_description);
    out << j.dump() << '\n';
  }
}

void WriteCorpus(const std::filesystem::path& path,
                 std::span<const DocumentRecord> docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file " + path.string());
  for (const auto& d : docs) {
    json j;
    j["id"] = d.id;
    PutOptional(j, "caption", d.caption);
    PutOptional(j, "image_embedding_ref", d.image_embedding_ref);
    out << j.dump() << '\n';
  }
}

}  // namespace mmlsr
