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
#include <gtest/gtest.h>

#include "mmlsr/error.h"
#include "mmlsr/ingest.h"
#include "test_support.h"

namespace mmlsr {
namespace {

using testing::TempDir;
using testing::WriteFile;

TEST(QueryTextTest, ConcatenationRule) {
  QueryRecord q{"q", "A", "B", "X", "C"};
  EXPECT_EQ(BuildQueryText(q), "A B C");
  EXPECT_EQ(BuildQueryText(QueryRecord{"q", "A", {}, {}, {}}), "A");
  EXPECT_EQ(BuildQueryText(QueryRecord{"q", {}, {}, {}, {}}), "");
  EXPECT_EQ(BuildQueryText(QueryRecord{"q", "", "B", "X", {}}), "B");
  EXPECT_EQ(BuildQueryText(QueryRecord{"q", {}, {}, "only page", {}}), "");
}

TEST(LoadQueriesTest, EmptyAndSingleRecord) {
  TempDir dir;
  WriteFile(dir / "q.jsonl", "");
  EXPECT_TRUE(LoadQueries(dir / "q.jsonl").empty());
  WriteFile(dir / "q.jsonl",
            R"({"id":"q1","page_title":"A","section_title":"B",)"
            R"("context_page_description":"X","context_section_description":"C"})"
            "\n");
  auto qs = LoadQueries(dir / "q.jsonl");
  ASSERT_EQ(qs.size(), 1u);
  EXPECT_EQ(qs[0], (QueryRecord{"q1", "A", "B", "X", "C"}));
}

TEST(LoadQueriesTest, DuplicateIdNamesLine) {
  TempDir dir;
  std::string content;
  for (int i = 1; i <= 6; ++i) {
    content += R"({"id":"q)" + std::to_string(i) + R"(","page_title":"t"})" "\n";
  }
  content += R"({"id":"q3","page_title":"again"})" "\n";
  WriteFile(dir / "q.jsonl", content);
  try {
    LoadQueries(dir / "q.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
    EXPECT_NE(std::string(e.what()).find(":7:"), std::string::npos) << e.what();
  }
}

TEST(LoadQueriesTest, MalformedRecords) {
  TempDir dir;
  WriteFile(dir / "q.jsonl", "{\"id\":\"q1\"}\n{\"page_title\":\"no id\"}\n");
  EXPECT_THROW(LoadQueries(dir / "q.jsonl"), ParseError);
  WriteFile(dir / "q.jsonl", "{\"id\":\"q1\",\"page_title\":3}\n");
  EXPECT_THROW(LoadQueries(dir / "q.jsonl"), ParseError);
  EXPECT_THROW(LoadQueries(dir / "missing.jsonl"), DataError);
}

TEST(LoadCorpusTest, RecordsAndErrors) {
  TempDir dir;
  WriteFile(dir / "c.jsonl",
            "{\"id\":\"d1\",\"caption\":\"a bike\",\"image_embedding_ref\":\"img-1\"}\n"
            "{\"id\":\"d2\",\"image_embedding_ref\":\"img-2\"}\n"
            "{\"id\":\"d3\",\"caption\":\"only text\"}\n");
  auto docs = LoadCorpus(dir / "c.jsonl");
  ASSERT_EQ(docs.size(), 3u);
  EXPECT_EQ(docs[0], (DocumentRecord{"d1", "a bike", "img-1"}));
  EXPECT_FALSE(docs[1].caption.has_value());
  EXPECT_FALSE(docs[2].image_embedding_ref.has_value());

  WriteFile(dir / "c.jsonl", "{\"id\":\"d1\",\"caption\":\"x\"}\n{\"id\":\"d2\"}\n");
  try {
    LoadCorpus(dir / "c.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(IngestIoTest, WriteReadRoundTrip) {
  TempDir dir;
  std::vector<QueryRecord> qs = {{"q1", "A", {}, "X", "C \"quoted\""},
                                 {"q2", {}, {}, {}, {}}};
  WriteQueries(dir / "q.jsonl", qs);
  EXPECT_EQ(LoadQueries(dir / "q.jsonl"), qs);
  std::vector<DocumentRecord> ds = {{"d1", "caption", {}}, {"d2", {}, "img"}};
  WriteCorpus(dir / "c.jsonl", ds);
  EXPECT_EQ(LoadCorpus(dir / "c.jsonl"), ds);
}

}  // namespace
}  // namespace mmlsr
