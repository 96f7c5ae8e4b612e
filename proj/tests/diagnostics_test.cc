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
#include <json.hpp>

#include "mmlsr/diagnostics.h"
#include "test_support.h"

namespace mmlsr {
namespace {

using testing::Sv;

TEST(CoActivationTest, DenseFixture) {
  auto r = ComputeCoActivation(testing::DenseCoActivationFixture(), 16);
  EXPECT_EQ(r.density, 1.0);
  EXPECT_EQ(r.expected_postings_per_active_term, 4.0);
  EXPECT_EQ(r.active_terms, 4u);
  EXPECT_EQ(r.mean_active_dims, 4.0);
  EXPECT_EQ(r.min_active_dims, 4u);
  EXPECT_EQ(r.max_active_dims, 4u);
}

TEST(CoActivationTest, SparseFixture) {
  auto r = ComputeCoActivation(testing::SparseCoActivationFixture(), 16);
  EXPECT_EQ(r.density, 0.25);
  EXPECT_EQ(r.expected_postings_per_active_term, 1.0);
  EXPECT_EQ(r.active_terms, 16u);
  EXPECT_EQ(r.mean_active_dims, 4.0);
}

TEST(CoActivationTest, EmptyInput) {
  auto r = ComputeCoActivation({}, 10);
  EXPECT_EQ(r.doc_count, 0u);
  EXPECT_EQ(r.active_terms, 0u);
  EXPECT_EQ(r.density, 0.0);
  EXPECT_EQ(r.expected_postings_per_active_term, 0.0);
  EXPECT_EQ(r.mean_active_dims, 0.0);
}

TEST(CoActivationTest, JsonCarriesHeadlineNumbers) {
  auto r = ComputeCoActivation(testing::SparseCoActivationFixture(), 16);
  auto j = nlohmann::json::parse(r.ToJson());
  EXPECT_EQ(j["density"].get<double>(), 0.25);
  EXPECT_EQ(j["expected_postings_per_active_term"].get<double>(), 1.0);
  EXPECT_EQ(j["doc_count"].get<int>(), 4);
}

TEST(TopTermsTest, OrdersByWeightThenTermId) {
  Vocabulary v({"the", "bike", "mountain", "mountains"});
  auto top = TopTerms(Sv({{1, 9.0}, {2, 10.0}}), v, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0], (std::pair<std::string, double>{"mountain", 10.0}));
  EXPECT_EQ(top[1], (std::pair<std::string, double>{"bike", 9.0}));

  EXPECT_TRUE(TopTerms(SparseVector(), v, 3).empty());
  auto tie = TopTerms(Sv({{0, 2.0}, {1, 1.0}, {3, 2.0}}), v, 2);
  EXPECT_EQ(tie[0].first, "the");
  EXPECT_EQ(tie[1].first, "mountains");
}

TEST(StopwordMassTest, Examples) {
  Vocabulary v({"the", "bike", "of"});
  std::set<std::string> stop = {"the", "of"};
  EXPECT_EQ(StopwordMass(Sv({{1, 3.0}}), v, stop), 0.0);
  EXPECT_EQ(StopwordMass(Sv({{0, 1.0}, {2, 5.0}}), v, stop), 1.0);
  EXPECT_EQ(StopwordMass(Sv({{0, 1.0}, {1, 3.0}}), v, stop), 0.25);
  EXPECT_EQ(StopwordMass(SparseVector(), v, stop), 0.0);
}

TEST(TopTermsTsvTest, Format) {
  testing::TempDir dir;
  Vocabulary v({"the", "bike", "mountain"});
  std::vector<NamedSparseVector> docs = {{"d1", Sv({{1, 9.0}, {2, 10.0}})},
                                         {"d2", Sv({{0, 0.5}})}};
  WriteTopTermsTsv(dir / "top.tsv", docs, v, 2);
  EXPECT_EQ(testing::ReadFile(dir / "top.tsv"),
            "doc_id\trank\tterm\tweight\n"
            "d1\t1\tmountain\t10.000000\n"
            "d1\t2\tbike\t9.000000\n"
            "d2\t1\tthe\t0.500000\n");
}

}  // namespace
}  // namespace mmlsr
