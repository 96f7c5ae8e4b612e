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
#include "mmlsr/params_io.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmlsr/error.h"

namespace mmlsr {

using nlohmann::json;

namespace {

json MlmToJson(const MlmHeadParams& p, const char* role) {
  json rows = json::array();
  for (std::size_t i = 0; i < p.vocab_size(); ++i) {
    auto r = p.row(static_cast<TermId>(i));
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  json j;
  j["head"] = "mlm";
  j["role"] = role;
  j["E"] = std::move(rows);
  j["bias"] = p.bias;
  return j;
}

MlmHeadParams MlmFromJson(const json& j) {
  const auto rows = j.at("E").get<std::vector<std::vector<double>>>();
  auto bias = j.at("bias").get<std::vector<double>>();
  if (rows.size() != bias.size()) {
    throw DataError("mlm head: E has " + std::to_string(rows.size()) +
                    " rows but bias has " + std::to_string(bias.size()));
  }
  if (rows.empty()) throw DataError("mlm head: empty E");
  MlmHeadParams p(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != p.dim) throw DataError("mlm head: ragged E");
    std::copy(rows[i].begin(), rows[i].end(), p.row(static_cast<TermId>(i)).begin());
  }
  p.bias = std::move(bias);
  return p;
}

}  // namespace

ModelParams ReadModelParams(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open parameter file " + path.string());
  const std::string source = path.string();
  ModelParams params;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      const auto head = j.at("head").get<std::string>();
      if (head == "mlp") {
        if (params.mlp) throw ParseError(source, n, "second mlp head");
        params.mlp = MlpHeadParams{j.at("W").get<std::vector<double>>(),
                                   j.at("b").get<double>()};
      } else if (head == "mlm") {
        const auto role = j.value("role", std::string("document"));
        auto& slot = role == "query" ? params.query_mlm : params.doc_mlm;
        if (role != "query" && role != "document") {
          throw ParseError(source, n, "unknown mlm role '" + role + "'");
        }
        if (slot) throw ParseError(source, n, "second " + role + " mlm head");
        slot = MlmFromJson(j);
      } else {
        throw ParseError(source, n, "unknown head '" + head + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError(source, n, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& e) {
      throw ParseError(source, n, e.what());
    }
  }
  return params;
}

void WriteModelParams(const std::filesystem::path& path,
                      const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write parameter file " + path.string());
  if (params.mlp) {
    json j;
    j["head"] = "mlp";
    j["W"] = params.mlp->W;
    j["b"] = params.mlp->b;
    out << j.dump() << '\n';
  }
  if (params.query_mlm) out << MlmToJson(*params.query_mlm, "query").dump() << '\n';
  if (params.doc_mlm) out << MlmToJson(*params.doc_mlm, "document").dump() << '\n';
}

EncoderConfig ReadEncoderConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open encoder config " + path.string());
  try {
    const json j = json::parse(in);
    EncoderConfig c;
    c.variant = ParseVariant(j.at("variant").get<std::string>());
    c.fusion = ParseFusion(j.value("fusion", std::string("sum")));
    if (auto it = j.find("mlm_top_k"); it != j.end() && !it->is_null()) {
      if (!it->is_number_unsigned() || it->get<std::size_t>() == 0) {
        throw DataError("mlm_top_k must be a positive integer or null");
      }
      c.mlm_top_k = it->get<std::size_t>();
    }
    return c;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void WriteEncoderConfig(const std::filesystem::path& path,
                        const EncoderConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write encoder config " + path.string());
  json j;
  j["variant"] = ToString(config.variant);
  j["fusion"] = ToString(config.fusion);
  j["mlm_top_k"] = config.mlm_top_k ? json(*config.mlm_top_k) : json(nullptr);
  out << j.dump() << '\n';
}

}  // namespace mmlsr
