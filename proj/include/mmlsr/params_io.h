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

#include "mmlsr/encoders.h"

namespace mmlsr {

/// Parameter file, one head per line:
///   {"head": "mlp", "W": [...], "b": f}
///   {"head": "mlm", "role": "document", "E": [[...], ...], "bias": [...]}
/// "role" is "query" or "document" (the default when omitted); M1 carries one
/// MLM head of each role.
ModelParams ReadModelParams(const std::filesystem::path& path);
void WriteModelParams(const std::filesystem::path& path,
                      const ModelParams& params);

/// {"variant": "M2", "fusion": "sum", "mlm_top_k": null}
EncoderConfig ReadEncoderConfig(const std::filesystem::path& path);
void WriteEncoderConfig(const std::filesystem::path& path,
                        const EncoderConfig& config);

}  // namespace mmlsr
