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
#include "mmlsr/error.h"

namespace mmlsr {

ParseError::ParseError(const std::string& source, std::size_t line,
                       const std::string& what)
    : DataError(source + ":" + std::to_string(line) + ": " + what),
      line_(line) {}

LookupError::LookupError(const std::string& id)
    : Error("unknown id '" + id + "'"), id_(id) {}

}  // namespace mmlsr
