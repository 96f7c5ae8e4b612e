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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmlsr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller broke an operation's precondition (shape mismatch, bad argument).
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error(what) {}
};

/// Input data is inconsistent: duplicate ids, missing fields, bad values.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what) {}
};

/// A file could not be parsed. Carries the 1-based line number when known.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// An id was not found in an embedding table or record set.
class LookupError : public Error {
 public:
  explicit LookupError(const std::string& id);

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

/// Raised when a pooled embedding is requested for an empty input.
class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& what) : Error(what) {}
};

}  // namespace mmlsr
