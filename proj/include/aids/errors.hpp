/*
 * Copyright 2026 The AIDS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aids {

/// Base of every error raised by the library. `kind()` is the stable name
/// used in protocol Error envelopes and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define AIDS_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

// dataset
AIDS_DEFINE_ERROR(EmptyDataset);
AIDS_DEFINE_ERROR(IoError);

// mlp / svm
AIDS_DEFINE_ERROR(InvalidArchitecture);
AIDS_DEFINE_ERROR(DimensionError);
AIDS_DEFINE_ERROR(EmptyBatch);
AIDS_DEFINE_ERROR(ModelTooLarge);
AIDS_DEFINE_ERROR(NumericalFailure);
AIDS_DEFINE_ERROR(InvalidConfig);
AIDS_DEFINE_ERROR(DegenerateLabels);

// classifier
AIDS_DEFINE_ERROR(NoNewEvidence);
AIDS_DEFINE_ERROR(CorruptArtifact);

// protocol
AIDS_DEFINE_ERROR(UnknownMessage);
AIDS_DEFINE_ERROR(ProtocolError);
AIDS_DEFINE_ERROR(IntegrityError);

// nodes
AIDS_DEFINE_ERROR(NotFound);
AIDS_DEFINE_ERROR(Conflict);

// harness
AIDS_DEFINE_ERROR(ConfigError);

#undef AIDS_DEFINE_ERROR

/// Record-level parse failures carry the 1-based line number of the input.
class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line, const std::string& what)
      : Error("MalformedRecord", "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MalformedField : public Error {
 public:
  MalformedField(std::size_t line, std::string field, const std::string& what)
      : Error("MalformedField",
              "line " + std::to_string(line) + ", field " + field + ": " + what),
        line_(line),
        field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace aids
