// Copyright 2026 The Offload Planner Authors.
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

namespace offload {

// Base of every error the toolkit raises. `kind()` is the stable name used
// in CLI diagnostics ("error: Infeasible: ...").
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define OFFLOAD_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(#Name, what) {}        \
  };

// minic
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& what)
      : Error("SyntaxError", std::to_string(line) + ":" +
                                 std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UndeclaredIdentifier : public Error {
 public:
  UndeclaredIdentifier(std::size_t line, std::size_t column,
                       const std::string& name)
      : Error("UndeclaredIdentifier",
              std::to_string(line) + ":" + std::to_string(column) +
                  ": use of undeclared identifier '" + name + "'"),
        name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

OFFLOAD_DEFINE_ERROR(EvalError)

// offload model
OFFLOAD_DEFINE_ERROR(LengthMismatch)
OFFLOAD_DEFINE_ERROR(InvalidPattern)

// evaluation
OFFLOAD_DEFINE_ERROR(MissingAnnotation)
OFFLOAD_DEFINE_ERROR(NonStaticTrip)
OFFLOAD_DEFINE_ERROR(SpawnError)
OFFLOAD_DEFINE_ERROR(ShapeMismatch)

// ga
OFFLOAD_DEFINE_ERROR(UnevaluatedIndividual)

// resource planning
OFFLOAD_DEFINE_ERROR(NonPositiveTime)
OFFLOAD_DEFINE_ERROR(Infeasible)
OFFLOAD_DEFINE_ERROR(CapExceeded)

// configuration and file contracts
OFFLOAD_DEFINE_ERROR(ConfigError)

#undef OFFLOAD_DEFINE_ERROR

}  // namespace offload
