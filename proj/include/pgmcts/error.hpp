// Copyright 2026 The pgmcts Authors
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

#ifndef PGMCTS__ERROR_HPP_
#define PGMCTS__ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pgmcts
{

enum class ErrorKind {
  NoRoute,
  UnknownLane,
  EmptyRoute,
  LengthMismatch,
  EmptySource,
  FootprintOffGrid,
  FormatError,
  SpecMismatch,
  StartMismatch,
  Infeasible,
  NoChildren,
  Exhausted,
  ScenarioInvalid,
  InvariantViolation,
};

const char * to_string(ErrorKind kind);

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string & message)
  : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
  {
  }

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline const char * to_string(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::NoRoute: return "NoRoute";
    case ErrorKind::UnknownLane: return "UnknownLane";
    case ErrorKind::EmptyRoute: return "EmptyRoute";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptySource: return "EmptySource";
    case ErrorKind::FootprintOffGrid: return "FootprintOffGrid";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::StartMismatch: return "StartMismatch";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NoChildren: return "NoChildren";
    case ErrorKind::Exhausted: return "Exhausted";
    case ErrorKind::ScenarioInvalid: return "ScenarioInvalid";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace pgmcts

#endif  // PGMCTS__ERROR_HPP_
