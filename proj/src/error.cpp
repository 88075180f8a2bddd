// Copyright 2026 The fqf Authors
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

#include "fqf/error.hpp"

#include <cstdio>

namespace fqf {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MixedParity: return "MixedParity";
    case ErrorCode::MixedParityOnFermionicSpace: return "MixedParityOnFermionicSpace";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidParityAssignment: return "InvalidParityAssignment";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DegenerateRatio: return "DegenerateRatio";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::NonUniqueSteadyState: return "NonUniqueSteadyState";
    case ErrorCode::BoundaryMassLeak: return "BoundaryMassLeak";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what, std::optional<std::size_t> step)
    : std::runtime_error(what), code_(code), step_(step) {}

}  // namespace fqf
