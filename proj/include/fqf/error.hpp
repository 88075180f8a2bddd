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

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace fqf {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  MixedParity,
  MixedParityOnFermionicSpace,
  IndexOutOfRange,
  InvalidParityAssignment,
  InvalidModel,
  GridMismatch,
  DegenerateRatio,
  InvariantViolation,
  NonUniqueSteadyState,
  BoundaryMassLeak,
  Io,
  Parse,
};

const char* to_string(ErrorCode code) noexcept;

/// Short "%.6g" rendering of a number for diagnostics.
std::string format_number(double x);

/// Exception carried through the library. `step()` is set when the failure
/// happened at a specific integration step.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> step = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> step_;
};

}  // namespace fqf
