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

#include "fqf/record.hpp"

#include <cmath>

#include "fqf/error.hpp"

namespace fqf {

void MeasurementRecord::validate() const {
  if (increments.empty()) throw Error(ErrorCode::InvalidArgument, "record has no steps");
  if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t0))
    throw Error(ErrorCode::InvalidArgument, "record needs finite t0 and dt > 0");
  for (std::size_t k = 0; k < increments.size(); ++k)
    if (increments[k] > 1)
      throw Error(ErrorCode::InvalidArgument, "counting increment must be 0 or 1", k);
}

void ClassicalRecord::validate() const {
  if (increments.empty()) throw Error(ErrorCode::InvalidArgument, "record has no steps");
  if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t0))
    throw Error(ErrorCode::InvalidArgument, "record needs finite t0 and dt > 0");
  for (std::size_t k = 0; k < increments.size(); ++k)
    if (!std::isfinite(increments[k]))
      throw Error(ErrorCode::InvalidArgument, "observation increment is not finite", k);
}

}  // namespace fqf
