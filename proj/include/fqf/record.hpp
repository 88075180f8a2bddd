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
#include <cstdint>
#include <vector>

namespace fqf {

/// Electron-counting record on a uniform grid: increments[k] is dY over
/// [t0 + k dt, t0 + (k + 1) dt).
struct MeasurementRecord {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<std::uint8_t> increments;
  std::uint64_t seed = 0;
  std::uint64_t trajectory_id = 0;

  std::size_t steps() const noexcept { return increments.size(); }
  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  /// Throws InvalidArgument when empty, dt <= 0 or an increment is not 0/1.
  void validate() const;
};

/// Real-valued observation increments dY = h(xi) dt + dV on a uniform grid.
struct ClassicalRecord {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> increments;
  std::uint64_t seed = 0;

  std::size_t steps() const noexcept { return increments.size(); }
  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  void validate() const;
};

/// One filter update written as prediction + gain * innovation. Both the
/// Kalman filter and the scalar quantum filters report this per step, and
/// the updated estimate equals prediction + gain * innovation exactly up to
/// rounding.
struct StepTelemetry {
  double prediction = 0.0;
  double gain = 0.0;
  double innovation = 0.0;
};

}  // namespace fqf
