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

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, step, lane), so trajectories can be generated in any order
// or on any thread and still reproduce bit for bit.

#include <array>
#include <cstdint>

namespace fqf {

/// Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

class KeyedStream {
 public:
  KeyedStream(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

  /// Four independent 32-bit words for this step.
  std::array<std::uint32_t, 4> block(std::uint64_t step) const noexcept;

  /// Uniform in the open interval (0, 1), 53-bit resolution.
  double uniform(std::uint64_t step) const noexcept;

  /// Two independent standard normals (Box-Muller) for this step.
  std::array<double, 2> normal_pair(std::uint64_t step) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace fqf
