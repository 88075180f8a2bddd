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

// Quantum-jump synthesis of electron-counting records on fermion channel 0
// and the counting filter driven by such records.
//
// Both run the same per-step map on a shared grid:
//   no count:  rho <- normalize(rho + dt [Lv(rho) - L0 rho L0* + I rho])
//   count:     rho <- L0 rho L0* / I
// with I = tr(L0 rho L0*). The record generator thins a Bernoulli draw with
// probability I dt per step, so at most one count lands in a step.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fqf/dynamics.hpp"
#include "fqf/models.hpp"
#include "fqf/record.hpp"

namespace fqf {

/// Largest allowed dt * sup-intensity.
inline constexpr double kMaxJumpProbability = 0.1;

double jump_intensity(const SystemModel& model, const Matrix& rho);
double jump_intensity(const SystemModel& model, const ConditionalState& state);

/// Throws InvalidArgument if dt * ||L0||^2 exceeds kMaxJumpProbability.
void check_step_size(const SystemModel& model, double dt);

ConditionalState no_jump_step(const SystemModel& model, const ConditionalState& state, double dt);
/// Throws DegenerateRatio when the intensity is below kRatioFloor.
ConditionalState jump_apply(const SystemModel& model, const ConditionalState& state);

/// Running extremes of the state diagnostics over a run.
struct RunDiagnostics {
  double max_hermiticity = 0.0;
  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double max_evenness = 0.0;
  double min_intensity = 0.0;
  std::size_t jumps = 0;

  void absorb(const StateDiagnostics& d) noexcept;
};

struct FilterRun {
  std::vector<double> t;                  // times of stored states
  std::vector<std::size_t> step_index;    // grid index of each stored state
  std::vector<ConditionalState> states;
  std::vector<double> intensities;        // per step, evaluated before the update
  std::vector<double> innovations;        // per step, dW = dY - intensity dt
  RunDiagnostics diagnostics;

  /// W(T): sum of the innovations.
  double innovation_total() const noexcept;
};

struct TrajectoryOptions {
  /// Store every `stride`-th state (index 0 and the final state always).
  std::size_t stride = 1;
  /// Store no states at all (intensities and innovations are still kept).
  bool store_states = true;
  /// Called with (grid index, rho) for every grid point, including 0.
  std::function<void(std::size_t, const Matrix&)> observer;
};

struct SimulationResult {
  MeasurementRecord record;
  FilterRun run;  // conditional trajectory that generated the record
};

SimulationResult simulate_record(const SystemModel& model, const ConditionalState& rho0, double T,
                                 double dt, std::uint64_t seed, std::uint64_t trajectory_id = 0,
                                 const TrajectoryOptions& options = {});

FilterRun run_filter(const SystemModel& model, const ConditionalState& rho0_hat,
                     const MeasurementRecord& record, const TrajectoryOptions& options = {});

}  // namespace fqf
