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

#include "fqf/stochastics.hpp"

#include <cmath>
#include <limits>

#include "fqf/error.hpp"
#include "fqf/rng.hpp"

namespace fqf {

namespace {

Matrix no_jump_map(const SystemModel& model, const Matrix& rho, double intensity, double dt) {
  const Matrix& L0 = model.L0().matrix();
  Matrix next = rho;
  next.noalias() += dt * liouvillian_apply(model, rho);
  next.noalias() -= dt * (L0 * rho * L0.adjoint());
  next += (dt * intensity) * rho;
  return next / next.trace();
}

Matrix jump_map(const SystemModel& model, const Matrix& rho, double intensity) {
  const Matrix& L0 = model.L0().matrix();
  return (L0 * rho * L0.adjoint()) / intensity;
}

void require_even_dims(const SystemModel& model, const ConditionalState& state) {
  if (!(state.space() == model.space()))
    throw Error(ErrorCode::DimensionMismatch, "state does not live on the model space");
}

// Shared per-step driver for the record generator and the filter.
class Stepper {
 public:
  Stepper(const SystemModel& model, const ConditionalState& rho0, double dt,
          const TrajectoryOptions& options, std::size_t steps)
      : model_(model), signs_(model.space().parity_signs()), dt_(dt), options_(options), rho_(rho0.rho()) {
    model.require_valid();
    require_even_dims(model, rho0);
    check_step_size(model, dt);
    run_.intensities.reserve(steps);
    run_.innovations.reserve(steps);
    run_.diagnostics.min_intensity = std::numeric_limits<double>::infinity();
    run_.diagnostics.absorb(rho0.diagnostics());
    stride_ = std::max<std::size_t>(1, options.stride);
    steps_ = steps;
    emit(0);
  }

  double intensity() const { return jump_intensity(model_, rho_); }

  void advance(std::size_t k, bool count, double intensity) {
    if (count) {
      if (intensity < kRatioFloor)
        throw Error(ErrorCode::DegenerateRatio,
                    "count demanded at filtered intensity " + format_number(intensity), k);
      rho_ = jump_map(model_, rho_, intensity);
      ++run_.diagnostics.jumps;
    } else {
      rho_ = no_jump_map(model_, rho_, intensity, dt_);
    }
    run_.intensities.push_back(intensity);
    run_.innovations.push_back((count ? 1.0 : 0.0) - intensity * dt_);
    run_.diagnostics.min_intensity = std::min(run_.diagnostics.min_intensity, intensity);

    const StateDiagnostics diag = diagnose(rho_, signs_);
    run_.diagnostics.absorb(diag);
    if (!diag.within())
      throw Error(ErrorCode::InvariantViolation,
                  "conditional state left tolerance: hermiticity " + format_number(diag.hermiticity) +
                      ", trace error " + format_number(diag.trace_error) +
                      ", min eigenvalue " + format_number(diag.min_eigenvalue) + ", evenness " +
                      format_number(diag.evenness),
                  k + 1);
    emit(k + 1);
  }

  FilterRun finish() { return std::move(run_); }

 private:
  void emit(std::size_t index) {
    if (options_.observer) options_.observer(index, rho_);
    if (!options_.store_states) return;
    if (index % stride_ == 0 || index == steps_) {
      run_.t.push_back(static_cast<double>(index) * dt_);
      run_.step_index.push_back(index);
      run_.states.emplace_back(rho_, model_.space(), index);
    }
  }

  const SystemModel& model_;
  std::vector<int> signs_;
  double dt_;
  const TrajectoryOptions& options_;
  Matrix rho_;
  FilterRun run_;
  std::size_t stride_ = 1;
  std::size_t steps_ = 0;
};

}  // namespace

void RunDiagnostics::absorb(const StateDiagnostics& d) noexcept {
  max_hermiticity = std::max(max_hermiticity, d.hermiticity);
  max_trace_error = std::max(max_trace_error, d.trace_error);
  min_eigenvalue = std::min(min_eigenvalue, d.min_eigenvalue);
  max_evenness = std::max(max_evenness, d.evenness);
}

double FilterRun::innovation_total() const noexcept {
  double w = 0.0;
  for (double dw : innovations) w += dw;
  return w;
}

double jump_intensity(const SystemModel& model, const Matrix& rho) {
  // tr(L0 rho L0*) = tr(L0* L0 rho)
  return expectation(rho, model.L0dagL0()).real();
}

double jump_intensity(const SystemModel& model, const ConditionalState& state) {
  require_even_dims(model, state);
  return jump_intensity(model, state.rho());
}

void check_step_size(const SystemModel& model, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw Error(ErrorCode::InvalidArgument, "dt must be positive and finite");
  if (dt * model.max_intensity() > kMaxJumpProbability)
    throw Error(ErrorCode::InvalidArgument,
                "dt * ||L0||^2 = " + format_number(dt * model.max_intensity()) +
                    " exceeds 0.1; reduce dt");
}

ConditionalState no_jump_step(const SystemModel& model, const ConditionalState& state, double dt) {
  model.require_valid();
  require_even_dims(model, state);
  check_step_size(model, dt);
  const double intensity = jump_intensity(model, state.rho());
  return {no_jump_map(model, state.rho(), intensity, dt), model.space()};
}

ConditionalState jump_apply(const SystemModel& model, const ConditionalState& state) {
  model.require_valid();
  require_even_dims(model, state);
  const double intensity = jump_intensity(model, state.rho());
  if (intensity < kRatioFloor)
    throw Error(ErrorCode::DegenerateRatio,
                "jump requested at intensity " + format_number(intensity) + " < 1e-12");
  return {jump_map(model, state.rho(), intensity), model.space()};
}

SimulationResult simulate_record(const SystemModel& model, const ConditionalState& rho0, double T,
                                 double dt, std::uint64_t seed, std::uint64_t trajectory_id,
                                 const TrajectoryOptions& options) {
  const std::size_t steps = step_count(T, dt);
  Stepper stepper(model, rho0, dt, options, steps);
  const KeyedStream stream(seed, trajectory_id);

  SimulationResult out;
  out.record.t0 = 0.0;
  out.record.dt = dt;
  out.record.seed = seed;
  out.record.trajectory_id = trajectory_id;
  out.record.increments.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double intensity = stepper.intensity();
    const bool count = stream.uniform(k) < intensity * dt;
    out.record.increments.push_back(count ? 1 : 0);
    stepper.advance(k, count, intensity);
  }
  out.run = stepper.finish();
  return out;
}

FilterRun run_filter(const SystemModel& model, const ConditionalState& rho0_hat,
                     const MeasurementRecord& record, const TrajectoryOptions& options) {
  record.validate();
  Stepper stepper(model, rho0_hat, record.dt, options, record.steps());
  for (std::size_t k = 0; k < record.steps(); ++k)
    stepper.advance(k, record.increments[k] != 0, stepper.intensity());
  FilterRun run = stepper.finish();
  // Stored times follow the record's own origin.
  for (double& t : run.t) t += record.t0;
  return run;
}

}  // namespace fqf
