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
#include <vector>

#include "fqf/algebra.hpp"
#include "fqf/models.hpp"

namespace fqf {

/// Tolerances on a stored density matrix.
struct StateTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-10;
  double min_eigenvalue = -1e-8;
  double evenness = 1e-10;
};

struct StateDiagnostics {
  double hermiticity = 0.0;     // ||rho - rho*||
  double trace_error = 0.0;     // |tr rho - 1|
  double min_eigenvalue = 0.0;
  double evenness = 0.0;        // ||rho - theta rho theta||

  bool within(const StateTolerances& tol = {}) const noexcept;
};

StateDiagnostics diagnose(const Matrix& rho, std::span<const int> parity_signs);

/// Even, Hermitian, unit-trace, positive density matrix on a composite space.
class ConditionalState {
 public:
  /// Throws InvariantViolation (tagged with `step` when given) if rho fails
  /// any tolerance.
  ConditionalState(Matrix rho, CompositeSpace space, std::optional<std::size_t> step = std::nullopt);

  const Matrix& rho() const noexcept { return rho_; }
  const CompositeSpace& space() const noexcept { return space_; }
  const StateDiagnostics& diagnostics() const noexcept { return diag_; }

  /// |psi><psi| for a basis vector.
  static ConditionalState basis(const CompositeSpace& space, std::size_t index);
  static ConditionalState maximally_mixed(const CompositeSpace& space);

 private:
  Matrix rho_;
  CompositeSpace space_;
  StateDiagnostics diag_;
};

/// -i[H,rho] + D_L(rho) + D_L1(rho) + D_L0(rho), with the channel-1
/// dissipator in occupied-reservoir order L1* rho L1 - {L1 L1*, rho}/2.
Matrix liouvillian_apply(const SystemModel& model, const Matrix& rho);

/// Heisenberg generator -i[X,H] + L(X) + L1^tau(X) + L0^tau(X). Throws
/// MixedParity unless X has definite parity.
Matrix heisenberg_apply(const SystemModel& model, const GradedOperator& x);

Complex expectation(const ConditionalState& state, const GradedOperator& x);
Complex expectation(const Matrix& rho, const Matrix& x);

struct StateSeries {
  std::vector<double> t;
  std::vector<ConditionalState> states;
};

struct MasterOptions {
  /// Keep every `stride`-th state (the initial and final states are always kept).
  std::size_t stride = 1;
  /// Allowed |tr rho_{k+1} - tr rho_k| per step.
  double trace_drift_per_step = 1e-12;
};

/// Fixed-step classical Runge-Kutta integration of the master equation over
/// round(T/dt) steps.
StateSeries evolve_master(const SystemModel& model, const ConditionalState& rho0, double T,
                          double dt, const MasterOptions& options = {});

/// Unique steady state from the null space of the Liouvillian restricted to
/// the even sector. Throws NonUniqueSteadyState when the nullity exceeds one.
ConditionalState steady_state(const SystemModel& model);

/// Vectorised Liouvillian on the even sector (column-stacked over even
/// matrix elements). Exposed for diagnostics and tests.
Matrix even_sector_superoperator(const SystemModel& model);

/// Number of steps of size dt that cover duration T; throws on bad inputs.
std::size_t step_count(double T, double dt);

}  // namespace fqf
