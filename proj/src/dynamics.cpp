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

#include "fqf/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "fqf/error.hpp"

namespace fqf {

namespace {

const Complex kI{0.0, 1.0};

void require_state_dim(const SystemModel& model, const Matrix& rho) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  if (rho.rows() != d || rho.cols() != d)
    throw Error(ErrorCode::DimensionMismatch,
                "state is " + std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) +
                    " but model '" + model.name() + "' has dim " + std::to_string(d));
}

std::string describe(const StateDiagnostics& d) {
  std::ostringstream os;
  os << "hermiticity " << d.hermiticity << ", trace error " << d.trace_error
     << ", min eigenvalue " << d.min_eigenvalue << ", evenness " << d.evenness;
  return os.str();
}

}  // namespace

bool StateDiagnostics::within(const StateTolerances& tol) const noexcept {
  return hermiticity <= tol.hermiticity && trace_error <= tol.trace &&
         min_eigenvalue >= tol.min_eigenvalue && evenness <= tol.evenness;
}

StateDiagnostics diagnose(const Matrix& rho, std::span<const int> signs) {
  StateDiagnostics d;
  d.hermiticity = (rho - rho.adjoint()).norm();
  d.trace_error = std::abs(rho.trace() - 1.0);
  const Matrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  double odd = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.cols(); ++j)
      if (signs[i] * signs[j] < 0) odd += std::norm(rho(i, j));
  d.evenness = 2.0 * std::sqrt(odd);
  return d;
}

ConditionalState::ConditionalState(Matrix rho, CompositeSpace space, std::optional<std::size_t> step)
    : rho_(std::move(rho)), space_(std::move(space)) {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (rho_.rows() != d || rho_.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, "density matrix does not match its space");
  diag_ = diagnose(rho_, space_.parity_signs());
  if (!diag_.within())
    throw Error(ErrorCode::InvariantViolation, "invalid density matrix: " + describe(diag_), step);
}

ConditionalState ConditionalState::basis(const CompositeSpace& space, std::size_t index) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  if (static_cast<Eigen::Index>(index) >= d)
    throw Error(ErrorCode::IndexOutOfRange, "basis index out of range");
  Matrix rho = Matrix::Zero(d, d);
  rho(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return {std::move(rho), space};
}

ConditionalState ConditionalState::maximally_mixed(const CompositeSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  return {Matrix::Identity(d, d) / static_cast<double>(d), space};
}

Matrix liouvillian_apply(const SystemModel& model, const Matrix& rho) {
  require_state_dim(model, rho);
  const Matrix& H = model.H().matrix();
  const Matrix& L = model.L().matrix();
  const Matrix& L0 = model.L0().matrix();
  const Matrix& L1 = model.L1().matrix();
  Matrix out = -kI * (H * rho - rho * H);
  out.noalias() += L * rho * L.adjoint();
  out.noalias() -= 0.5 * (model.LdagL() * rho + rho * model.LdagL());
  out.noalias() += L1.adjoint() * rho * L1;
  out.noalias() -= 0.5 * (model.L1L1dag() * rho + rho * model.L1L1dag());
  out.noalias() += L0 * rho * L0.adjoint();
  out.noalias() -= 0.5 * (model.L0dagL0() * rho + rho * model.L0dagL0());
  return out;
}

Matrix heisenberg_apply(const SystemModel& model, const GradedOperator& x) {
  require_state_dim(model, x.matrix());
  if (x.parity() == Parity::mixed)
    throw Error(ErrorCode::MixedParity, "heisenberg_apply needs an operator of definite parity");
  const Matrix& X = x.matrix();
  const Matrix tauX = x.parity() == Parity::odd ? Matrix(-X) : X;
  const Matrix& H = model.H().matrix();
  const Matrix& L = model.L().matrix();
  const Matrix& L0 = model.L0().matrix();
  const Matrix& L1 = model.L1().matrix();
  Matrix out = -kI * (X * H - H * X);
  out.noalias() += L.adjoint() * X * L;
  out.noalias() -= 0.5 * (X * model.LdagL() + model.LdagL() * X);
  out.noalias() += L1 * tauX * L1.adjoint();
  out.noalias() -= 0.5 * (X * model.L1L1dag() + model.L1L1dag() * X);
  out.noalias() += L0.adjoint() * tauX * L0;
  out.noalias() -= 0.5 * (X * model.L0dagL0() + model.L0dagL0() * X);
  return out;
}

Complex expectation(const Matrix& rho, const Matrix& x) {
  if (rho.rows() != x.rows() || rho.cols() != x.cols())
    throw Error(ErrorCode::DimensionMismatch, "expectation: state and observable dims differ");
  // tr(rho X) without forming the product.
  return (rho.transpose().array() * x.array()).sum();
}

Complex expectation(const ConditionalState& state, const GradedOperator& x) {
  if (!(state.space() == x.space()))
    throw Error(ErrorCode::DimensionMismatch, "expectation: state and observable spaces differ");
  // Odd operators have zero mean on even states: the even/odd blocks of
  // rho and X do not overlap, so only the even part of X contributes.
  if (x.parity() == Parity::odd) return {0.0, 0.0};
  return expectation(state.rho(), x.matrix());
}

std::size_t step_count(double T, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw Error(ErrorCode::InvalidArgument, "dt must be positive and finite");
  if (!(T >= dt) || !std::isfinite(T))
    throw Error(ErrorCode::InvalidArgument, "T must be finite and >= dt");
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-6 * std::max(1.0, n))
    throw Error(ErrorCode::InvalidArgument, "T must be an integer multiple of dt");
  return static_cast<std::size_t>(n);
}

StateSeries evolve_master(const SystemModel& model, const ConditionalState& rho0, double T,
                          double dt, const MasterOptions& options) {
  model.require_valid();
  require_state_dim(model, rho0.rho());
  const std::size_t steps = step_count(T, dt);
  const std::size_t stride = std::max<std::size_t>(1, options.stride);

  StateSeries out;
  out.t.push_back(0.0);
  out.states.push_back(rho0);
  out.t.reserve(steps / stride + 2);
  out.states.reserve(steps / stride + 2);

  Matrix rho = rho0.rho();
  Complex trace = rho.trace();
  for (std::size_t k = 1; k <= steps; ++k) {
    const Matrix k1 = liouvillian_apply(model, rho);
    const Matrix k2 = liouvillian_apply(model, rho + 0.5 * dt * k1);
    const Matrix k3 = liouvillian_apply(model, rho + 0.5 * dt * k2);
    const Matrix k4 = liouvillian_apply(model, rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const Complex next_trace = rho.trace();
    if (std::abs(next_trace - trace) > options.trace_drift_per_step)
      throw Error(ErrorCode::InvariantViolation,
                  "trace drifted by " + std::to_string(std::abs(next_trace - trace)) + " in one step", k);
    trace = next_trace;

    ConditionalState state(rho, model.space(), k);
    if (k % stride == 0 || k == steps) {
      out.t.push_back(static_cast<double>(k) * dt);
      out.states.push_back(std::move(state));
    }
  }
  return out;
}

Matrix even_sector_superoperator(const SystemModel& model) {
  const auto signs = model.space().parity_signs();
  const auto d = static_cast<Eigen::Index>(signs.size());
  std::vector<std::pair<Eigen::Index, Eigen::Index>> even;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      if (signs[i] * signs[j] > 0) even.emplace_back(i, j);
  const auto m = static_cast<Eigen::Index>(even.size());
  Matrix super(m, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    Matrix e = Matrix::Zero(d, d);
    e(even[c].first, even[c].second) = 1.0;
    const Matrix image = liouvillian_apply(model, e);
    for (Eigen::Index r = 0; r < m; ++r) super(r, c) = image(even[r].first, even[r].second);
  }
  return super;
}

ConditionalState steady_state(const SystemModel& model) {
  model.require_valid();
  const Matrix super = even_sector_superoperator(model);
  Eigen::JacobiSVD<Matrix> svd(super, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-9 * std::max(1.0, sv(0));
  Eigen::Index nullity = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= cutoff) ++nullity;
  if (nullity > 1)
    throw Error(ErrorCode::NonUniqueSteadyState,
                "Liouvillian null space on the even sector has dimension " + std::to_string(nullity));

  const Eigen::VectorXcd v = svd.matrixV().col(sv.size() - 1);
  const auto signs = model.space().parity_signs();
  const auto d = static_cast<Eigen::Index>(signs.size());
  Matrix rho = Matrix::Zero(d, d);
  Eigen::Index idx = 0;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      if (signs[i] * signs[j] > 0) rho(i, j) = v(idx++);
  rho = 0.5 * (rho + rho.adjoint());
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-300)
    throw Error(ErrorCode::NonUniqueSteadyState, "null vector has zero trace");
  rho /= tr;
  rho = 0.5 * (rho + rho.adjoint());
  const double residual = liouvillian_apply(model, rho).norm();
  if (residual > 1e-10)
    throw Error(ErrorCode::InvariantViolation,
                "steady-state residual " + format_number(residual) + " exceeds 1e-10");
  return {std::move(rho), model.space()};
}

}  // namespace fqf
