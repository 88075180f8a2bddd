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

#include "fqf/models.hpp"

#include <cmath>
#include <sstream>

#include "fqf/error.hpp"

namespace fqf {

namespace {

constexpr double kModelTolerance = 1e-12;
constexpr std::size_t kMaxModelDim = 64;
constexpr double kExcursionTolerance = 1e-6;

double parity_violation(const GradedOperator& x, Parity wanted) {
  const double scale = x.matrix().norm();
  if (scale == 0.0) return 0.0;
  auto parts = parity_decompose(x);
  const Matrix& wrong = wanted == Parity::even ? parts.odd.matrix() : parts.even.matrix();
  return 2.0 * wrong.norm() / scale;
}

ValidationCheck parity_check(const std::string& name, const GradedOperator& x, Parity wanted) {
  const double v = parity_violation(x, wanted);
  return {name + " is " + to_string(wanted), v <= kModelTolerance, v};
}

ValidationCheck unitary_check(const std::string& name, const GradedOperator& x) {
  const auto d = static_cast<Eigen::Index>(x.dim());
  const double v = (x.matrix().adjoint() * x.matrix() - Matrix::Identity(d, d)).norm();
  return {name + " is unitary", v <= kModelTolerance, v};
}

bool is_identity(const GradedOperator& x) {
  const auto d = static_cast<Eigen::Index>(x.dim());
  return (x.matrix() - Matrix::Identity(d, d)).norm() == 0.0;
}

void require_grid(const MeasurementRecord& record) {
  if (!(record.dt > 0.0) || !std::isfinite(record.dt) || !std::isfinite(record.t0) ||
      record.increments.empty())
    throw Error(ErrorCode::GridMismatch, "record must have dt > 0 and at least one step");
  for (auto dy : record.increments)
    if (dy > 1) throw Error(ErrorCode::GridMismatch, "counting increments must be 0 or 1");
}

}  // namespace

bool ValidationReport::ok() const noexcept {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : checks) {
    if (c.passed) continue;
    os << (first ? "" : "; ") << c.name << " failed (violation " << c.violation << ")";
    first = false;
  }
  if (first) os << "all checks passed";
  return os.str();
}

ValidationReport validate(const SystemModel::Operators& ops) {
  ValidationReport r;
  const double dim_ok = ops.H.dim() <= kMaxModelDim ? 0.0 : static_cast<double>(ops.H.dim());
  r.checks.push_back({"dimension <= 64", dim_ok == 0.0, dim_ok});
  const double herm = (ops.H.matrix() - ops.H.matrix().adjoint()).norm();
  r.checks.push_back({"H is Hermitian", herm <= kModelTolerance * std::max(1.0, ops.H.matrix().norm()), herm});
  r.checks.push_back(unitary_check("S", ops.S));
  r.checks.push_back(unitary_check("S0", ops.S0));
  r.checks.push_back(parity_check("H", ops.H, Parity::even));
  r.checks.push_back(parity_check("S", ops.S, Parity::even));
  r.checks.push_back(parity_check("L", ops.L, Parity::even));
  r.checks.push_back(parity_check("S0", ops.S0, Parity::even));
  r.checks.push_back(parity_check("L0", ops.L0, Parity::odd));
  r.checks.push_back(parity_check("L1", ops.L1, Parity::odd));
  r.filtering_available = ops.L0.matrix().norm() > 0.0;
  return r;
}

SystemModel::SystemModel(std::string name, Operators ops,
                         std::map<std::string, GradedOperator> observables)
    : name_(std::move(name)), ops_(std::move(ops)), observables_(std::move(observables)) {
  for (const GradedOperator* op : {&ops_.S, &ops_.L, &ops_.S0, &ops_.L0, &ops_.L1})
    if (!(op->space() == ops_.H.space()))
      throw Error(ErrorCode::DimensionMismatch, "model operators act on different spaces");
  for (const auto& [key, op] : observables_)
    if (!(op.space() == ops_.H.space()))
      throw Error(ErrorCode::DimensionMismatch, "observable '" + key + "' acts on another space");
  observables_.emplace("I", GradedOperator::identity(ops_.H.space()));

  channels_.boson = ops_.L.matrix().norm() > 0.0 || !is_identity(ops_.S);
  channels_.fermion1 = ops_.L1.matrix().norm() > 0.0;
  channels_.fermion0 = ops_.L0.matrix().norm() > 0.0 || !is_identity(ops_.S0);
  report_ = validate(ops_);

  const Matrix& L = ops_.L.matrix();
  const Matrix& L0 = ops_.L0.matrix();
  const Matrix& L1 = ops_.L1.matrix();
  LdagL_ = L.adjoint() * L;
  L0dagL0_ = L0.adjoint() * L0;
  L1L1dag_ = L1 * L1.adjoint();
  // ||L0||^2 = largest eigenvalue of L0* L0.
  Eigen::SelfAdjointEigenSolver<Matrix> es(L0dagL0_, Eigen::EigenvaluesOnly);
  max_intensity_ = std::max(0.0, es.eigenvalues().maxCoeff());
}

const GradedOperator& SystemModel::observable(const std::string& name) const {
  auto it = observables_.find(name);
  if (it == observables_.end())
    throw Error(ErrorCode::InvalidArgument, "model '" + name_ + "' has no observable '" + name + "'");
  return it->second;
}

void SystemModel::require_valid() const {
  if (!report_.ok())
    throw Error(ErrorCode::InvalidModel, "model '" + name_ + "' failed validation: " + report_.summary());
}

// ---------------------------------------------------------------------------

SystemModel quantum_dot(const DotParams& p) {
  if (!(p.gamma_L >= 0.0) || !(p.gamma_R >= 0.0) || !std::isfinite(p.gamma_L) ||
      !std::isfinite(p.gamma_R) || !(p.gamma_L + p.gamma_R > 0.0))
    throw Error(ErrorCode::InvalidArgument, "dot rates must be finite, >= 0, with gamma_L + gamma_R > 0");
  const auto mode = build_fermion_mode();
  const CompositeSpace& space = mode.c.space();
  const Complex i{0.0, 1.0};
  SystemModel::Operators ops{
      GradedOperator::zero(space),
      GradedOperator::identity(space),
      GradedOperator::zero(space),
      GradedOperator::identity(space),
      (i * std::sqrt(p.gamma_R)) * mode.c,
      (i * std::sqrt(p.gamma_L)) * mode.c,
  };
  return SystemModel("dot", std::move(ops), {{"n", mode.n}, {"c", mode.c}, {"c_dag", mode.c_dag}});
}

DotFilterTrace dot_scalar_filter(const MeasurementRecord& record, const DotParams& p, double n0) {
  require_grid(record);
  if (!(n0 >= 0.0 && n0 <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "initial occupation must lie in [0, 1]");
  const double dt = record.dt;
  DotFilterTrace out;
  out.t.reserve(record.steps() + 1);
  out.n.reserve(record.steps() + 1);
  out.telemetry.reserve(record.steps());
  out.t.push_back(record.time(0));
  out.n.push_back(n0);

  double n = n0;
  for (std::size_t k = 0; k < record.steps(); ++k) {
    const double intensity = p.gamma_R * n;
    StepTelemetry step;
    if (record.increments[k] == 0) {
      step.prediction = n + (p.gamma_L * (1.0 - n) - p.gamma_R * n) * dt;
      step.gain = -n;
      step.innovation = -intensity * dt;
    } else {
      if (intensity < kRatioFloor)
        throw Error(ErrorCode::DegenerateRatio,
                    "count recorded while gamma_R * n_hat = " + format_number(intensity), k);
      // Count: the dt-order terms are dropped and the jump map is applied.
      step.prediction = n;
      step.gain = -n;
      step.innovation = 1.0;
    }
    n = step.prediction + step.gain * step.innovation;
    const double excursion = std::max(-n, n - 1.0);
    if (excursion > kExcursionTolerance) {
      ++out.excursions;
      out.max_excursion = std::max(out.max_excursion, excursion);
    }
    out.telemetry.push_back(step);
    out.t.push_back(record.time(k + 1));
    out.n.push_back(n);
  }
  return out;
}

// ---------------------------------------------------------------------------

SystemModel photodetector(const DetectorParams& p) {
  for (double v : {p.kappa, p.gamma, p.gamma0, p.gamma1})
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, "detector rates must be finite and >= 0");
  const auto atom = build_two_level();
  const auto det = build_three_level(detector_parity_assignment());
  const std::vector<GradedSpace> factors{atom.n.space().factors()[0], det.space()};
  auto A = [&](const GradedOperator& x) { return ampliate(x, 0, factors); };
  auto D = [&](int j, int k) { return ampliate(det.sigma(j, k), 1, factors); };

  const CompositeSpace space(factors);
  const Complex i{0.0, 1.0};
  const double g = std::sqrt(p.kappa * p.gamma);
  const GradedOperator sm = A(atom.lower);
  const GradedOperator sp = A(atom.raise);
  const GradedOperator n = A(atom.n);

  SystemModel::Operators ops{
      (0.5 * i * g) * (D(1, 2) * sp - D(2, 1) * sm),
      GradedOperator::identity(space),
      Complex(std::sqrt(p.kappa)) * sm + Complex(std::sqrt(p.gamma)) * D(1, 2),
      GradedOperator::identity(space),
      Complex(std::sqrt(p.gamma0)) * D(3, 2),
      Complex(std::sqrt(p.gamma1)) * D(3, 1),
  };

  std::map<std::string, GradedOperator> obs{
      {"n", n},
      {"sigma_minus", sm},
      {"sigma_plus", sp},
      {"s12p", D(1, 2) * sp},
      {"s11pm", D(1, 1) * n},
      {"s22pm", D(2, 2) * n},
      {"s33pm", D(3, 3) * n},
  };
  for (int j = 1; j <= 3; ++j)
    for (int k = 1; k <= 3; ++k) obs.emplace("s" + std::to_string(j) + std::to_string(k), D(j, k));
  return SystemModel("photodetector", std::move(ops), std::move(obs));
}

DetectorMoments detector_moments(const SystemModel& model, const Matrix& rho) {
  auto ev = [&](const char* name) { return (rho * model.observable(name).matrix()).trace(); };
  DetectorMoments m;
  m.n = ev("n").real();
  m.s22 = ev("s22").real();
  m.s12p = ev("s12p");
  m.s11pm = ev("s11pm").real();
  m.s22pm = ev("s22pm").real();
  m.s33pm = ev("s33pm").real();
  return m;
}

DetectorFilterTrace photodetector_scalar_filter(const MeasurementRecord& record,
                                                const DetectorParams& p,
                                                const DetectorMoments& initial,
                                                DetectorFilterForm form) {
  require_grid(record);
  const double dt = record.dt;
  const double g = std::sqrt(p.kappa * p.gamma);
  const double s22pm_in_s12p = form == DetectorFilterForm::derived ? g : 0.0;

  DetectorFilterTrace out;
  out.t.reserve(record.steps() + 1);
  out.moments.reserve(record.steps() + 1);
  out.t.push_back(record.time(0));
  out.moments.push_back(initial);

  DetectorMoments m = initial;
  for (std::size_t k = 0; k < record.steps(); ++k) {
    const double intensity = p.gamma0 * m.s22;
    DetectorMoments next;
    if (record.increments[k] == 0) {
      // dW = -intensity dt. Where the innovation gain carries the ratio
      // s22pm / s22 it multiplies gamma0 s22 and is expanded without division.
      next.n = m.n + (-p.kappa * m.n - p.gamma0 * m.s22pm + intensity * m.n) * dt;
      next.s22 = m.s22 + (-(p.gamma + p.gamma0) * m.s22 - g * 2.0 * m.s12p.real() +
                          intensity * m.s22) * dt;
      next.s12p = m.s12p + (-0.5 * (p.kappa + p.gamma + p.gamma0) * m.s12p - g * m.s11pm +
                            s22pm_in_s12p * m.s22pm + intensity * m.s12p) * dt;
      next.s11pm = m.s11pm + (-p.kappa * m.s11pm + p.gamma * m.s22pm + p.gamma1 * m.s33pm +
                              intensity * m.s11pm) * dt;
      next.s22pm = m.s22pm + (-(p.kappa + p.gamma + p.gamma0) * m.s22pm + intensity * m.s22pm) * dt;
      next.s33pm = m.s33pm + (-(p.kappa + p.gamma1) * m.s33pm + p.gamma0 * m.s22pm -
                              p.gamma0 * m.s22pm + intensity * m.s33pm) * dt;
    } else {
      if (intensity < kRatioFloor)
        throw Error(ErrorCode::DegenerateRatio,
                    "count recorded while gamma0 * sigma22_hat = " + format_number(intensity), k);
      const double ratio = m.s22pm / m.s22;
      next.n = ratio;
      next.s22 = 0.0;
      next.s12p = 0.0;
      next.s11pm = 0.0;
      next.s22pm = 0.0;
      next.s33pm = ratio;
    }
    m = next;
    out.t.push_back(record.time(k + 1));
    out.moments.push_back(m);
  }
  return out;
}

}  // namespace fqf
