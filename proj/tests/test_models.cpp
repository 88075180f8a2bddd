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

#include <cmath>
#include <random>

#include "doctest.h"
#include "fqf/dynamics.hpp"
#include "fqf/error.hpp"
#include "fqf/models.hpp"
#include "fqf/stochastics.hpp"

using namespace fqf;

namespace {

MeasurementRecord zeros(std::size_t steps, double dt) {
  MeasurementRecord r;
  r.dt = dt;
  r.increments.assign(steps, 0);
  return r;
}

const ValidationCheck* find_check(const ValidationReport& r, const std::string& needle) {
  for (const auto& c : r.checks)
    if (c.name.find(needle) != std::string::npos) return &c;
  return nullptr;
}

// Random even density matrix on the model's space.
Matrix random_state(const SystemModel& model, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  const auto d = static_cast<Eigen::Index>(model.dim());
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = {g(gen), g(gen)};
  Matrix rho = a * a.adjoint();
  const Matrix th = model.space().theta();
  rho = 0.5 * (rho + th * rho * th);
  return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("validation report") {
  const auto dot = quantum_dot({1.0, 2.0});
  CHECK(dot.report().ok());
  CHECK(dot.report().filtering_available);
  CHECK_NOTHROW(dot.require_valid());

  const auto mode = build_fermion_mode();
  const auto space = mode.c.space();
  const auto id = GradedOperator::identity(space);
  const auto zero = GradedOperator::zero(space);

  // L0 := c* c is even.
  SystemModel even_l0("bad", {zero, id, zero, id, mode.n, zero});
  CHECK_FALSE(even_l0.report().ok());
  const auto* l0 = find_check(even_l0.report(), "L0");
  REQUIRE(l0 != nullptr);
  CHECK_FALSE(l0->passed);
  try {
    even_l0.require_valid();
    FAIL("expected InvalidModel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidModel);
  }

  // H := c is not Hermitian (and odd).
  SystemModel bad_h("bad", {mode.c, id, zero, id, mode.c, zero});
  const auto* herm = find_check(bad_h.report(), "Hermitian");
  REQUIRE(herm != nullptr);
  CHECK_FALSE(herm->passed);
  CHECK(herm->violation > 0.5);

  // Non-unitary scattering.
  SystemModel bad_s("bad", {zero, 2.0 * id, zero, id, mode.c, zero});
  CHECK_FALSE(bad_s.report().ok());
  CHECK(bad_s.report().summary().find("failed") != std::string::npos);

  const auto source_only = quantum_dot({1.0, 0.0});
  CHECK(source_only.report().ok());
  CHECK_FALSE(source_only.report().filtering_available);
}

TEST_CASE("quantum dot preset") {
  const auto dot = quantum_dot({1.0, 2.0});
  CHECK(dot.dim() == 2);
  CHECK(dot.space().has_fermionic_grading());
  CHECK(norm(dot.H().matrix()) == 0.0);
  CHECK(dot.L0().parity() == Parity::odd);
  CHECK(dot.L1().parity() == Parity::odd);
  // tr(L0 rho L0*) = gamma_R <n> by 2x2 arithmetic.
  Matrix rho(2, 2);
  rho << 0.6, 0, 0, 0.4;
  CHECK(jump_intensity(dot, rho) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(dot.max_intensity() == doctest::Approx(2.0));
  CHECK_THROWS_AS(quantum_dot({-1.0, 1.0}), Error);
  CHECK_THROWS_AS(quantum_dot({0.0, 0.0}), Error);

  // gamma_L = 0: the dot empties, <n>(20) < 1e-8.
  const auto drain = quantum_dot({0.0, 1.0});
  const auto s = evolve_master(drain, ConditionalState::basis(drain.space(), 1), 20.0, 1e-2);
  CHECK(expectation(s.states.back(), drain.observable("n")).real() < 1e-8);
}

TEST_CASE("photodetector preset") {
  const DetectorParams p{0.7, 1.3, 0.9, 0.4};
  const auto m = photodetector(p);
  CHECK(m.dim() == 6);
  CHECK(m.report().ok());
  CHECK(norm(m.H().matrix() - m.H().matrix().adjoint()) <= 1e-15);
  CHECK(m.L().parity() == Parity::even);
  CHECK(m.L0().parity() == Parity::odd);
  CHECK(m.L1().parity() == Parity::odd);
  CHECK(m.observable("sigma_minus").parity() == Parity::even);
  CHECK(m.observable("s32").parity() == Parity::odd);
  CHECK(m.observable("s12p").parity() == Parity::even);
  CHECK_THROWS_AS(m.observable("nope"), Error);

  const auto silent = photodetector({1.0, 1.0, 0.0, 1.0});
  CHECK_FALSE(silent.report().filtering_available);
  const auto rho = ConditionalState::maximally_mixed(silent.space());
  CHECK(jump_intensity(silent, rho) == 0.0);
}

TEST_CASE("dot scalar filter: no counts, source off") {
  // dY = 0, gamma_L = 0, gamma_R = 1: dn = (-n + n^2) dt. With n0 = 1/2 the
  // continuous solution is 1 / (1 + e^t); the Euler recursion is the oracle
  // for the discrete values.
  const double dt = 1e-3;
  const auto rec = zeros(2000, dt);
  const auto tr = dot_scalar_filter(rec, {0.0, 1.0}, 0.5);
  double n = 0.5, gap_continuous = 0.0;
  for (std::size_t k = 0; k < rec.steps(); ++k) {
    n += (-n + n * n) * dt;
    CHECK(tr.n[k + 1] == doctest::Approx(n).epsilon(1e-14));
    gap_continuous = std::max(gap_continuous, std::abs(tr.n[k + 1] - 1.0 / (1.0 + std::exp(tr.t[k + 1]))));
  }
  CHECK(gap_continuous < dt);
  CHECK(tr.excursions == 0);
  // n0 = 1 is a fixed point: an occupied dot that never emits stays occupied.
  const auto full = dot_scalar_filter(rec, {0.0, 1.0}, 1.0);
  CHECK(full.n.back() == 1.0);
}

TEST_CASE("dot scalar filter: counts and limits") {
  const double dt = 1e-3;
  auto rec = zeros(10, dt);
  rec.increments[3] = 1;
  const DotParams p{1.0, 2.0};
  const auto tr = dot_scalar_filter(rec, p, 0.7);
  // Detection empties the dot; the literal increment n (1 - gamma_R n dt) differs by gamma_R n^2 dt.
  const double before = tr.n[3];
  CHECK(tr.n[4] == 0.0);
  CHECK(std::abs(tr.n[4] - (before - before * (1.0 - p.gamma_R * before * dt))) <= p.gamma_R * dt);

  // gamma_R = 0: dn = gamma_L (1 - n) dt, Euler solution 1 - (1 - n0)(1 - gamma_L dt)^k.
  const auto det = dot_scalar_filter(zeros(500, dt), {1.5, 0.0}, 0.2);
  for (std::size_t k = 0; k < det.n.size(); k += 50)
    CHECK(det.n[k] == doctest::Approx(1.0 - 0.8 * std::pow(1.0 - 1.5 * dt, static_cast<double>(k))).epsilon(1e-12));

  // Telemetry: estimate = prediction + gain * innovation on every step.
  for (std::size_t k = 0; k < tr.telemetry.size(); ++k) {
    const auto& s = tr.telemetry[k];
    CHECK(tr.n[k + 1] == s.prediction + s.gain * s.innovation);
  }

  // A count at zero occupation is a record/model mismatch.
  auto bad = zeros(3, dt);
  bad.increments[0] = 1;
  try {
    dot_scalar_filter(bad, {0.0, 1.0}, 0.0);
    FAIL("expected DegenerateRatio");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateRatio);
    CHECK(e.step().value() == 0);
  }
  auto broken = zeros(3, 0.0);
  try {
    dot_scalar_filter(broken, p, 0.5);
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridMismatch);
  }
  CHECK_THROWS_AS(dot_scalar_filter(rec, p, 1.5), Error);
}

TEST_CASE("photodetector scalar filter: decoupled detector decays") {
  const double dt = 1e-3;
  DetectorMoments m0;
  m0.n = 1.0;
  m0.s11pm = 1.0;
  const auto tr = photodetector_scalar_filter(zeros(5000, dt), {1.0, 0.0, 0.0, 0.0}, m0);
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    CHECK(tr.moments[k].n == doctest::Approx(std::pow(1.0 - dt, static_cast<double>(k))).epsilon(1e-12));
    worst = std::max(worst, std::abs(tr.moments[k].n - std::exp(-tr.t[k])));
  }
  // Euler error of dn = -n dt is t e^{-t} dt / 2 <= dt / (2e) to leading order.
  CHECK(worst <= (1.0 + 2.0 * dt) * dt / (2.0 * std::exp(1.0)));
  CHECK(worst >= (1.0 - 2.0 * dt) * dt / (2.0 * std::exp(1.0)));
}

TEST_CASE("photodetector scalar filter: product state keeps the ratio finite") {
  const DetectorParams p{1.0, 1.0, 1.0, 1.0};
  const auto model = photodetector(p);
  // Atom excited with probability 0.4, detector in level 2 with probability 0.5.
  Matrix atom = Matrix::Zero(2, 2), det = Matrix::Zero(3, 3);
  atom(0, 0) = 0.6;
  atom(1, 1) = 0.4;
  det(0, 0) = 0.3;
  det(1, 1) = 0.5;
  det(2, 2) = 0.2;
  Matrix rho(6, 6);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) rho.block(3 * a, 3 * b, 3, 3) = atom(a, b) * det;
  const auto m0 = detector_moments(model, rho);
  CHECK(m0.s22pm == doctest::Approx(m0.s22 * m0.n));
  const auto tr = photodetector_scalar_filter(zeros(3000, 1e-3), p, m0);
  for (const auto& m : tr.moments) {
    REQUIRE(m.s22 > 0.0);
    const double ratio = m.s22pm / m.s22;
    CHECK(std::isfinite(ratio));
    CHECK(ratio >= -1e-12);
    CHECK(ratio <= 1.0 + 1e-12);
  }
}

TEST_CASE("photodetector scalar filter matches the matrix map step by step") {
  // Independent check of the closed six-equation system: from random even
  // states, one scalar step must equal the moments of one matrix step.
  const DetectorParams p{0.8, 1.2, 0.9, 0.6};
  const auto model = photodetector(p);
  std::mt19937_64 gen(99);
  const double dt = 1e-3;
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix rho = random_state(model, gen);
    const ConditionalState s(rho, model.space());
    const auto m0 = detector_moments(model, rho);
    for (std::uint8_t dy : {std::uint8_t{0}, std::uint8_t{1}}) {
      MeasurementRecord rec;
      rec.dt = dt;
      rec.increments = {dy};
      const auto scalar = photodetector_scalar_filter(rec, p, m0).moments.back();
      const Matrix next = dy ? jump_apply(model, s).rho() : no_jump_step(model, s, dt).rho();
      const auto want = detector_moments(model, next);
      CHECK(std::abs(scalar.n - want.n) <= 1e-13);
      CHECK(std::abs(scalar.s22 - want.s22) <= 1e-13);
      CHECK(std::abs(scalar.s12p - want.s12p) <= 1e-13);
      CHECK(std::abs(scalar.s11pm - want.s11pm) <= 1e-13);
      CHECK(std::abs(scalar.s22pm - want.s22pm) <= 1e-13);
      CHECK(std::abs(scalar.s33pm - want.s33pm) <= 1e-13);

      // The form without the sqrt(kappa gamma) sigma22+- term misses the
      // sigma12+ drift by exactly that amount.
      const auto printed =
          photodetector_scalar_filter(rec, p, m0, DetectorFilterForm::as_printed).moments.back();
      if (dy == 0)
        CHECK(std::abs(printed.s12p - want.s12p) ==
              doctest::Approx(std::sqrt(p.kappa * p.gamma) * m0.s22pm * dt).epsilon(1e-6));
    }
  }
}

TEST_CASE("photodetector scalar filter on a simulated record") {
  const DetectorParams p{1.0, 1.0, 1.0, 1.0};
  const auto model = photodetector(p);
  const auto rho0 = ConditionalState::maximally_mixed(model.space());
  TrajectoryOptions opts;
  std::vector<DetectorMoments> matrix;
  opts.store_states = false;
  opts.observer = [&](std::size_t, const Matrix& rho) { matrix.push_back(detector_moments(model, rho)); };
  const auto sim = simulate_record(model, rho0, 5.0, 1e-3, 3, 0, opts);
  const auto m0 = detector_moments(model, rho0.rho());
  const auto derived = photodetector_scalar_filter(sim.record, p, m0);
  const auto printed = photodetector_scalar_filter(sim.record, p, m0, DetectorFilterForm::as_printed);
  double gap_derived = 0.0, gap_printed = 0.0;
  for (std::size_t k = 0; k < matrix.size(); ++k) {
    gap_derived = std::max(gap_derived, std::abs(derived.moments[k].s12p - matrix[k].s12p));
    gap_printed = std::max(gap_printed, std::abs(printed.moments[k].s12p - matrix[k].s12p));
  }
  CHECK(gap_derived <= 1e-8);
  CHECK(gap_printed > 1e-3);

  MeasurementRecord bad;
  bad.dt = 1e-3;
  bad.increments = {1};
  DetectorMoments empty;
  empty.s11pm = 1.0;
  try {
    photodetector_scalar_filter(bad, p, empty);
    FAIL("expected DegenerateRatio");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateRatio);
  }
}
