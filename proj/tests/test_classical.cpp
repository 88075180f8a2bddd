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
#include <numeric>

#include "doctest.h"
#include "fqf/classical.hpp"
#include "fqf/error.hpp"

using namespace fqf;

namespace {

ClassicalRecord zero_record(double T, double dt) {
  ClassicalRecord r;
  r.dt = dt;
  r.increments.assign(static_cast<std::size_t>(std::llround(T / dt)), 0.0);
  return r;
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double se_mean = 0.0;
  double se_var = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  Moments m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = (x - m.mean) * (x - m.mean);
    m.var += d;
    m4 += d * d;
  }
  m.var /= n - 1.0;
  m4 /= n;
  m.se_mean = std::sqrt(m.var / n);
  m.se_var = std::sqrt(std::max(m4 - m.var * m.var, 0.0) / n);
  return m;
}

}  // namespace

TEST_CASE("stationary Kalman variance") {
  CHECK(kalman_stationary_variance(-1.0, 1.0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
  CHECK(kalman_stationary_variance(1.0, 1.0) == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-14));
  CHECK(kalman_stationary_variance(-2.0, 0.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(kalman_stationary_variance(0.0, 0.0), Error);
  // Root of 2 a S + 1 - c^2 S^2 = 0.
  for (double a : {-3.0, -0.5, 0.0, 0.7})
    for (double c : {0.3, 1.0, 2.5}) {
      const double s = kalman_stationary_variance(a, c);
      CHECK(std::abs(2.0 * a * s + 1.0 - c * c * s * s) <= 1e-12 * std::max(1.0, s * s));
      CHECK(s > 0.0);
    }
}

TEST_CASE("Kalman variance approaches the stationary value") {
  const LinearGaussianModel m{-1.0, 1.0, 0.0, 1.0, true};
  const auto tr = kalman_run(m, zero_record(10.0, 1e-3));
  CHECK(std::abs(tr.variance.back() - (std::sqrt(2.0) - 1.0)) <= 1e-6);
}

TEST_CASE("Kalman with a blind sensor propagates the prior") {
  // c = 0: the mean follows xi_hat (1 + a dt)^k exactly whatever the record says.
  const LinearGaussianModel m{-0.5, 0.0, 2.0, 1.0, true};
  auto rec = zero_record(1.0, 1e-2);
  for (std::size_t k = 0; k < rec.steps(); ++k) rec.increments[k] = std::sin(static_cast<double>(k));
  const auto tr = kalman_run(m, rec);
  for (std::size_t k = 0; k < tr.mean.size(); ++k)
    CHECK(tr.mean[k] == doctest::Approx(2.0 * std::pow(1.0 - 0.5e-2, static_cast<double>(k))).epsilon(1e-12));
}

TEST_CASE("Kalman variance does not depend on the record") {
  const LinearGaussianModel m{-1.0, 1.5, 0.0, 2.0, true};
  const auto a = kalman_run(m, simulate_linear(m, 3.0, 1e-3, 1).record);
  const auto b = kalman_run(m, simulate_linear(m, 3.0, 1e-3, 2).record);
  CHECK(a.variance == b.variance);
  CHECK(a.mean != b.mean);
  for (std::size_t k = 0; k < a.telemetry.size(); ++k) {
    const auto& s = a.telemetry[k];
    CHECK(a.mean[k + 1] == s.prediction + s.gain * s.innovation);
  }
}

TEST_CASE("Kalman rejects malformed records") {
  const LinearGaussianModel m{-1.0, 1.0, 0.0, 1.0, true};
  ClassicalRecord empty;
  empty.dt = 1e-3;
  try {
    kalman_run(m, empty);
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridMismatch);
  }
  auto bad = zero_record(1.0, 1e-3);
  bad.dt = -1.0;
  CHECK_THROWS_AS(kalman_run(m, bad), Error);
}

TEST_CASE("linear signal statistics") {
  const double dt = 1e-2;
  const std::size_t paths = 2000;
  SUBCASE("blind observation is a Wiener process") {
    const LinearGaussianModel m{-1.0, 0.0, 0.0, 1.0, true};
    std::vector<double> y;
    for (std::size_t s = 0; s < paths; ++s) {
      const auto p = simulate_linear(m, 1.0, dt, 1000 + s);
      y.push_back(std::accumulate(p.record.increments.begin(), p.record.increments.end(), 0.0));
    }
    const auto mo = moments(y);
    CHECK(std::abs(mo.mean) <= 3.0 * mo.se_mean);
    CHECK(std::abs(mo.var - 1.0) <= 3.0 * mo.se_var);
  }
  SUBCASE("signal variance follows the Lyapunov equation") {
    // Euler recursion: G_{k+1} = (1 + a dt)^2 G_k + dt.
    const double a = -1.0;
    const LinearGaussianModel m{a, 1.0, 0.5, 0.3, true};
    std::vector<double> xi;
    for (std::size_t s = 0; s < paths; ++s) xi.push_back(simulate_linear(m, 2.0, dt, 5000 + s).xi.back());
    double g = 0.3, mean = 0.5;
    for (int k = 0; k < 200; ++k) {
      g = (1.0 + a * dt) * (1.0 + a * dt) * g + dt;
      mean *= 1.0 + a * dt;
    }
    const auto mo = moments(xi);
    CHECK(std::abs(mo.mean - mean) <= 3.0 * mo.se_mean);
    CHECK(std::abs(mo.var - g) <= 3.0 * mo.se_var);
  }
  SUBCASE("no process noise keeps a constant signal constant") {
    const LinearGaussianModel m{0.0, 1.0, 1.5, 0.0, false};
    const auto p = simulate_linear(m, 1.0, dt, 3);
    for (double x : p.xi) CHECK(x == 1.5);
  }
}

TEST_CASE("Kalman mean-square error matches its variance") {
  const LinearGaussianModel m{-1.0, 1.0, 0.0, 1.0, true};
  const double dt = 1e-2;
  std::vector<double> sq;
  double sigma = 0.0;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const auto p = simulate_linear(m, 3.0, dt, 90000 + s);
    const auto tr = kalman_run(m, p.record);
    const double e = tr.mean.back() - p.xi.back();
    sq.push_back(e * e);
    sigma = tr.variance.back();
  }
  const auto mo = moments(sq);
  // The Euler filter is optimal only up to O(dt).
  CHECK(std::abs(mo.mean - sigma) <= 3.0 * mo.se_mean + 5.0 * dt * sigma);
}

TEST_CASE("grid density basics") {
  const auto g = GridDensity::gaussian(-10.0, 10.0, 801, 1.0, 2.0);
  CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-14));
  // The truncated upper tail (about 1e-10 of mass at |x| ~ 10) shifts both.
  CHECK(std::abs(g.mean() - 1.0) <= 1e-8);
  CHECK(std::abs(g.variance() - 2.0) <= 1e-7);
  CHECK(g.boundary_mass() < 1e-6);
  CHECK_THROWS_AS(GridDensity(0.0, 1.0, 2, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(GridDensity::gaussian(0.0, 1.0, 11, 0.5, 0.0), Error);
}

TEST_CASE("grid filter without observations solves the forward equation") {
  const auto p0 = GridDensity::gaussian(-10.0, 10.0, 801, 0.0, 1.0);
  const auto zero = [](double) { return 0.0; };
  SUBCASE("pure diffusion: variance grows linearly") {
    const auto tr = ks_grid_run({zero, zero}, zero_record(1.0, 1e-2), p0);
    for (std::size_t k = 0; k < tr.t.size(); ++k)
      CHECK(std::abs(tr.variance[k] - tr.variance[0] - tr.t[k]) <= 1e-6);
    CHECK(tr.max_normalization_error <= 1e-12);
    CHECK(tr.min_value >= 0.0);
    CHECK(tr.substeps >= 1);
  }
  SUBCASE("Ornstein-Uhlenbeck relaxation") {
    const auto tr = ks_grid_run({[](double x) { return -x; }, zero}, zero_record(2.0, 1e-2), p0);
    for (std::size_t k = 0; k < tr.t.size(); k += 20) {
      const double want = 0.5 + 0.5 * std::exp(-2.0 * tr.t[k]);
      CHECK(std::abs(tr.variance[k] - want) <= 1e-3);
      CHECK(std::abs(tr.mean[k]) <= 1e-12);
    }
  }
}

TEST_CASE("grid filter agrees with Kalman on a linear model") {
  const LinearGaussianModel m{-1.0, 1.0, 0.0, 1.0, true};
  const auto path = simulate_linear(m, 5.0, 1e-3, 77);
  const auto kf = kalman_run(m, path.record);
  KsOptions opts;
  opts.snapshot_times = {1.0, 5.0};
  const auto ks = ks_grid_run({[](double x) { return -x; }, [](double x) { return x; }}, path.record,
                              GridDensity::gaussian(-10.0, 10.0, 801, 0.0, 1.0), opts);
  double sup = 0.0;
  for (std::size_t k = 0; k < ks.mean.size(); ++k) sup = std::max(sup, std::abs(ks.mean[k] - kf.mean[k]));
  CHECK(sup <= 1e-2);
  CHECK(std::abs(ks.variance.back() - kf.variance.back()) <= 1e-2);
  REQUIRE(ks.snapshots.size() == 2);
  CHECK(ks.snapshots[0].first == doctest::Approx(1.0));
  CHECK(ks.snapshots[1].second.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ks.innovations.size() == path.record.steps());
}

TEST_CASE("grid filter reports mass reaching the boundary") {
  const auto zero = [](double) { return 0.0; };
  try {
    ks_grid_run({zero, zero}, zero_record(2.0, 1e-2), GridDensity::gaussian(-2.0, 2.0, 81, 0.0, 0.1));
    FAIL("expected BoundaryMassLeak");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundaryMassLeak);
    CHECK(e.step().has_value());
  }
  CHECK_THROWS_AS(ks_grid_run({nullptr, zero}, zero_record(1.0, 1e-2),
                              GridDensity::gaussian(-5.0, 5.0, 101, 0.0, 1.0)),
                  Error);
}

TEST_CASE("grid filter stays positive under a stiff cubic drift") {
  // g = -x - x^3 reaches |g| dx >> 1 near the edges. The stationary density of
  // d xi = g dt + dV is proportional to exp(-x^2 - x^4 / 2).
  const auto zero = [](double) { return 0.0; };
  const auto tr = ks_grid_run({[](double x) { return -x - x * x * x; }, zero}, zero_record(6.0, 1e-2),
                              GridDensity::gaussian(-6.0, 6.0, 401, 1.0, 0.5));
  CHECK(tr.min_value >= 0.0);
  CHECK(tr.max_normalization_error <= 1e-12);
  double z = 0.0, m2 = 0.0;
  for (int i = -60000; i <= 60000; ++i) {
    const double x = i * 1e-4, w = std::exp(-x * x - 0.5 * x * x * x * x);
    z += w;
    m2 += x * x * w;
  }
  CHECK(std::abs(tr.variance.back() - m2 / z) <= 1e-3);
  CHECK(std::abs(tr.mean.back()) <= 1e-3);
}
