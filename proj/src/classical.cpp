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

#include "fqf/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fqf/error.hpp"
#include "fqf/rng.hpp"

namespace fqf {

namespace {

void require_grid(const ClassicalRecord& record) {
  if (!(record.dt > 0.0) || !std::isfinite(record.dt) || !std::isfinite(record.t0) ||
      record.increments.empty())
    throw Error(ErrorCode::GridMismatch, "record must have dt > 0 and at least one step");
}

}  // namespace

LinearPath simulate_linear(const LinearGaussianModel& model, double T, double dt, std::uint64_t seed) {
  if (!(dt > 0.0) || !(T >= dt)) throw Error(ErrorCode::InvalidArgument, "need dt > 0 and T >= dt");
  if (!(model.xi0_var >= 0.0)) throw Error(ErrorCode::InvalidArgument, "xi0_var must be >= 0");
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  const KeyedStream increments(seed, 0);
  const KeyedStream initial(seed, 1);
  const double sqrt_dt = std::sqrt(dt);

  LinearPath out;
  out.record.dt = dt;
  out.record.seed = seed;
  out.record.increments.reserve(steps);
  out.t.reserve(steps + 1);
  out.xi.reserve(steps + 1);

  double xi = model.xi0_mean + std::sqrt(model.xi0_var) * initial.normal_pair(0)[0];
  out.t.push_back(0.0);
  out.xi.push_back(xi);
  for (std::size_t k = 0; k < steps; ++k) {
    const auto [w1, w2] = increments.normal_pair(k);
    out.record.increments.push_back(model.c * xi * dt + sqrt_dt * w2);
    xi += model.a * xi * dt + (model.process_noise ? sqrt_dt * w1 : 0.0);
    out.t.push_back(static_cast<double>(k + 1) * dt);
    out.xi.push_back(xi);
  }
  return out;
}

KalmanTrace kalman_run(const LinearGaussianModel& model, const ClassicalRecord& record) {
  require_grid(record);
  const double dt = record.dt;
  const double q = model.process_noise ? 1.0 : 0.0;
  KalmanTrace out;
  out.t.push_back(record.time(0));
  out.mean.push_back(model.xi0_mean);
  out.variance.push_back(model.xi0_var);

  double mean = model.xi0_mean;
  double var = model.xi0_var;
  for (std::size_t k = 0; k < record.steps(); ++k) {
    StepTelemetry step;
    step.prediction = mean + model.a * mean * dt;
    step.gain = model.c * var;
    step.innovation = record.increments[k] - model.c * mean * dt;
    mean = step.prediction + step.gain * step.innovation;
    var += (2.0 * model.a * var + q - model.c * model.c * var * var) * dt;
    out.telemetry.push_back(step);
    out.t.push_back(record.time(k + 1));
    out.mean.push_back(mean);
    out.variance.push_back(var);
  }
  return out;
}

double kalman_stationary_variance(double a, double c) {
  if (c == 0.0) {
    if (!(a < 0.0)) throw Error(ErrorCode::InvalidArgument, "no stationary variance for c = 0, a >= 0");
    return -1.0 / (2.0 * a);
  }
  return (a + std::sqrt(a * a + c * c)) / (c * c);
}

// ---------------------------------------------------------------------------

GridDensity::GridDensity(double x_min, double x_max, std::size_t nx, std::vector<double> values)
    : x_min_(x_min), x_max_(x_max), values_(std::move(values)) {
  if (nx < 3 || values_.size() != nx || !(x_max > x_min))
    throw Error(ErrorCode::InvalidArgument, "grid needs nx >= 3 values on x_min < x_max");
}

GridDensity GridDensity::gaussian(double x_min, double x_max, std::size_t nx, double mean, double var) {
  if (!(var > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid Gaussian needs var > 0");
  std::vector<double> v(nx);
  const double dx = (x_max - x_min) / static_cast<double>(nx - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = x_min + static_cast<double>(i) * dx;
    v[i] = std::exp(-0.5 * (x - mean) * (x - mean) / var);
    sum += v[i];
  }
  for (double& p : v) p /= sum * dx;
  return {x_min, x_max, nx, std::move(v)};
}

double GridDensity::mass() const noexcept {
  double s = 0.0;
  for (double p : values_) s += p;
  return s * dx();
}

double GridDensity::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += f(x(i)) * values_[i];
  return s * dx();
}

double GridDensity::mean() const {
  return integrate([](double x) { return x; });
}

double GridDensity::variance() const {
  const double m = mean();
  return integrate([m](double x) { return (x - m) * (x - m); });
}

double GridDensity::boundary_mass() const noexcept {
  return dx() * (std::abs(values_.front()) + std::abs(values_.back()));
}

double GridDensity::min_value() const noexcept {
  return *std::min_element(values_.begin(), values_.end());
}

KsTrace ks_grid_run(const NonlinearModel& model, const ClassicalRecord& record,
                    const GridDensity& initial, const KsOptions& options) {
  require_grid(record);
  if (!model.g || !model.h) throw Error(ErrorCode::InvalidArgument, "g and h must be set");
  const std::size_t nx = initial.nx();
  const double dx = initial.dx();
  const double dt = record.dt;

  // Drift at cell faces and h at nodes are fixed; tabulate once. Each face
  // flux is w_left * v_i + w_right * v_{i+1}. Central weights keep the
  // explicit update monotone only while |g| dx <= 1; stiffer faces go upwind.
  std::vector<double> w_left(nx - 1), w_right(nx - 1), h_node(nx);
  const double diff = 0.5 / dx;
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    const double g = model.g(initial.x(i) + 0.5 * dx);
    if (!std::isfinite(g)) throw Error(ErrorCode::InvalidArgument, "drift is not finite on the grid");
    if (std::abs(g) * dx <= 1.0) {
      w_left[i] = 0.5 * g + diff;
      w_right[i] = 0.5 * g - diff;
    } else {
      w_left[i] = std::max(g, 0.0) + diff;
      w_right[i] = std::min(g, 0.0) - diff;
    }
  }
  for (std::size_t i = 0; i < nx; ++i) h_node[i] = model.h(initial.x(i));

  // Outflow rate of node i; half its inverse bounds the substep (dx^2 / 2
  // for a pure diffusion).
  double max_rate = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    double out = 0.0;
    if (i + 1 < nx) out += w_left[i];
    if (i > 0) out -= w_right[i - 1];
    max_rate = std::max(max_rate, out / dx);
  }
  const double h_sub = 0.5 / max_rate;
  const auto substeps = static_cast<std::size_t>(std::ceil(dt / h_sub - 1e-12));
  const double sub_dt = dt / static_cast<double>(substeps);

  KsTrace out;
  out.substeps = substeps;
  GridDensity p = initial;
  auto& v = p.values();
  std::vector<double> flux(nx + 1, 0.0);
  std::vector<double> snapshot_times = options.snapshot_times;
  std::sort(snapshot_times.begin(), snapshot_times.end());
  std::size_t next_snapshot = 0;

  auto record_state = [&](std::size_t k) {
    const double t = record.time(k);
    out.t.push_back(t);
    out.mean.push_back(p.mean());
    out.variance.push_back(p.variance());
    out.min_value = std::min(out.min_value, p.min_value());
    out.max_normalization_error = std::max(out.max_normalization_error, std::abs(p.mass() - 1.0));
    while (next_snapshot < snapshot_times.size() && snapshot_times[next_snapshot] <= t + 0.5 * dt) {
      if (snapshot_times[next_snapshot] > t - 0.5 * dt) out.snapshots.emplace_back(t, p);
      ++next_snapshot;
    }
  };
  record_state(0);

  for (std::size_t k = 0; k < record.steps(); ++k) {
    const double dy = record.increments[k];

    // Observation update at the start of the step.
    double pi_h = 0.0;
    for (std::size_t i = 0; i < nx; ++i) pi_h += h_node[i] * v[i];
    pi_h *= dx;
    out.innovations.push_back(dy - pi_h * dt);
    double mass = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      v[i] *= std::exp(h_node[i] * dy - 0.5 * h_node[i] * h_node[i] * dt);
      mass += v[i];
    }
    mass *= dx;
    for (double& x : v) x /= mass;

    // Forward operator, conservative form, zero flux through both ends.
    for (std::size_t s = 0; s < substeps; ++s) {
      for (std::size_t i = 0; i + 1 < nx; ++i)
        flux[i + 1] = w_left[i] * v[i] + w_right[i] * v[i + 1];
      for (std::size_t i = 0; i < nx; ++i) v[i] -= sub_dt * (flux[i + 1] - flux[i]) / dx;
    }
    mass = p.mass();
    for (double& x : v) x /= mass;

    if (p.boundary_mass() > options.boundary_leak_tolerance)
      throw Error(ErrorCode::BoundaryMassLeak,
                  "density mass in boundary cells exceeds tolerance at t = " +
                      format_number(record.time(k + 1)),
                  k + 1);
    if (p.min_value() < -1e-10)
      throw Error(ErrorCode::InvariantViolation, "grid density went negative", k + 1);
    record_state(k + 1);
  }
  return out;
}

}  // namespace fqf
