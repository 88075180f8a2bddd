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

// Classical filtering baselines: scalar linear-Gaussian signal with the
// Kalman filter, and a grid Kushner-Stratonovich filter for scalar
// nonlinear models.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "fqf/record.hpp"

namespace fqf {

/// d xi = a xi dt + dV1,  dY = c xi dt + dV2.
struct LinearGaussianModel {
  double a = 0.0;
  double c = 0.0;
  double xi0_mean = 0.0;
  double xi0_var = 0.0;
  /// When false, dV1 is switched off (deterministic signal).
  bool process_noise = true;
};

struct LinearPath {
  std::vector<double> t;
  std::vector<double> xi;  // steps + 1 values
  ClassicalRecord record;
};

/// Euler-Maruyama with keyed Gaussian increments (stream 0: increments,
/// stream 1: initial draw).
LinearPath simulate_linear(const LinearGaussianModel& model, double T, double dt, std::uint64_t seed);

struct KalmanTrace {
  std::vector<double> t;
  std::vector<double> mean;      // xi_hat
  std::vector<double> variance;  // Sigma
  std::vector<StepTelemetry> telemetry;
};

/// Euler discretisation of the Kalman-Bucy filter. The Riccati equation is
/// dSigma/dt = 2 a Sigma + q - c^2 Sigma^2 with q = 1 (0 without process noise).
KalmanTrace kalman_run(const LinearGaussianModel& model, const ClassicalRecord& record);

/// Positive root of 2 a S + 1 - c^2 S^2 = 0 (requires c != 0 or a < 0).
double kalman_stationary_variance(double a, double c);

class GridDensity {
 public:
  GridDensity(double x_min, double x_max, std::size_t nx, std::vector<double> values);

  /// Normalised Gaussian sampled on the grid.
  static GridDensity gaussian(double x_min, double x_max, std::size_t nx, double mean, double var);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t nx() const noexcept { return values_.size(); }
  double dx() const noexcept { return (x_max_ - x_min_) / static_cast<double>(values_.size() - 1); }
  double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx(); }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  /// Riemann sum dx * sum(values).
  double mass() const noexcept;
  /// dx * sum f(x_i) p_i.
  double integrate(const std::function<double(double)>& f) const;
  double mean() const;
  double variance() const;
  double boundary_mass() const noexcept;
  double min_value() const noexcept;

 private:
  double x_min_;
  double x_max_;
  std::vector<double> values_;
};

struct NonlinearModel {
  std::function<double(double)> g;  // drift
  std::function<double(double)> h;  // observation function
};

struct KsOptions {
  std::vector<double> snapshot_times;
  double boundary_leak_tolerance = 1e-4;
};

struct KsTrace {
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> innovations;  // dW = dY - pi_t(h) dt
  std::vector<std::pair<double, GridDensity>> snapshots;
  std::size_t substeps = 1;         // Fokker-Planck substeps per record step
  double min_value = 0.0;           // most negative density value seen
  double max_normalization_error = 0.0;
};

/// Kushner-Stratonovich filter on a uniform grid. Forward operator
/// 0.5 p'' - (g p)' in conservative form with zero-flux boundaries: central
/// differences where |g| dx <= 1, upwind advection elsewhere, explicit Euler
/// substeps at half the monotonicity limit (dx^2 / 2 without drift). The
/// observation update multiplies by exp(h dY - h^2 dt / 2) and renormalises.
KsTrace ks_grid_run(const NonlinearModel& model, const ClassicalRecord& record,
                    const GridDensity& initial, const KsOptions& options = {});

}  // namespace fqf
