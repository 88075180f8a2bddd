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

#include <cstdint>
#include <string>
#include <vector>

#include "fqf/dynamics.hpp"
#include "fqf/stochastics.hpp"

namespace fqf {

struct EnsembleConfig {
  std::size_t trajectories = 0;
  std::uint64_t seed = 0;
  double T = 0.0;
  double dt = 0.0;
  std::vector<std::string> observables;
  /// Times at which conditional expectations are aggregated. Each is
  /// snapped to the nearest grid point.
  std::vector<double> sample_times;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
};

struct ObservableSummary {
  std::string name;
  std::vector<double> mean;           // mean of Re pi_t(X) over trajectories
  std::vector<double> standard_error; // sample std / sqrt(N)
  std::vector<double> master;         // Re mu_t(X) from the master equation
};

struct EnsembleResult {
  std::vector<double> sample_times;   // snapped grid times
  std::vector<ObservableSummary> observables;
  double innovation_mean = 0.0;       // mean of W(T)
  double innovation_std = 0.0;        // sample std of W(T)
  std::size_t total_jumps = 0;
  RunDiagnostics worst;               // extremes across all trajectories
  double max_odd_expectation = 0.0;   // max |tr(rho X)| over odd catalog X
};

/// Generates `trajectories` records with trajectory ids 0..N-1 on a worker
/// pool and aggregates the generating conditional expectations. Results do
/// not depend on the number of workers.
EnsembleResult run_ensemble(const SystemModel& model, const ConditionalState& rho0,
                            const EnsembleConfig& config);

}  // namespace fqf
