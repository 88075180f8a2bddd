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

#include "fqf/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "fqf/error.hpp"

namespace fqf {

namespace {

struct TrajectoryOutcome {
  std::vector<double> samples;  // [sample][observable], row-major
  double innovation_total = 0.0;
  RunDiagnostics diagnostics;
  double max_odd = 0.0;
  std::exception_ptr error;
};

}  // namespace

EnsembleResult run_ensemble(const SystemModel& model, const ConditionalState& rho0,
                            const EnsembleConfig& config) {
  model.require_valid();
  if (config.trajectories < 2)
    throw Error(ErrorCode::InvalidArgument, "ensemble needs at least two trajectories");
  const std::size_t steps = step_count(config.T, config.dt);
  check_step_size(model, config.dt);

  std::vector<std::size_t> sample_index;
  for (double t : config.sample_times) {
    const double k = std::round(t / config.dt);
    if (!(k >= 0.0) || k > static_cast<double>(steps))
      throw Error(ErrorCode::InvalidArgument, "sample time outside [0, T]");
    sample_index.push_back(static_cast<std::size_t>(k));
  }
  std::multimap<std::size_t, std::size_t> slots;  // grid index -> sample position
  for (std::size_t s = 0; s < sample_index.size(); ++s) slots.emplace(sample_index[s], s);

  std::vector<Matrix> observables;
  for (const auto& name : config.observables) observables.push_back(model.observable(name).matrix());
  std::vector<Matrix> odd_ops;
  for (const auto& [name, op] : model.observables())
    if (op.parity() == Parity::odd) odd_ops.push_back(op.matrix());

  const std::size_t n_obs = observables.size();
  const std::size_t n_samples = sample_index.size();
  std::vector<TrajectoryOutcome> outcomes(config.trajectories);

  auto run_one = [&](std::size_t id) {
    TrajectoryOutcome& out = outcomes[id];
    out.samples.assign(n_samples * n_obs, 0.0);
    TrajectoryOptions options;
    options.store_states = false;
    options.observer = [&](std::size_t index, const Matrix& rho) {
      for (const Matrix& x : odd_ops) out.max_odd = std::max(out.max_odd, std::abs(expectation(rho, x)));
      auto [lo, hi] = slots.equal_range(index);
      for (auto it = lo; it != hi; ++it)
        for (std::size_t o = 0; o < n_obs; ++o)
          out.samples[it->second * n_obs + o] = expectation(rho, observables[o]).real();
    };
    try {
      auto sim = simulate_record(model, rho0, config.T, config.dt, config.seed, id, options);
      out.innovation_total = sim.run.innovation_total();
      out.diagnostics = sim.run.diagnostics;
    } catch (...) {
      out.error = std::current_exception();
    }
  };

  unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.trajectories));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t id = next++; id < config.trajectories; id = next++) run_one(id);
      });
  }
  for (const auto& o : outcomes)
    if (o.error) std::rethrow_exception(o.error);

  // Aggregate in trajectory-id order.
  const double n = static_cast<double>(config.trajectories);
  EnsembleResult result;
  for (std::size_t idx : sample_index) result.sample_times.push_back(static_cast<double>(idx) * config.dt);
  result.worst.min_intensity = std::numeric_limits<double>::infinity();
  double w_sum = 0.0;
  for (const auto& o : outcomes) {
    w_sum += o.innovation_total;
    result.total_jumps += o.diagnostics.jumps;
    result.worst.max_hermiticity = std::max(result.worst.max_hermiticity, o.diagnostics.max_hermiticity);
    result.worst.max_trace_error = std::max(result.worst.max_trace_error, o.diagnostics.max_trace_error);
    result.worst.min_eigenvalue = std::min(result.worst.min_eigenvalue, o.diagnostics.min_eigenvalue);
    result.worst.max_evenness = std::max(result.worst.max_evenness, o.diagnostics.max_evenness);
    result.worst.min_intensity = std::min(result.worst.min_intensity, o.diagnostics.min_intensity);
    result.max_odd_expectation = std::max(result.max_odd_expectation, o.max_odd);
  }
  result.worst.jumps = result.total_jumps;
  result.innovation_mean = w_sum / n;
  double w_var = 0.0;
  for (const auto& o : outcomes) w_var += (o.innovation_total - result.innovation_mean) * (o.innovation_total - result.innovation_mean);
  result.innovation_std = std::sqrt(w_var / (n - 1.0));

  // Unconditional reference on a stride that hits every sample index.
  std::size_t stride = 0;
  for (std::size_t idx : sample_index) stride = std::gcd(stride, idx);
  MasterOptions mopts;
  mopts.stride = stride == 0 ? steps : stride;
  const StateSeries master = evolve_master(model, rho0, config.T, config.dt, mopts);

  for (std::size_t o = 0; o < n_obs; ++o) {
    ObservableSummary summary;
    summary.name = config.observables[o];
    for (std::size_t s = 0; s < n_samples; ++s) {
      double sum = 0.0;
      for (const auto& out : outcomes) sum += out.samples[s * n_obs + o];
      const double mean = sum / n;
      double var = 0.0;
      for (const auto& out : outcomes) {
        const double d = out.samples[s * n_obs + o] - mean;
        var += d * d;
      }
      summary.mean.push_back(mean);
      summary.standard_error.push_back(std::sqrt(var / (n - 1.0)) / std::sqrt(n));
      const std::size_t pos = sample_index[s] == steps ? master.states.size() - 1
                                                       : sample_index[s] / mopts.stride;
      summary.master.push_back(expectation(master.states[pos].rho(), observables[o]).real());
    }
    result.observables.push_back(std::move(summary));
  }
  return result;
}

}  // namespace fqf
