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

#include "fqf/fqf.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <exception>
#include <map>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "fqf/classical.hpp"
#include "fqf/dynamics.hpp"
#include "fqf/ensemble.hpp"
#include "fqf/error.hpp"
#include "fqf/models.hpp"
#include "fqf/stochastics.hpp"
#include "fqf/table_io.hpp"

struct fqf_model {
  fqf::SystemModel model;
  std::vector<std::string> names;  // catalog names, sorted; stable c_str()s
};

struct fqf_state {
  fqf::ConditionalState state;
};

struct fqf_record {
  fqf::MeasurementRecord record;
};

struct fqf_obs_record {
  fqf::ClassicalRecord record;
};

struct fqf_trajectory {
  std::vector<double> t;
  std::vector<std::size_t> step_index;
  std::vector<fqf::ConditionalState> states;
  std::vector<double> intensities;
  std::vector<double> innovations;
  fqf::RunDiagnostics diagnostics;
};

struct fqf_table {
  fqf::Table table;
};

namespace {

thread_local std::string g_last_error;
thread_local long long g_last_step = -1;

fqf_status map_code(fqf::ErrorCode code) {
  using fqf::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return FQF_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return FQF_ERR_DIMENSION_MISMATCH;
    case ErrorCode::MixedParity:
    case ErrorCode::MixedParityOnFermionicSpace: return FQF_ERR_MIXED_PARITY;
    case ErrorCode::IndexOutOfRange: return FQF_ERR_INDEX_OUT_OF_RANGE;
    case ErrorCode::InvalidParityAssignment: return FQF_ERR_INVALID_PARITY_ASSIGNMENT;
    case ErrorCode::InvalidModel: return FQF_ERR_INVALID_MODEL;
    case ErrorCode::GridMismatch: return FQF_ERR_GRID_MISMATCH;
    case ErrorCode::DegenerateRatio: return FQF_ERR_DEGENERATE_RATIO;
    case ErrorCode::InvariantViolation: return FQF_ERR_INVARIANT_VIOLATION;
    case ErrorCode::NonUniqueSteadyState: return FQF_ERR_NON_UNIQUE_STEADY_STATE;
    case ErrorCode::BoundaryMassLeak: return FQF_ERR_BOUNDARY_MASS_LEAK;
    case ErrorCode::Io: return FQF_ERR_IO;
    case ErrorCode::Parse: return FQF_ERR_PARSE;
  }
  return FQF_ERR_INTERNAL;
}

fqf_status fail(fqf_status status, std::string message, long long step = -1) {
  g_last_error = std::move(message);
  g_last_step = step;
  return status;
}

// Runs body() and converts exceptions into status codes.
template <class F>
fqf_status guarded(F&& body) noexcept {
  try {
    g_last_error.clear();
    g_last_step = -1;
    body();
    return FQF_OK;
  } catch (const fqf::Error& e) {
    return fail(map_code(e.code()), e.what(), e.step() ? static_cast<long long>(*e.step()) : -1);
  } catch (const std::bad_alloc&) {
    return fail(FQF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FQF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FQF_ERR_INTERNAL, "unknown error");
  }
}

[[noreturn]] void invalid(const std::string& what) {
  throw fqf::Error(fqf::ErrorCode::InvalidArgument, what);
}

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) invalid(std::string(what) + " is NULL");
}

fqf::Matrix read_matrix(const double* data, std::size_t dim) {
  fqf::Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      const std::size_t k = 2 * (r * dim + c);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {data[k], data[k + 1]};
    }
  return m;
}

std::unique_ptr<fqf_model> wrap_model(fqf::SystemModel model) {
  auto out = std::unique_ptr<fqf_model>(new fqf_model{std::move(model), {}});
  for (const auto& [name, op] : out->model.observables()) out->names.push_back(name);
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, end - pos);
    double v = 0.0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || p != item.data() + item.size())
      throw fqf::Error(fqf::ErrorCode::Parse, "bad number '" + item + "' in state spec");
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

fqf::ConditionalState make_state(const fqf::SystemModel& model, const std::string& spec) {
  const auto& space = model.space();
  if (spec == "mixed") return fqf::ConditionalState::maximally_mixed(space);
  if (spec == "steady") return fqf::steady_state(model);
  if (spec.rfind("basis:", 0) == 0) {
    const auto v = parse_list(spec.substr(6));
    if (v.size() != 1 || v[0] < 0 || v[0] != std::floor(v[0]))
      invalid("basis index must be a non-negative integer");
    return fqf::ConditionalState::basis(space, static_cast<std::size_t>(v[0]));
  }
  if (spec.rfind("diag:", 0) == 0) {
    const auto v = parse_list(spec.substr(5));
    if (v.size() != model.dim())
      throw fqf::Error(fqf::ErrorCode::DimensionMismatch, "diag: needs one entry per basis state");
    fqf::Matrix rho = fqf::Matrix::Zero(static_cast<Eigen::Index>(v.size()),
                                        static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
      rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v[i];
    return fqf::ConditionalState(rho, space);
  }
  if (model.name() == "dot") {
    if (spec == "empty") return fqf::ConditionalState::basis(space, 0);
    if (spec == "occupied") return fqf::ConditionalState::basis(space, 1);
  }
  if (model.name() == "photodetector") {
    // Atom major, detector minor; the detector starts in level 1.
    if (spec == "ground") return fqf::ConditionalState::basis(space, 0);
    if (spec == "excited") return fqf::ConditionalState::basis(space, 3);
  }
  invalid("unknown state '" + spec + "' for model '" + model.name() + "'");
}

fqf::Complex eval(const fqf_model* m, const fqf::ConditionalState& s, const char* name) {
  require(name, "observable");
  return fqf::expectation(s, m->model.observable(name));
}

std::unique_ptr<fqf_trajectory> wrap_run(fqf::FilterRun run) {
  auto out = std::make_unique<fqf_trajectory>();
  out->t = std::move(run.t);
  out->step_index = std::move(run.step_index);
  out->states = std::move(run.states);
  out->intensities = std::move(run.intensities);
  out->innovations = std::move(run.innovations);
  out->diagnostics = run.diagnostics;
  return out;
}

void fill_diag(const fqf::RunDiagnostics& d, fqf_run_diagnostics* out) {
  out->max_hermiticity = d.max_hermiticity;
  out->max_trace_error = d.max_trace_error;
  out->min_eigenvalue = d.min_eigenvalue;
  out->max_evenness = d.max_evenness;
  out->jumps = d.jumps;
}

fqf::LinearGaussianModel to_linear(const fqf_linear_model* m) {
  require(m, "model");
  fqf::LinearGaussianModel out;
  out.a = m->a;
  out.c = m->c;
  out.xi0_mean = m->xi0_mean;
  out.xi0_var = m->xi0_var;
  out.process_noise = m->process_noise != 0;
  return out;
}

fqf_table* new_table(fqf::Table t) { return new fqf_table{std::move(t)}; }

std::string time_label(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "p@%g", t);
  return buf;
}

}  // namespace

extern "C" {

const char* fqf_version(void) { return "1.0.0"; }

const char* fqf_status_string(fqf_status status) {
  switch (status) {
    case FQF_OK: return "ok";
    case FQF_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case FQF_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case FQF_ERR_MIXED_PARITY: return "mixed_parity";
    case FQF_ERR_INDEX_OUT_OF_RANGE: return "index_out_of_range";
    case FQF_ERR_INVALID_PARITY_ASSIGNMENT: return "invalid_parity_assignment";
    case FQF_ERR_INVALID_MODEL: return "invalid_model";
    case FQF_ERR_GRID_MISMATCH: return "grid_mismatch";
    case FQF_ERR_DEGENERATE_RATIO: return "degenerate_ratio";
    case FQF_ERR_INVARIANT_VIOLATION: return "invariant_violation";
    case FQF_ERR_NON_UNIQUE_STEADY_STATE: return "non_unique_steady_state";
    case FQF_ERR_BOUNDARY_MASS_LEAK: return "boundary_mass_leak";
    case FQF_ERR_IO: return "io";
    case FQF_ERR_PARSE: return "parse";
    case FQF_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* fqf_last_error_message(void) { return g_last_error.c_str(); }
long long fqf_last_error_step(void) { return g_last_step; }

// ---- models ---------------------------------------------------------------

fqf_status fqf_model_preset(const char* name, const char* const* param_names,
                            const double* param_values, size_t n_params, fqf_model** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    if (n_params > 0) {
      require(param_names, "param_names");
      require(param_values, "param_values");
    }
    std::map<std::string, double> params;
    for (size_t i = 0; i < n_params; ++i) {
      require(param_names[i], "parameter name");
      params[param_names[i]] = param_values[i];
    }
    auto take = [&](std::initializer_list<const char*> allowed) {
      for (const auto& [k, v] : params)
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
          invalid("unknown parameter '" + k + "' for model '" + name + "'");
      return [&](const char* k) {
        auto it = params.find(k);
        return it == params.end() ? 0.0 : it->second;
      };
    };
    const std::string n = name;
    if (n == "dot") {
      auto get = take({"gamma_L", "gamma_R"});
      *out = wrap_model(fqf::quantum_dot({get("gamma_L"), get("gamma_R")})).release();
    } else if (n == "photodetector") {
      auto get = take({"kappa", "gamma", "gamma0", "gamma1"});
      *out = wrap_model(fqf::photodetector({get("kappa"), get("gamma"), get("gamma0"), get("gamma1")}))
                 .release();
    } else {
      invalid("unknown model preset '" + n + "'");
    }
  });
}

fqf_status fqf_model_custom(size_t n_factors, const size_t* factor_dims, const int* parity_signs,
                            const double* H, const double* S, const double* L, const double* S0,
                            const double* L0, const double* L1, fqf_model** out) {
  return guarded([&] {
    require(out, "out");
    require(factor_dims, "factor_dims");
    require(parity_signs, "parity_signs");
    if (n_factors == 0) invalid("need at least one factor");
    std::vector<fqf::GradedSpace> factors;
    std::size_t offset = 0;
    for (size_t f = 0; f < n_factors; ++f) {
      std::vector<int> signs(parity_signs + offset, parity_signs + offset + factor_dims[f]);
      offset += factor_dims[f];
      if (factor_dims[f] == 0) invalid("factor dimension must be positive");
      for (int s : signs)
        if (s != 1 && s != -1) invalid("parity signs must be +1 or -1");
      const bool graded = std::any_of(signs.begin(), signs.end(), [](int s) { return s < 0; });
      factors.push_back(graded ? fqf::GradedSpace::fermionic(std::move(signs))
                               : fqf::GradedSpace::trivial(factor_dims[f]));
    }
    const fqf::CompositeSpace space(std::move(factors));
    const std::size_t dim = space.dim();
    auto op = [&](const double* data, bool identity) {
      if (data == nullptr)
        return identity ? fqf::GradedOperator::identity(space) : fqf::GradedOperator::zero(space);
      return fqf::GradedOperator(read_matrix(data, dim), space);
    };
    fqf::SystemModel::Operators ops{op(H, false), op(S, true),   op(L, false),
                                    op(S0, true), op(L0, false), op(L1, false)};
    *out = wrap_model(fqf::SystemModel("custom", std::move(ops))).release();
  });
}

void fqf_model_free(fqf_model* model) { delete model; }

size_t fqf_model_dim(const fqf_model* model) { return model ? model->model.dim() : 0; }

int fqf_model_is_valid(const fqf_model* model) {
  return model && model->model.report().ok() ? 1 : 0;
}

int fqf_model_filtering_available(const fqf_model* model) {
  return model && model->model.report().filtering_available ? 1 : 0;
}

fqf_status fqf_model_validation_summary(const fqf_model* model, char* buffer, size_t len,
                                        size_t* needed) {
  return guarded([&] {
    require(model, "model");
    const std::string s = model->model.report().summary();
    if (needed) *needed = s.size() + 1;
    if (buffer && len > 0) {
      const std::size_t n = std::min(len - 1, s.size());
      std::memcpy(buffer, s.data(), n);
      buffer[n] = '\0';
    }
  });
}

size_t fqf_model_observable_count(const fqf_model* model) {
  return model ? model->names.size() : 0;
}

const char* fqf_model_observable_name(const fqf_model* model, size_t index) {
  if (!model || index >= model->names.size()) return nullptr;
  return model->names[index].c_str();
}

fqf_status fqf_model_observable_parity(const fqf_model* model, const char* name, fqf_parity* out) {
  return guarded([&] {
    require(model, "model");
    require(name, "name");
    require(out, "out");
    switch (model->model.observable(name).parity()) {
      case fqf::Parity::even: *out = FQF_PARITY_EVEN; break;
      case fqf::Parity::odd: *out = FQF_PARITY_ODD; break;
      case fqf::Parity::mixed: *out = FQF_PARITY_MIXED; break;
    }
  });
}

fqf_status fqf_model_observable_is_hermitian(const fqf_model* model, const char* name, int* out) {
  return guarded([&] {
    require(model, "model");
    require(name, "name");
    require(out, "out");
    const auto& m = model->model.observable(name).matrix();
    *out = fqf::norm(m - m.adjoint()) <= 1e-12 * std::max(1.0, fqf::norm(m)) ? 1 : 0;
  });
}

// ---- states ---------------------------------------------------------------

fqf_status fqf_state_preset(const fqf_model* model, const char* spec, fqf_state** out) {
  return guarded([&] {
    require(model, "model");
    require(spec, "spec");
    require(out, "out");
    *out = new fqf_state{make_state(model->model, spec)};
  });
}

fqf_status fqf_state_from_matrix(const fqf_model* model, const double* rho, fqf_state** out) {
  return guarded([&] {
    require(model, "model");
    require(rho, "rho");
    require(out, "out");
    *out = new fqf_state{
        fqf::ConditionalState(read_matrix(rho, model->model.dim()), model->model.space())};
  });
}

void fqf_state_free(fqf_state* state) { delete state; }

fqf_status fqf_state_matrix(const fqf_state* state, double* out, size_t len) {
  return guarded([&] {
    require(state, "state");
    require(out, "out");
    const auto& rho = state->state.rho();
    const auto dim = static_cast<std::size_t>(rho.rows());
    if (len < 2 * dim * dim) invalid("output buffer too small");
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) {
        const auto z = rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        out[2 * (r * dim + c)] = z.real();
        out[2 * (r * dim + c) + 1] = z.imag();
      }
  });
}

fqf_status fqf_state_expectation(const fqf_model* model, const fqf_state* state,
                                 const char* observable, double* re, double* im) {
  return guarded([&] {
    require(model, "model");
    require(state, "state");
    const auto z = eval(model, state->state, observable);
    if (re) *re = z.real();
    if (im) *im = z.imag();
  });
}

fqf_status fqf_steady_state(const fqf_model* model, fqf_state** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = new fqf_state{fqf::steady_state(model->model)};
  });
}

// ---- evolution --------------------------------------------------------------

fqf_status fqf_evolve_master(const fqf_model* model, const fqf_state* rho0, double T, double dt,
                             size_t stride, fqf_trajectory** out) {
  return guarded([&] {
    require(model, "model");
    require(rho0, "rho0");
    require(out, "out");
    fqf::MasterOptions opts;
    opts.stride = std::max<std::size_t>(1, stride);
    auto series = fqf::evolve_master(model->model, rho0->state, T, dt, opts);
    auto traj = std::make_unique<fqf_trajectory>();
    traj->t = std::move(series.t);
    const std::size_t steps = fqf::step_count(T, dt);
    for (std::size_t i = 0; i < traj->t.size(); ++i)
      traj->step_index.push_back(
          std::min(steps, static_cast<std::size_t>(std::llround(traj->t[i] / dt))));
    traj->states = std::move(series.states);
    for (const auto& s : traj->states) traj->diagnostics.absorb(s.diagnostics());
    *out = traj.release();
  });
}

fqf_status fqf_simulate(const fqf_model* model, const fqf_state* rho0, double T, double dt,
                        uint64_t seed, uint64_t trajectory_id, size_t stride,
                        fqf_record** record_out, fqf_trajectory** trajectory_out) {
  return guarded([&] {
    require(model, "model");
    require(rho0, "rho0");
    fqf::TrajectoryOptions opts;
    opts.stride = std::max<std::size_t>(1, stride);
    opts.store_states = trajectory_out != nullptr;
    auto result = fqf::simulate_record(model->model, rho0->state, T, dt, seed, trajectory_id, opts);
    std::unique_ptr<fqf_record> rec(new fqf_record{std::move(result.record)});
    auto traj = wrap_run(std::move(result.run));
    if (record_out) *record_out = rec.release();
    if (trajectory_out) *trajectory_out = traj.release();
  });
}

fqf_status fqf_filter(const fqf_model* model, const fqf_state* rho0_hat, const fqf_record* record,
                      size_t stride, fqf_trajectory** out) {
  return guarded([&] {
    require(model, "model");
    require(rho0_hat, "rho0_hat");
    require(record, "record");
    require(out, "out");
    fqf::TrajectoryOptions opts;
    opts.stride = std::max<std::size_t>(1, stride);
    *out = wrap_run(fqf::run_filter(model->model, rho0_hat->state, record->record, opts)).release();
  });
}

void fqf_trajectory_free(fqf_trajectory* trajectory) { delete trajectory; }

size_t fqf_trajectory_length(const fqf_trajectory* t) { return t ? t->states.size() : 0; }

double fqf_trajectory_time(const fqf_trajectory* t, size_t index) {
  return t && index < t->t.size() ? t->t[index] : std::nan("");
}

size_t fqf_trajectory_step_index(const fqf_trajectory* t, size_t index) {
  return t && index < t->step_index.size() ? t->step_index[index] : 0;
}

fqf_status fqf_trajectory_expectation(const fqf_model* model, const fqf_trajectory* trajectory,
                                      size_t index, const char* observable, double* re,
                                      double* im) {
  return guarded([&] {
    require(model, "model");
    require(trajectory, "trajectory");
    if (index >= trajectory->states.size())
      throw fqf::Error(fqf::ErrorCode::IndexOutOfRange, "trajectory index out of range");
    const auto z = eval(model, trajectory->states[index], observable);
    if (re) *re = z.real();
    if (im) *im = z.imag();
  });
}

fqf_status fqf_trajectory_state(const fqf_trajectory* trajectory, size_t index, fqf_state** out) {
  return guarded([&] {
    require(trajectory, "trajectory");
    require(out, "out");
    if (index >= trajectory->states.size())
      throw fqf::Error(fqf::ErrorCode::IndexOutOfRange, "trajectory index out of range");
    *out = new fqf_state{trajectory->states[index]};
  });
}

size_t fqf_trajectory_steps(const fqf_trajectory* t) { return t ? t->intensities.size() : 0; }

double fqf_trajectory_intensity(const fqf_trajectory* t, size_t step) {
  return t && step < t->intensities.size() ? t->intensities[step] : std::nan("");
}

double fqf_trajectory_innovation(const fqf_trajectory* t, size_t step) {
  return t && step < t->innovations.size() ? t->innovations[step] : std::nan("");
}

fqf_status fqf_trajectory_diagnostics(const fqf_trajectory* trajectory, fqf_run_diagnostics* out) {
  return guarded([&] {
    require(trajectory, "trajectory");
    require(out, "out");
    fill_diag(trajectory->diagnostics, out);
  });
}

fqf_status fqf_trajectory_table(const fqf_model* model, const fqf_trajectory* trajectory,
                                const char* const* observables, size_t n_observables,
                                int filter_columns, fqf_table** out) {
  return guarded([&] {
    require(model, "model");
    require(trajectory, "trajectory");
    require(out, "out");
    if (n_observables > 0) require(observables, "observables");
    struct Column {
      const fqf::GradedOperator* op;
      bool complex;
    };
    fqf::Table table;
    if (filter_columns) table.columns = {"step", "t", "intensity", "dW"};
    else table.columns = {"t"};
    std::vector<Column> cols;
    for (size_t i = 0; i < n_observables; ++i) {
      require(observables[i], "observable name");
      const auto& op = model->model.observable(observables[i]);
      const bool herm = fqf::norm(op.matrix() - op.matrix().adjoint()) <= 1e-12;
      cols.push_back({&op, !herm});
      if (herm) {
        table.columns.emplace_back(observables[i]);
      } else {
        table.columns.push_back(std::string(observables[i]) + "_re");
        table.columns.push_back(std::string(observables[i]) + "_im");
      }
    }
    const std::size_t steps = trajectory->intensities.size();
    for (std::size_t i = 0; i < trajectory->states.size(); ++i) {
      std::vector<double> row;
      if (filter_columns) {
        const std::size_t k = trajectory->step_index[i];
        if (k >= steps) continue;
        row = {static_cast<double>(k), trajectory->t[i], trajectory->intensities[k],
               trajectory->innovations[k]};
      } else {
        row = {trajectory->t[i]};
      }
      for (const auto& c : cols) {
        const auto z = fqf::expectation(trajectory->states[i], *c.op);
        row.push_back(z.real());
        if (c.complex) row.push_back(z.imag());
      }
      table.rows.push_back(std::move(row));
    }
    *out = new_table(std::move(table));
  });
}

// ---- records ---------------------------------------------------------------

fqf_status fqf_record_create(double t0, double dt, const uint8_t* increments, size_t n,
                             uint64_t seed, uint64_t trajectory_id, fqf_record** out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) require(increments, "increments");
    fqf::MeasurementRecord r;
    r.t0 = t0;
    r.dt = dt;
    r.increments.assign(increments, increments + n);
    r.seed = seed;
    r.trajectory_id = trajectory_id;
    r.validate();
    *out = new fqf_record{std::move(r)};
  });
}

fqf_status fqf_record_read_csv(const char* path, double dt_hint, fqf_record** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new fqf_record{fqf::read_record_csv(path, dt_hint)};
  });
}

fqf_status fqf_record_write_csv(const fqf_record* record, const char* path) {
  return guarded([&] {
    require(record, "record");
    require(path, "path");
    fqf::write_record_csv(path, record->record);
  });
}

void fqf_record_free(fqf_record* record) { delete record; }
size_t fqf_record_length(const fqf_record* r) { return r ? r->record.steps() : 0; }
double fqf_record_t0(const fqf_record* r) { return r ? r->record.t0 : std::nan(""); }
double fqf_record_dt(const fqf_record* r) { return r ? r->record.dt : std::nan(""); }
uint64_t fqf_record_seed(const fqf_record* r) { return r ? r->record.seed : 0; }

size_t fqf_record_count_total(const fqf_record* r) {
  if (!r) return 0;
  std::size_t n = 0;
  for (auto v : r->record.increments) n += v;
  return n;
}

fqf_status fqf_record_increments(const fqf_record* record, uint8_t* out, size_t len) {
  return guarded([&] {
    require(record, "record");
    require(out, "out");
    if (len < record->record.steps()) invalid("output buffer too small");
    std::copy(record->record.increments.begin(), record->record.increments.end(), out);
  });
}

// ---- scalar filters ---------------------------------------------------------

fqf_status fqf_dot_scalar_filter(const fqf_record* record, double gamma_L, double gamma_R,
                                 double n0, double* n_out, size_t len, size_t* excursions) {
  return guarded([&] {
    require(record, "record");
    require(n_out, "n_out");
    if (len < record->record.steps() + 1) invalid("output buffer too small");
    const auto trace = fqf::dot_scalar_filter(record->record, {gamma_L, gamma_R}, n0);
    std::copy(trace.n.begin(), trace.n.end(), n_out);
    if (excursions) *excursions = trace.excursions;
  });
}

static void moments_out(const fqf::DetectorMoments& m, double* out) {
  out[0] = m.n;
  out[1] = m.s22;
  out[2] = m.s12p.real();
  out[3] = m.s12p.imag();
  out[4] = m.s11pm;
  out[5] = m.s22pm;
  out[6] = m.s33pm;
}

fqf_status fqf_photodetector_scalar_filter(const fqf_record* record, const double* params,
                                           const double* initial, fqf_detector_form form,
                                           double* out, size_t len) {
  return guarded([&] {
    require(record, "record");
    require(params, "params");
    require(initial, "initial");
    require(out, "out");
    if (len < 7 * (record->record.steps() + 1)) invalid("output buffer too small");
    fqf::DetectorMoments m0;
    m0.n = initial[0];
    m0.s22 = initial[1];
    m0.s12p = {initial[2], initial[3]};
    m0.s11pm = initial[4];
    m0.s22pm = initial[5];
    m0.s33pm = initial[6];
    const auto trace = fqf::photodetector_scalar_filter(
        record->record, {params[0], params[1], params[2], params[3]}, m0,
        form == FQF_DETECTOR_AS_PRINTED ? fqf::DetectorFilterForm::as_printed
                                        : fqf::DetectorFilterForm::derived);
    for (std::size_t k = 0; k < trace.moments.size(); ++k) moments_out(trace.moments[k], out + 7 * k);
  });
}

fqf_status fqf_photodetector_moments(const fqf_model* photodetector, const fqf_state* state,
                                     double* out7) {
  return guarded([&] {
    require(photodetector, "model");
    require(state, "state");
    require(out7, "out");
    moments_out(fqf::detector_moments(photodetector->model, state->state.rho()), out7);
  });
}

// ---- ensembles ---------------------------------------------------------------

fqf_status fqf_ensemble(const fqf_model* model, const fqf_state* rho0,
                        const fqf_ensemble_config* config, const char* const* observables,
                        size_t n_observables, const double* sample_times, size_t n_samples,
                        fqf_table** out, fqf_ensemble_summary* summary) {
  return guarded([&] {
    require(model, "model");
    require(rho0, "rho0");
    require(config, "config");
    if (n_observables > 0) require(observables, "observables");
    if (n_samples > 0) require(sample_times, "sample_times");
    fqf::EnsembleConfig cfg;
    cfg.trajectories = config->trajectories;
    cfg.seed = config->seed;
    cfg.T = config->T;
    cfg.dt = config->dt;
    cfg.workers = config->workers;
    for (size_t i = 0; i < n_observables; ++i) {
      require(observables[i], "observable name");
      cfg.observables.emplace_back(observables[i]);
    }
    cfg.sample_times.assign(sample_times, sample_times + n_samples);
    const auto result = fqf::run_ensemble(model->model, rho0->state, cfg);
    if (out) {
      fqf::Table table;
      table.columns = {"t"};
      for (const auto& o : result.observables) {
        table.columns.push_back(o.name + "_mean");
        table.columns.push_back(o.name + "_se");
        table.columns.push_back(o.name + "_master");
      }
      for (std::size_t i = 0; i < result.sample_times.size(); ++i) {
        std::vector<double> row{result.sample_times[i]};
        for (const auto& o : result.observables) {
          row.push_back(o.mean[i]);
          row.push_back(o.standard_error[i]);
          row.push_back(o.master[i]);
        }
        table.rows.push_back(std::move(row));
      }
      *out = new_table(std::move(table));
    }
    if (summary) {
      summary->innovation_mean = result.innovation_mean;
      summary->innovation_std = result.innovation_std;
      summary->total_jumps = result.total_jumps;
      fill_diag(result.worst, &summary->worst);
      summary->max_odd_expectation = result.max_odd_expectation;
    }
  });
}

// ---- classical ---------------------------------------------------------------

fqf_status fqf_linear_simulate(const fqf_linear_model* model, double T, double dt, uint64_t seed,
                               fqf_obs_record** record_out, fqf_table** path_out) {
  return guarded([&] {
    auto path = fqf::simulate_linear(to_linear(model), T, dt, seed);
    fqf::Table table;
    table.columns = {"t", "xi"};
    for (std::size_t i = 0; i < path.t.size(); ++i) table.rows.push_back({path.t[i], path.xi[i]});
    std::unique_ptr<fqf_obs_record> rec(new fqf_obs_record{std::move(path.record)});
    std::unique_ptr<fqf_table> tab(new_table(std::move(table)));
    if (record_out) *record_out = rec.release();
    if (path_out) *path_out = tab.release();
  });
}

fqf_status fqf_obs_record_read_csv(const char* path, double dt_hint, fqf_obs_record** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new fqf_obs_record{fqf::read_classical_record_csv(path, dt_hint)};
  });
}

fqf_status fqf_obs_record_write_csv(const fqf_obs_record* record, const char* path) {
  return guarded([&] {
    require(record, "record");
    require(path, "path");
    fqf::write_classical_record_csv(path, record->record);
  });
}

void fqf_obs_record_free(fqf_obs_record* record) { delete record; }
size_t fqf_obs_record_length(const fqf_obs_record* r) { return r ? r->record.steps() : 0; }
double fqf_obs_record_dt(const fqf_obs_record* r) { return r ? r->record.dt : std::nan(""); }

fqf_status fqf_kalman(const fqf_linear_model* model, const fqf_obs_record* record,
                      fqf_table** out) {
  return guarded([&] {
    require(record, "record");
    require(out, "out");
    const auto trace = fqf::kalman_run(to_linear(model), record->record);
    fqf::Table table;
    table.columns = {"t", "xi_hat", "Sigma"};
    for (std::size_t i = 0; i < trace.t.size(); ++i)
      table.rows.push_back({trace.t[i], trace.mean[i], trace.variance[i]});
    *out = new_table(std::move(table));
  });
}

fqf_status fqf_kalman_stationary_variance(double a, double c, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = fqf::kalman_stationary_variance(a, c);
  });
}

fqf_status fqf_ksgrid(fqf_scalar_fn g, void* g_user, fqf_scalar_fn h, void* h_user,
                      const fqf_obs_record* record, const fqf_grid_spec* grid,
                      const double* snapshot_times, size_t n_snapshots, fqf_table** summary_out,
                      fqf_table** snapshots_out) {
  return guarded([&] {
    if (!g || !h) invalid("g and h callbacks are required");
    require(record, "record");
    require(grid, "grid");
    if (n_snapshots > 0) require(snapshot_times, "snapshot_times");
    fqf::NonlinearModel model{[g, g_user](double x) { return g(x, g_user); },
                              [h, h_user](double x) { return h(x, h_user); }};
    const auto initial = fqf::GridDensity::gaussian(grid->x_min, grid->x_max, grid->nx,
                                                    grid->init_mean, grid->init_var);
    fqf::KsOptions opts;
    opts.snapshot_times.assign(snapshot_times, snapshot_times + n_snapshots);
    const auto trace = fqf::ks_grid_run(model, record->record, initial, opts);

    fqf::Table summary;
    summary.columns = {"t", "mean", "variance"};
    for (std::size_t i = 0; i < trace.t.size(); ++i)
      summary.rows.push_back({trace.t[i], trace.mean[i], trace.variance[i]});
    std::unique_ptr<fqf_table> s(new_table(std::move(summary)));

    std::unique_ptr<fqf_table> snaps;
    if (snapshots_out) {
      fqf::Table t;
      t.columns = {"x"};
      for (const auto& [time, d] : trace.snapshots) t.columns.push_back(time_label(time));
      for (std::size_t i = 0; i < initial.nx(); ++i) {
        std::vector<double> row{initial.x(i)};
        for (const auto& [time, d] : trace.snapshots) row.push_back(d.values()[i]);
        t.rows.push_back(std::move(row));
      }
      snaps.reset(new_table(std::move(t)));
    }
    if (summary_out) *summary_out = s.release();
    if (snapshots_out) *snapshots_out = snaps.release();
  });
}

// ---- tables -------------------------------------------------------------------

void fqf_table_free(fqf_table* table) { delete table; }
size_t fqf_table_columns(const fqf_table* t) { return t ? t->table.columns.size() : 0; }
size_t fqf_table_rows(const fqf_table* t) { return t ? t->table.rows.size() : 0; }

const char* fqf_table_column_name(const fqf_table* t, size_t column) {
  return t && column < t->table.columns.size() ? t->table.columns[column].c_str() : nullptr;
}

double fqf_table_value(const fqf_table* t, size_t row, size_t column) {
  if (!t || row >= t->table.rows.size() || column >= t->table.columns.size()) return std::nan("");
  return t->table.rows[row][column];
}

fqf_status fqf_table_write_csv(const fqf_table* table, const char* path) {
  return guarded([&] {
    require(table, "table");
    require(path, "path");
    fqf::write_table_csv(path, table->table);
  });
}

fqf_status fqf_table_read_csv(const char* path, fqf_table** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new_table(fqf::read_table_csv(path));
  });
}

}  // extern "C"
