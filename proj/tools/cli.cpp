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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "config.hpp"
#include "fqf/fqf.h"

namespace fqf::cli {

namespace {

namespace fs = std::filesystem;

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const noexcept { Free(p); }
};
using ModelPtr = std::unique_ptr<fqf_model, Deleter<fqf_model, fqf_model_free>>;
using StatePtr = std::unique_ptr<fqf_state, Deleter<fqf_state, fqf_state_free>>;
using RecordPtr = std::unique_ptr<fqf_record, Deleter<fqf_record, fqf_record_free>>;
using ObsRecordPtr = std::unique_ptr<fqf_obs_record, Deleter<fqf_obs_record, fqf_obs_record_free>>;
using TrajPtr = std::unique_ptr<fqf_trajectory, Deleter<fqf_trajectory, fqf_trajectory_free>>;
using TablePtr = std::unique_ptr<fqf_table, Deleter<fqf_table, fqf_table_free>>;

// A failed library call, carrying the status for exit-code mapping.
struct LibraryFailure : std::runtime_error {
  fqf_status status;
  long long step;
  LibraryFailure(fqf_status s, const std::string& msg, long long st)
      : std::runtime_error(msg), status(s), step(st) {}
};

void check(fqf_status s) {
  if (s != FQF_OK) throw LibraryFailure(s, fqf_last_error_message(), fqf_last_error_step());
}

int exit_code_for(fqf_status s) {
  switch (s) {
    case FQF_ERR_INVARIANT_VIOLATION:
    case FQF_ERR_DEGENERATE_RATIO: return kExitInvariant;
    case FQF_ERR_INVALID_ARGUMENT:
    case FQF_ERR_DIMENSION_MISMATCH:
    case FQF_ERR_MIXED_PARITY:
    case FQF_ERR_INDEX_OUT_OF_RANGE:
    case FQF_ERR_INVALID_PARITY_ASSIGNMENT:
    case FQF_ERR_INVALID_MODEL:
    case FQF_ERR_GRID_MISMATCH:
    case FQF_ERR_PARSE: return kExitConfig;
    default: return kExitFailure;
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Everything a command produces besides its files.
struct Outcome {
  std::vector<std::pair<std::string, std::string>> summary;
  void add(const std::string& k, const std::string& v) { summary.emplace_back(k, v); }
  void add(const std::string& k, double v) { summary.emplace_back(k, fmt(v)); }
  void add_diag(const fqf_run_diagnostics& d) {
    add("invariants.max_hermiticity", d.max_hermiticity);
    add("invariants.max_trace_error", d.max_trace_error);
    add("invariants.min_eigenvalue", d.min_eigenvalue);
    add("invariants.max_evenness", d.max_evenness);
    add("jumps", std::to_string(d.jumps));
  }
};

class Runner {
 public:
  Runner(const Config& cfg, fs::path out) : cfg_(cfg), out_(std::move(out)) {}

  void run(const std::string& command, Outcome& outcome) {
    if (command == "master") master(outcome);
    else if (command == "simulate") simulate(outcome);
    else if (command == "filter") filter(outcome);
    else if (command == "ensemble") ensemble(outcome);
    else if (command == "kalman") kalman(outcome);
    else if (command == "ksgrid") ksgrid(outcome);
    else throw ConfigError("unknown command '" + command + "'");
  }

 private:
  std::string path(const std::string& name) const { return (out_ / name).string(); }

  double T() const {
    const double t = cfg_.get_real("T");
    const double dt = this->dt();
    if (!(t >= dt)) throw ConfigError("T must be >= dt");
    return t;
  }
  double dt() const {
    const double v = cfg_.get_real("dt");
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("dt must be > 0");
    return v;
  }
  std::size_t stride() const { return static_cast<std::size_t>(cfg_.get_u64("stride", 1)); }
  std::uint64_t seed() const { return cfg_.get_u64("seed"); }

  ModelPtr model() const {
    const std::string name = cfg_.get_string("model");
    const auto params = cfg_.section("model");
    fqf_model* m = nullptr;
    if (name == "custom") {
      m = custom_model(params);
    } else {
      std::vector<std::string> keys;
      std::vector<const char*> names;
      std::vector<double> values;
      for (const auto& [k, v] : params) {
        keys.push_back(k);
        try {
          values.push_back(parse_real(v));
        } catch (const ConfigError& e) {
          throw ConfigError("model." + k + ": " + e.what());
        }
      }
      for (const auto& k : keys) names.push_back(k.c_str());
      check(fqf_model_preset(name.c_str(), names.data(), values.data(), values.size(), &m));
    }
    ModelPtr out(m);
    if (!fqf_model_is_valid(m)) {
      std::vector<char> buf(4096);
      size_t needed = 0;
      fqf_model_validation_summary(m, buf.data(), buf.size(), &needed);
      throw ConfigError("model failed validation:\n" + std::string(buf.data()));
    }
    return out;
  }

  static std::vector<double> interleave(const std::vector<std::complex<double>>& v, std::size_t dim,
                                        const std::string& key) {
    if (v.size() != dim * dim)
      throw ConfigError("model." + key + ": expected " + std::to_string(dim * dim) + " entries");
    std::vector<double> out;
    for (const auto& z : v) {
      out.push_back(z.real());
      out.push_back(z.imag());
    }
    return out;
  }

  fqf_model* custom_model(const std::map<std::string, std::string>& params) const {
    std::vector<std::size_t> dims;
    for (double d : cfg_.get_real_list("model.dims")) {
      if (d < 1 || d != std::floor(d)) throw ConfigError("model.dims: positive integers required");
      dims.push_back(static_cast<std::size_t>(d));
    }
    std::vector<int> signs;
    for (double s : cfg_.get_real_list("model.parity")) signs.push_back(static_cast<int>(s));
    std::size_t dim = 1, total = 0;
    for (auto d : dims) {
      dim *= d;
      total += d;
    }
    if (signs.size() != total) throw ConfigError("model.parity: need one sign per factor level");
    std::map<std::string, std::vector<double>> mats;
    for (const char* k : {"H", "S", "L", "S0", "L0", "L1"}) {
      if (params.count(k)) mats[k] = interleave(cfg_.get_complex_list(std::string("model.") + k), dim, k);
    }
    for (const auto& [k, v] : params)
      if (k != "dims" && k != "parity" && !mats.count(k))
        throw ConfigError("unknown custom model key 'model." + k + "'");
    auto ptr = [&](const char* k) { return mats.count(k) ? mats[k].data() : nullptr; };
    fqf_model* m = nullptr;
    check(fqf_model_custom(dims.size(), dims.data(), signs.data(), ptr("H"), ptr("S"), ptr("L"),
                           ptr("S0"), ptr("L0"), ptr("L1"), &m));
    return m;
  }

  StatePtr state(const fqf_model* m, const std::string& key) const {
    fqf_state* s = nullptr;
    check(fqf_state_preset(m, cfg_.get_string(key).c_str(), &s));
    return StatePtr(s);
  }

  std::vector<std::string> observables(const fqf_model* m) const {
    std::vector<std::string> obs;
    if (cfg_.has("observables")) {
      obs = cfg_.get_list("observables");
    } else {
      fqf_parity p;
      obs.push_back(fqf_model_observable_parity(m, "n", &p) == FQF_OK ? "n" : "I");
    }
    for (const auto& o : obs) {
      fqf_parity p;
      if (fqf_model_observable_parity(m, o.c_str(), &p) != FQF_OK)
        throw ConfigError("observable '" + o + "' is not in the model catalog");
    }
    return obs;
  }

  static std::vector<const char*> c_names(const std::vector<std::string>& v) {
    std::vector<const char*> out;
    for (const auto& s : v) out.push_back(s.c_str());
    return out;
  }

  void write_trajectory(const fqf_model* m, const fqf_trajectory* traj,
                        const std::vector<std::string>& obs, bool filter_export) const {
    const auto names = c_names(obs);
    fqf_table* t = nullptr;
    check(fqf_trajectory_table(m, traj, names.data(), names.size(), 0, &t));
    TablePtr ts(t);
    check(fqf_table_write_csv(ts.get(), path("timeseries.csv").c_str()));
    if (filter_export) {
      check(fqf_trajectory_table(m, traj, names.data(), names.size(), 1, &t));
      TablePtr fe(t);
      check(fqf_table_write_csv(fe.get(), path("filter.csv").c_str()));
    }
  }

  void master(Outcome& outcome) {
    auto m = model();
    auto rho0 = state(m.get(), "rho0");
    const auto obs = observables(m.get());
    fqf_trajectory* traj = nullptr;
    check(fqf_evolve_master(m.get(), rho0.get(), T(), dt(), stride(), &traj));
    TrajPtr tp(traj);
    write_trajectory(m.get(), tp.get(), obs, false);
    fqf_run_diagnostics d;
    check(fqf_trajectory_diagnostics(tp.get(), &d));
    outcome.add_diag(d);
  }

  void simulate(Outcome& outcome) {
    auto m = model();
    auto rho0 = state(m.get(), "rho0");
    const auto obs = observables(m.get());
    fqf_record* rec = nullptr;
    fqf_trajectory* traj = nullptr;
    check(fqf_simulate(m.get(), rho0.get(), T(), dt(), seed(), cfg_.get_u64("trajectory_id", 0),
                       stride(), &rec, &traj));
    RecordPtr rp(rec);
    TrajPtr tp(traj);
    check(fqf_record_write_csv(rp.get(), path("record.csv").c_str()));
    write_trajectory(m.get(), tp.get(), obs, true);
    fqf_run_diagnostics d;
    check(fqf_trajectory_diagnostics(tp.get(), &d));
    outcome.add_diag(d);
    outcome.add("counts", std::to_string(fqf_record_count_total(rp.get())));
  }

  void filter(Outcome& outcome) {
    auto m = model();
    auto rho0 = state(m.get(), "rho0");
    const auto obs = observables(m.get());
    fqf_record* rec = nullptr;
    check(fqf_record_read_csv(cfg_.get_string("record_path").c_str(), cfg_.get_real("dt", 0.0), &rec));
    RecordPtr rp(rec);
    fqf_trajectory* traj = nullptr;
    check(fqf_filter(m.get(), rho0.get(), rp.get(), stride(), &traj));
    TrajPtr tp(traj);
    check(fqf_record_write_csv(rp.get(), path("record.csv").c_str()));
    write_trajectory(m.get(), tp.get(), obs, true);
    fqf_run_diagnostics d;
    check(fqf_trajectory_diagnostics(tp.get(), &d));
    outcome.add_diag(d);
    double w = 0.0;
    for (size_t k = 0; k < fqf_trajectory_steps(tp.get()); ++k) w += fqf_trajectory_innovation(tp.get(), k);
    outcome.add("innovation_total", w);
  }

  void ensemble(Outcome& outcome) {
    auto m = model();
    auto rho0 = state(m.get(), "rho0");
    const auto obs = observables(m.get());
    const auto names = c_names(obs);
    fqf_ensemble_config ec{};
    ec.trajectories = static_cast<size_t>(cfg_.get_u64("ensemble.trajectories"));
    ec.seed = seed();
    ec.T = T();
    ec.dt = dt();
    ec.workers = static_cast<unsigned>(cfg_.get_u64("ensemble.workers", 0));
    std::vector<double> times = cfg_.has("ensemble.sample_times")
                                    ? cfg_.get_real_list("ensemble.sample_times")
                                    : std::vector<double>{ec.T};
    fqf_table* t = nullptr;
    fqf_ensemble_summary s{};
    check(fqf_ensemble(m.get(), rho0.get(), &ec, names.data(), names.size(), times.data(),
                       times.size(), &t, &s));
    TablePtr tp(t);
    check(fqf_table_write_csv(tp.get(), path("ensemble.csv").c_str()));
    outcome.add_diag(s.worst);
    outcome.add("innovation_mean", s.innovation_mean);
    outcome.add("innovation_std", s.innovation_std);
    outcome.add("max_odd_expectation", s.max_odd_expectation);
  }

  fqf_linear_model linear() const {
    fqf_linear_model lm{};
    lm.a = cfg_.get_real("classical.a");
    lm.c = cfg_.get_real("classical.c");
    lm.xi0_mean = cfg_.get_real("xi0.mean", 0.0);
    lm.xi0_var = cfg_.get_real("xi0.var", 1.0);
    lm.process_noise = cfg_.get_bool("classical.process_noise", true) ? 1 : 0;
    return lm;
  }

  // Reads record_path when given, otherwise synthesises a linear-model record.
  ObsRecordPtr classical_record(const fqf_linear_model& lm, bool allow_synthesis) {
    fqf_obs_record* rec = nullptr;
    if (cfg_.has("record_path")) {
      check(fqf_obs_record_read_csv(cfg_.get_string("record_path").c_str(), cfg_.get_real("dt", 0.0),
                                    &rec));
    } else {
      if (!allow_synthesis) throw ConfigError("nonlinear ksgrid models need record_path");
      fqf_table* path_table = nullptr;
      check(fqf_linear_simulate(&lm, T(), dt(), seed(), &rec, &path_table));
      TablePtr pt(path_table);
      check(fqf_table_write_csv(pt.get(), path("signal.csv").c_str()));
    }
    ObsRecordPtr out(rec);
    check(fqf_obs_record_write_csv(out.get(), path("record.csv").c_str()));
    return out;
  }

  void kalman(Outcome& outcome) {
    const auto lm = linear();
    auto rec = classical_record(lm, true);
    fqf_table* t = nullptr;
    check(fqf_kalman(&lm, rec.get(), &t));
    TablePtr tp(t);
    check(fqf_table_write_csv(tp.get(), path("timeseries.csv").c_str()));
    double sinf = 0.0;
    if (lm.process_noise && (lm.c != 0.0 || lm.a < 0.0)) {
      check(fqf_kalman_stationary_variance(lm.a, lm.c, &sinf));
      outcome.add("stationary_variance", sinf);
    }
    outcome.add("final_variance", fqf_table_value(tp.get(), fqf_table_rows(tp.get()) - 1, 2));
  }

  struct Poly {
    double c1, c3;
  };
  static double poly(double x, void* user) {
    const auto* p = static_cast<const Poly*>(user);
    return p->c1 * x + p->c3 * x * x * x;
  }
  struct Quad {
    double c1, c2;
  };
  static double quad(double x, void* user) {
    const auto* p = static_cast<const Quad*>(user);
    return p->c1 * x + p->c2 * x * x;
  }

  void ksgrid(Outcome& outcome) {
    const auto lm = linear();
    Poly g{lm.a, cfg_.get_real("ksgrid.cubic", 0.0)};
    Quad h{lm.c, cfg_.get_real("ksgrid.quadratic", 0.0)};
    const bool is_linear = g.c3 == 0.0 && h.c2 == 0.0;
    auto rec = classical_record(lm, is_linear);
    fqf_grid_spec grid{};
    const double sd = std::sqrt(lm.xi0_var);
    grid.x_min = cfg_.get_real("ksgrid.x_min", lm.xi0_mean - 10.0 * sd);
    grid.x_max = cfg_.get_real("ksgrid.x_max", lm.xi0_mean + 10.0 * sd);
    grid.nx = static_cast<size_t>(cfg_.get_u64("ksgrid.nx", 801));
    grid.init_mean = lm.xi0_mean;
    grid.init_var = lm.xi0_var;
    const std::vector<double> snaps =
        cfg_.has("ksgrid.snapshot_times") ? cfg_.get_real_list("ksgrid.snapshot_times") : std::vector<double>{};
    fqf_table *summary = nullptr, *snapshot = nullptr;
    check(fqf_ksgrid(poly, &g, quad, &h, rec.get(), &grid, snaps.data(), snaps.size(), &summary,
                     &snapshot));
    TablePtr st(summary), sn(snapshot);

    // Summary, with the Kalman estimate alongside when the model is linear.
    std::ofstream os(path("timeseries.csv"));
    if (!os) throw LibraryFailure(FQF_ERR_IO, "cannot write timeseries.csv", -1);
    TablePtr kt;
    if (is_linear) {
      fqf_table* k = nullptr;
      check(fqf_kalman(&lm, rec.get(), &k));
      kt.reset(k);
    }
    os << "t,mean,variance" << (kt ? ",kalman_mean,kalman_variance" : "") << '\n';
    double sup = 0.0;
    for (size_t r = 0; r < fqf_table_rows(st.get()); ++r) {
      os << fmt(fqf_table_value(st.get(), r, 0)) << ',' << fmt(fqf_table_value(st.get(), r, 1)) << ','
         << fmt(fqf_table_value(st.get(), r, 2));
      if (kt) {
        os << ',' << fmt(fqf_table_value(kt.get(), r, 1)) << ',' << fmt(fqf_table_value(kt.get(), r, 2));
        sup = std::max(sup, std::abs(fqf_table_value(st.get(), r, 1) - fqf_table_value(kt.get(), r, 1)));
      }
      os << '\n';
    }
    if (!os) throw LibraryFailure(FQF_ERR_IO, "write to timeseries.csv failed", -1);
    if (kt) outcome.add("sup_mean_gap_vs_kalman", sup);

    // One x,value table per snapshot time.
    for (size_t c = 1; c < fqf_table_columns(sn.get()); ++c) {
      const std::string label = fqf_table_column_name(sn.get(), c);  // "p@<t>"
      std::ofstream ds(path("density_t" + label.substr(2) + ".csv"));
      ds << "x,value\n";
      for (size_t r = 0; r < fqf_table_rows(sn.get()); ++r)
        ds << fmt(fqf_table_value(sn.get(), r, 0)) << ',' << fmt(fqf_table_value(sn.get(), r, c)) << '\n';
      if (!ds) throw LibraryFailure(FQF_ERR_IO, "cannot write density snapshot", -1);
    }
    outcome.add("snapshots", std::to_string(fqf_table_columns(sn.get()) - 1));
  }

  const Config& cfg_;
  fs::path out_;
};

void write_meta(const fs::path& out, const Config& cfg, const Outcome& outcome, int exit_code,
                const std::string& status, long long step, const std::string& message) {
  std::ofstream os(out / "meta.txt");
  os << "# fqf run metadata\n" << cfg.dump();
  os << "[result]\n";
  os << "library_version = " << fqf_version() << '\n';
  os << "exit_code = " << exit_code << '\n';
  os << "status = " << status << '\n';
  if (step >= 0) os << "failing_step = " << step << '\n';
  if (!message.empty()) {
    std::string oneline = message;
    std::replace(oneline.begin(), oneline.end(), '\n', ' ');
    std::replace(oneline.begin(), oneline.end(), '#', ' ');
    os << "message = " << oneline << '\n';
  }
  for (const auto& [k, v] : outcome.summary) os << k << " = " << v << '\n';
}

// Rejects typos up front; model.* is checked by the model constructors.
void check_known_keys(const Config& cfg) {
  static const std::set<std::string> known = {
      "command", "model", "rho0", "T", "dt", "seed", "trajectory_id", "stride", "observables",
      "output_dir", "record_path", "ensemble.trajectories", "ensemble.sample_times",
      "ensemble.workers", "classical.a", "classical.c", "classical.process_noise", "xi0.mean",
      "xi0.var", "ksgrid.x_min", "ksgrid.x_max", "ksgrid.nx", "ksgrid.snapshot_times",
      "ksgrid.cubic", "ksgrid.quadratic"};
  std::string bad;
  for (const auto& [k, v] : cfg.entries())
    if (!known.count(k) && k.rfind("model.", 0) != 0) bad += (bad.empty() ? "" : ", ") + k;
  if (!bad.empty()) throw ConfigError("unrecognised keys: " + bad);
}

fs::path resolve_output(const Config& cfg, const std::optional<std::string>& flag,
                        const std::string& command) {
  if (flag) return *flag;
  if (cfg.has("output_dir")) return cfg.get_string("output_dir");
  const char* root = std::getenv(kOutputRootEnv);
  return fs::path(root && *root ? root : "fqf_output") / command;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"fqf: counting-record filtering toolkit"};
  std::string command, config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  app.add_option("command", command, "master | simulate | filter | ensemble | kalman | ksgrid");
  app.add_option("--config", config_path, "configuration file (key = value)")->required();
  app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--out", out, "output directory");
  app.set_version_flag("--version", std::string(fqf_version()));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  Config cfg;
  try {
    cfg = Config::load(config_path);
    if (seed) cfg.set("seed", std::to_string(*seed));
    if (command.empty()) command = cfg.get_string("command");
    else if (cfg.has("command") && cfg.get_string("command") != command)
      throw ConfigError("command '" + command + "' conflicts with config command '" +
                        cfg.get_string("command") + "'");
    cfg.set("command", command);
    cfg.get_string("command");
  } catch (const ConfigError& e) {
    std::cerr << "fqf: config error: " << e.what() << '\n';
    return kExitConfig;
  }

  fs::path out_dir;
  try {
    out_dir = resolve_output(cfg, out, command);
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "fqf: cannot create output directory: " << e.what() << '\n';
    return kExitFailure;
  }

  Outcome outcome;
  int rc = kExitOk;
  std::string status = "ok", message;
  long long step = -1;
  try {
    check_known_keys(cfg);
    Runner(cfg, out_dir).run(command, outcome);
  } catch (const ConfigError& e) {
    rc = kExitConfig;
    status = "config_error";
    message = e.what();
  } catch (const LibraryFailure& e) {
    rc = exit_code_for(e.status);
    status = fqf_status_string(e.status);
    message = e.what();
    step = e.step;
  } catch (const std::exception& e) {
    rc = kExitFailure;
    status = "internal";
    message = e.what();
  }
  if (rc != kExitOk) {
    std::cerr << "fqf: " << status;
    if (step >= 0) std::cerr << " at step " << step;
    std::cerr << ": " << message << '\n';
  }
  write_meta(out_dir, cfg, outcome, rc, status, step, message);
  return rc;
}

}  // namespace fqf::cli
