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

// Exercises the shared library through its C header only.

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "fqf/fqf.h"

namespace fs = std::filesystem;

namespace {

fqf_model* dot(double gl, double gr) {
  const char* names[] = {"gamma_L", "gamma_R"};
  const double values[] = {gl, gr};
  fqf_model* m = nullptr;
  REQUIRE(fqf_model_preset("dot", names, values, 2, &m) == FQF_OK);
  return m;
}

fqf_model* photodetector(double kappa, double gamma, double g0, double g1) {
  const char* names[] = {"kappa", "gamma", "gamma0", "gamma1"};
  const double values[] = {kappa, gamma, g0, g1};
  fqf_model* m = nullptr;
  REQUIRE(fqf_model_preset("photodetector", names, values, 4, &m) == FQF_OK);
  return m;
}

fqf_state* state(const fqf_model* m, const char* spec) {
  fqf_state* s = nullptr;
  REQUIRE(fqf_state_preset(m, spec, &s) == FQF_OK);
  return s;
}

double expect(const fqf_model* m, const fqf_state* s, const char* obs) {
  double re = 0.0, im = 0.0;
  REQUIRE(fqf_state_expectation(m, s, obs, &re, &im) == FQF_OK);
  return re;
}

std::string scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fqf_capi_tests";
  fs::create_directories(dir);
  return (dir / name).string();
}

long column_of(const fqf_table* t, const char* name) {
  for (size_t c = 0; c < fqf_table_columns(t); ++c)
    if (std::strcmp(fqf_table_column_name(t, c), name) == 0) return static_cast<long>(c);
  return -1;
}

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::strlen(fqf_version()) > 0);
  CHECK(std::string(fqf_status_string(FQF_OK)) == "ok");
  CHECK(std::string(fqf_status_string(FQF_ERR_DEGENERATE_RATIO)) == "degenerate_ratio");
}

TEST_CASE("preset construction and error reporting") {
  fqf_model* m = nullptr;
  CHECK(fqf_model_preset("nonsense", nullptr, nullptr, 0, &m) == FQF_ERR_INVALID_ARGUMENT);
  CHECK(m == nullptr);
  CHECK(std::strlen(fqf_last_error_message()) > 0);
  CHECK(fqf_last_error_step() == -1);

  const char* bad[] = {"gamma_X"};
  const double v[] = {1.0};
  CHECK(fqf_model_preset("dot", bad, v, 1, &m) == FQF_ERR_INVALID_ARGUMENT);
  CHECK(std::string(fqf_last_error_message()).find("gamma_X") != std::string::npos);
  CHECK(fqf_model_preset("dot", nullptr, nullptr, 0, nullptr) == FQF_ERR_INVALID_ARGUMENT);

  m = dot(1.0, 2.0);
  CHECK(fqf_model_dim(m) == 2);
  CHECK(fqf_model_is_valid(m) == 1);
  CHECK(fqf_model_filtering_available(m) == 1);
  fqf_parity p;
  REQUIRE(fqf_model_observable_parity(m, "c", &p) == FQF_OK);
  CHECK(p == FQF_PARITY_ODD);
  int herm = 0;
  REQUIRE(fqf_model_observable_is_hermitian(m, "c", &herm) == FQF_OK);
  CHECK(herm == 0);
  CHECK(fqf_model_observable_parity(m, "zz", &p) == FQF_ERR_INVALID_ARGUMENT);
  CHECK(fqf_model_observable_count(m) >= 4);
  CHECK(fqf_model_observable_name(m, 1000) == nullptr);
  fqf_model_free(m);
  fqf_model_free(nullptr);
}

TEST_CASE("custom models are validated, not rejected") {
  // One fermion mode with H = c (odd and not Hermitian).
  const size_t dims[] = {2};
  const int signs[] = {1, -1};
  const double c[] = {0, 0, 1, 0, 0, 0, 0, 0};
  fqf_model* m = nullptr;
  REQUIRE(fqf_model_custom(1, dims, signs, c, nullptr, nullptr, nullptr, c, nullptr, &m) == FQF_OK);
  CHECK(fqf_model_is_valid(m) == 0);
  size_t needed = 0;
  CHECK(fqf_model_validation_summary(m, nullptr, 0, &needed) == FQF_OK);
  std::vector<char> buf(needed);
  REQUIRE(fqf_model_validation_summary(m, buf.data(), buf.size(), &needed) == FQF_OK);
  CHECK(std::string(buf.data()).find("Hermitian") != std::string::npos);
  fqf_state* s = nullptr;
  REQUIRE(fqf_state_preset(m, "mixed", &s) == FQF_OK);
  fqf_trajectory* t = nullptr;
  CHECK(fqf_evolve_master(m, s, 1.0, 0.1, 1, &t) == FQF_ERR_INVALID_MODEL);
  CHECK(t == nullptr);
  fqf_state_free(s);
  fqf_model_free(m);

  const int bad_signs[] = {1, 2};
  CHECK(fqf_model_custom(1, dims, bad_signs, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, &m) !=
        FQF_OK);
}

TEST_CASE("states") {
  fqf_model* m = dot(1.0, 2.0);
  fqf_state* s = state(m, "steady");
  CHECK(expect(m, s, "n") == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  double rho[8];
  REQUIRE(fqf_state_matrix(s, rho, 8) == FQF_OK);
  CHECK(rho[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(fqf_state_matrix(s, rho, 4) == FQF_ERR_INVALID_ARGUMENT);
  fqf_state_free(s);

  s = state(m, "diag:0.25,0.75");
  CHECK(expect(m, s, "n") == doctest::Approx(0.75));
  fqf_state_free(s);

  fqf_state* out = nullptr;
  CHECK(fqf_state_preset(m, "diag:0.5", &out) == FQF_ERR_DIMENSION_MISMATCH);
  CHECK(fqf_state_preset(m, "basis:7", &out) != FQF_OK);
  CHECK(fqf_state_preset(m, "excited", &out) == FQF_ERR_INVALID_ARGUMENT);
  // Odd coherence on a fermion mode.
  const double coherent[] = {0.5, 0, 0.5, 0, 0.5, 0, 0.5, 0};
  CHECK(fqf_state_from_matrix(m, coherent, &out) == FQF_ERR_INVARIANT_VIOLATION);
  CHECK(out == nullptr);
  fqf_model_free(m);
}

TEST_CASE("master equation through the C API") {
  fqf_model* m = photodetector(1.0, 0.0, 0.0, 0.0);
  fqf_state* s = state(m, "excited");
  fqf_trajectory* t = nullptr;
  REQUIRE(fqf_evolve_master(m, s, 5.0, 1e-3, 250, &t) == FQF_OK);
  CHECK(fqf_trajectory_length(t) == 21);
  for (size_t i = 0; i < fqf_trajectory_length(t); ++i) {
    double re = 0.0, im = 0.0;
    REQUIRE(fqf_trajectory_expectation(m, t, i, "n", &re, &im) == FQF_OK);
    CHECK(std::abs(re - std::exp(-fqf_trajectory_time(t, i))) <= 1e-8);
  }
  CHECK(fqf_trajectory_step_index(t, 20) == 5000);
  CHECK(fqf_trajectory_steps(t) == 0);
  fqf_run_diagnostics d;
  REQUIRE(fqf_trajectory_diagnostics(t, &d) == FQF_OK);
  CHECK(d.max_trace_error <= 1e-10);
  fqf_trajectory_free(t);
  CHECK(fqf_steady_state(m, &s) == FQF_ERR_NON_UNIQUE_STEADY_STATE);
  fqf_model_free(m);
}

TEST_CASE("simulate, filter and the scalar filter agree") {
  fqf_model* m = dot(1.0, 2.0);
  fqf_state* s = state(m, "occupied");
  fqf_record* rec = nullptr;
  fqf_trajectory* truth = nullptr;
  REQUIRE(fqf_simulate(m, s, 10.0, 1e-3, 42, 0, 1, &rec, &truth) == FQF_OK);
  CHECK(fqf_record_length(rec) == 10000);
  CHECK(fqf_record_seed(rec) == 42);
  CHECK(fqf_record_count_total(rec) > 0);

  fqf_trajectory* filt = nullptr;
  REQUIRE(fqf_filter(m, s, rec, 1, &filt) == FQF_OK);
  std::vector<double> n(fqf_record_length(rec) + 1);
  size_t excursions = 99;
  REQUIRE(fqf_dot_scalar_filter(rec, 1.0, 2.0, 1.0, n.data(), n.size(), &excursions) == FQF_OK);
  CHECK(excursions == 0);
  for (size_t i = 0; i < fqf_trajectory_length(filt); ++i) {
    double a = 0.0, b = 0.0, im = 0.0;
    REQUIRE(fqf_trajectory_expectation(m, filt, i, "n", &a, &im) == FQF_OK);
    REQUIRE(fqf_trajectory_expectation(m, truth, i, "n", &b, &im) == FQF_OK);
    REQUIRE(a == b);
    REQUIRE(std::abs(a - n[i]) <= 1e-8);
  }
  CHECK(fqf_dot_scalar_filter(rec, 1.0, 2.0, 1.0, n.data(), 5, nullptr) == FQF_ERR_INVALID_ARGUMENT);

  fqf_table* tab = nullptr;
  const char* obs[] = {"n", "c"};
  REQUIRE(fqf_trajectory_table(m, filt, obs, 2, 1, &tab) == FQF_OK);
  CHECK(std::string(fqf_table_column_name(tab, 0)) == "step");
  CHECK(column_of(tab, "dW") >= 0);
  CHECK(column_of(tab, "c_re") >= 0);
  CHECK(column_of(tab, "c_im") >= 0);
  CHECK(fqf_table_rows(tab) == 10000);
  fqf_table_free(tab);

  // Round trip through CSV.
  const auto path = scratch("record.csv");
  REQUIRE(fqf_record_write_csv(rec, path.c_str()) == FQF_OK);
  fqf_record* back = nullptr;
  REQUIRE(fqf_record_read_csv(path.c_str(), 0.0, &back) == FQF_OK);
  std::vector<uint8_t> a(fqf_record_length(rec)), b(fqf_record_length(back));
  REQUIRE(fqf_record_increments(rec, a.data(), a.size()) == FQF_OK);
  REQUIRE(fqf_record_increments(back, b.data(), b.size()) == FQF_OK);
  CHECK(a == b);
  CHECK(fqf_record_dt(back) == doctest::Approx(1e-3).epsilon(1e-12));

  fqf_record_free(back);
  fqf_trajectory_free(filt);
  fqf_trajectory_free(truth);
  fqf_record_free(rec);
  fqf_state_free(s);
  fqf_model_free(m);
}

TEST_CASE("failures carry the step index") {
  fqf_model* m = dot(0.0, 1.0);
  fqf_state* s = state(m, "empty");
  const uint8_t inc[] = {0, 0, 0, 1, 0};
  fqf_record* rec = nullptr;
  REQUIRE(fqf_record_create(0.0, 1e-3, inc, 5, 0, 0, &rec) == FQF_OK);
  fqf_trajectory* t = nullptr;
  CHECK(fqf_filter(m, s, rec, 1, &t) == FQF_ERR_DEGENERATE_RATIO);
  CHECK(fqf_last_error_step() == 3);
  // Errors are per thread.
  long long other = 0;
  std::thread([&] { other = fqf_last_error_step(); }).join();
  CHECK(other == -1);

  const uint8_t two[] = {2};
  fqf_record* bad = nullptr;
  CHECK(fqf_record_create(0.0, 1e-3, two, 1, 0, 0, &bad) != FQF_OK);
  CHECK(fqf_record_create(0.0, 0.0, inc, 5, 0, 0, &bad) != FQF_OK);
  CHECK(fqf_record_read_csv(scratch("does_not_exist.csv").c_str(), 0.0, &bad) == FQF_ERR_IO);
  fqf_record_free(rec);
  fqf_state_free(s);
  fqf_model_free(m);
}

TEST_CASE("photodetector moments and scalar filter") {
  fqf_model* m = photodetector(1.0, 1.0, 1.0, 1.0);
  fqf_state* s = state(m, "mixed");
  double m0[7];
  REQUIRE(fqf_photodetector_moments(m, s, m0) == FQF_OK);
  CHECK(m0[0] == doctest::Approx(0.5));
  CHECK(m0[1] == doctest::Approx(1.0 / 3.0));
  fqf_record* rec = nullptr;
  fqf_trajectory* t = nullptr;
  REQUIRE(fqf_simulate(m, s, 2.0, 1e-3, 9, 0, 1, &rec, &t) == FQF_OK);
  const double params[] = {1.0, 1.0, 1.0, 1.0};
  std::vector<double> out(7 * (fqf_record_length(rec) + 1));
  REQUIRE(fqf_photodetector_scalar_filter(rec, params, m0, FQF_DETECTOR_DERIVED, out.data(), out.size()) ==
          FQF_OK);
  for (size_t i = 0; i < fqf_trajectory_length(t); i += 100) {
    double re = 0.0, im = 0.0;
    REQUIRE(fqf_trajectory_expectation(m, t, i, "n", &re, &im) == FQF_OK);
    CHECK(std::abs(out[7 * i] - re) <= 1e-8);
  }
  fqf_trajectory_free(t);
  fqf_record_free(rec);
  fqf_state_free(s);
  fqf_model_free(m);
}

TEST_CASE("ensemble") {
  fqf_model* m = dot(1.0, 2.0);
  fqf_state* s = state(m, "occupied");
  fqf_ensemble_config cfg{200, 5, 2.0, 1e-3, 2};
  const char* obs[] = {"n"};
  const double times[] = {0.5, 2.0};
  fqf_table* t = nullptr;
  fqf_ensemble_summary sum{};
  REQUIRE(fqf_ensemble(m, s, &cfg, obs, 1, times, 2, &t, &sum) == FQF_OK);
  REQUIRE(fqf_table_rows(t) == 2);
  const long mean = column_of(t, "n_mean"), se = column_of(t, "n_se"), master = column_of(t, "n_master");
  REQUIRE(mean > 0);
  REQUIRE(se > 0);
  REQUIRE(master > 0);
  for (size_t r = 0; r < 2; ++r)
    CHECK(std::abs(fqf_table_value(t, r, mean) - fqf_table_value(t, r, master)) <=
          4.0 * fqf_table_value(t, r, se) + 1e-3);
  CHECK(sum.max_odd_expectation <= 1e-12);
  CHECK(sum.total_jumps > 0);
  fqf_table_free(t);
  const char* odd[] = {"nope"};
  CHECK(fqf_ensemble(m, s, &cfg, odd, 1, times, 2, &t, &sum) == FQF_ERR_INVALID_ARGUMENT);
  fqf_state_free(s);
  fqf_model_free(m);
}

namespace {
double minus_x(double x, void*) { return -x; }
double ident(double x, void*) { return x; }
}  // namespace

TEST_CASE("classical baselines through the C API") {
  const fqf_linear_model lm{-1.0, 1.0, 0.0, 1.0, 1};
  fqf_obs_record* rec = nullptr;
  fqf_table* path = nullptr;
  REQUIRE(fqf_linear_simulate(&lm, 5.0, 1e-3, 77, &rec, &path) == FQF_OK);
  CHECK(fqf_obs_record_length(rec) == 5000);
  CHECK(fqf_table_rows(path) == 5001);

  fqf_table* kf = nullptr;
  REQUIRE(fqf_kalman(&lm, rec, &kf) == FQF_OK);
  double sinf = 0.0;
  REQUIRE(fqf_kalman_stationary_variance(-1.0, 1.0, &sinf) == FQF_OK);
  CHECK(std::abs(fqf_table_value(kf, fqf_table_rows(kf) - 1, 2) - sinf) <= 1e-3);
  CHECK(fqf_kalman_stationary_variance(1.0, 0.0, &sinf) == FQF_ERR_INVALID_ARGUMENT);

  const fqf_grid_spec grid{-10.0, 10.0, 801, 0.0, 1.0};
  const double snaps[] = {2.5};
  fqf_table *summary = nullptr, *dens = nullptr;
  REQUIRE(fqf_ksgrid(minus_x, nullptr, ident, nullptr, rec, &grid, snaps, 1, &summary, &dens) == FQF_OK);
  double sup = 0.0;
  for (size_t r = 0; r < fqf_table_rows(summary); ++r)
    sup = std::max(sup, std::abs(fqf_table_value(summary, r, 1) - fqf_table_value(kf, r, 1)));
  CHECK(sup <= 1e-2);
  CHECK(fqf_table_columns(dens) == 2);
  CHECK(std::string(fqf_table_column_name(dens, 1)).rfind("p@", 0) == 0);

  const fqf_grid_spec narrow{-1.0, 1.0, 41, 0.0, 0.1};
  CHECK(fqf_ksgrid(minus_x, nullptr, ident, nullptr, rec, &narrow, nullptr, 0, &summary, nullptr) ==
        FQF_ERR_BOUNDARY_MASS_LEAK);
  CHECK(fqf_ksgrid(nullptr, nullptr, ident, nullptr, rec, &grid, nullptr, 0, &summary, nullptr) ==
        FQF_ERR_INVALID_ARGUMENT);

  // Observation record and table round trips.
  const auto rpath = scratch("obs.csv");
  REQUIRE(fqf_obs_record_write_csv(rec, rpath.c_str()) == FQF_OK);
  fqf_obs_record* back = nullptr;
  REQUIRE(fqf_obs_record_read_csv(rpath.c_str(), 0.0, &back) == FQF_OK);
  CHECK(fqf_obs_record_length(back) == 5000);
  fqf_table* kf2 = nullptr;
  REQUIRE(fqf_kalman(&lm, back, &kf2) == FQF_OK);
  CHECK(fqf_table_value(kf2, 4999, 1) == fqf_table_value(kf, 4999, 1));

  const auto tpath = scratch("kalman.csv");
  REQUIRE(fqf_table_write_csv(kf, tpath.c_str()) == FQF_OK);
  fqf_table* kf3 = nullptr;
  REQUIRE(fqf_table_read_csv(tpath.c_str(), &kf3) == FQF_OK);
  CHECK(fqf_table_value(kf3, 1234, 2) == fqf_table_value(kf, 1234, 2));

  for (fqf_table* t : {path, kf, summary, dens, kf2, kf3}) fqf_table_free(t);
  fqf_obs_record_free(back);
  fqf_obs_record_free(rec);
}
