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

#include <map>
#include <string>
#include <vector>

#include "fqf/algebra.hpp"
#include "fqf/record.hpp"

namespace fqf {

/// Jump-conditioning threshold: a detection demanded while the filtered
/// intensity tr(L0 rho L0*) is below this is a record/model mismatch.
inline constexpr double kRatioFloor = 1e-12;

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double violation = 0.0;  // max violation norm measured for the check
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  /// False when L0 vanishes: nothing can be counted on fermion channel 0.
  bool filtering_available = false;

  bool ok() const noexcept;
  std::string summary() const;
};

struct ChannelFlags {
  bool boson = false;
  bool fermion1 = false;
  bool fermion0 = false;
};

/// (H, S, L, S0, L0, L1) on one composite space. Absent channels are zero
/// couplings with identity scattering. Validation runs once at construction;
/// dynamics entry points refuse models whose report is not ok().
class SystemModel {
 public:
  struct Operators {
    GradedOperator H;
    GradedOperator S;
    GradedOperator L;
    GradedOperator S0;
    GradedOperator L0;
    GradedOperator L1;
  };

  SystemModel(std::string name, Operators ops,
              std::map<std::string, GradedOperator> observables = {});

  const std::string& name() const noexcept { return name_; }
  const CompositeSpace& space() const noexcept { return ops_.H.space(); }
  std::size_t dim() const noexcept { return ops_.H.dim(); }

  const GradedOperator& H() const noexcept { return ops_.H; }
  const GradedOperator& S() const noexcept { return ops_.S; }
  const GradedOperator& L() const noexcept { return ops_.L; }
  const GradedOperator& S0() const noexcept { return ops_.S0; }
  const GradedOperator& L0() const noexcept { return ops_.L0; }
  const GradedOperator& L1() const noexcept { return ops_.L1; }

  const ChannelFlags& channels() const noexcept { return channels_; }
  const ValidationReport& report() const noexcept { return report_; }

  /// Named operators usable as tracked observables ("I" is always present).
  const std::map<std::string, GradedOperator>& observables() const noexcept { return observables_; }
  const GradedOperator& observable(const std::string& name) const;

  /// Squared operator norm of L0: an upper bound on the jump intensity.
  double max_intensity() const noexcept { return max_intensity_; }

  /// Throws InvalidModel when the report carries failures.
  void require_valid() const;

  // Cached products used in per-step maps.
  const Matrix& LdagL() const noexcept { return LdagL_; }
  const Matrix& L0dagL0() const noexcept { return L0dagL0_; }
  const Matrix& L1L1dag() const noexcept { return L1L1dag_; }

 private:
  std::string name_;
  Operators ops_;
  std::map<std::string, GradedOperator> observables_;
  ChannelFlags channels_;
  ValidationReport report_;
  double max_intensity_ = 0.0;
  Matrix LdagL_, L0dagL0_, L1L1dag_;
};

ValidationReport validate(const SystemModel::Operators& ops);
inline const ValidationReport& validate(const SystemModel& model) { return model.report(); }

// ---------------------------------------------------------------------------
// Quantum dot between a perfect emitter (channel 1) and absorber (channel 0).

struct DotParams {
  double gamma_L = 0.0;
  double gamma_R = 0.0;
};

SystemModel quantum_dot(const DotParams& p);

struct DotFilterTrace {
  std::vector<double> t;
  std::vector<double> n;  // n_hat at each grid time, t.size() == steps + 1
  std::vector<StepTelemetry> telemetry;
  std::size_t excursions = 0;  // grid points with n_hat outside [0,1] by > 1e-6
  double max_excursion = 0.0;
};

/// Closed scalar filter for the dot occupation driven by a counting record,
/// discretised exactly like the matrix filter: Euler drift on no-count steps,
/// the jump map (n_hat -> 0) on count steps.
DotFilterTrace dot_scalar_filter(const MeasurementRecord& record, const DotParams& p, double n0);

// ---------------------------------------------------------------------------
// Two-level atom cascaded into a three-level photodetector.

struct DetectorParams {
  double kappa = 0.0;
  double gamma = 0.0;
  double gamma0 = 0.0;
  double gamma1 = 0.0;
};

/// Space is atom (2, ungraded) x detector (3, theta = diag(+1, +1, -1)).
SystemModel photodetector(const DetectorParams& p);

/// The six conditional moments that close the photodetector filter:
/// n, sigma22, sigma12 sigma+, sigma11 n, sigma22 n, sigma33 n.
struct DetectorMoments {
  double n = 0.0;
  double s22 = 0.0;
  Complex s12p{0.0, 0.0};
  double s11pm = 0.0;
  double s22pm = 0.0;
  double s33pm = 0.0;
};

enum class DetectorFilterForm {
  /// Drift of sigma12+ includes the +sqrt(kappa gamma) sigma22+- term that
  /// the Heisenberg generator produces.
  derived,
  /// Drift of sigma12+ exactly as usually quoted, without that term.
  as_printed,
};

struct DetectorFilterTrace {
  std::vector<double> t;
  std::vector<DetectorMoments> moments;  // size steps + 1
};

DetectorFilterTrace photodetector_scalar_filter(const MeasurementRecord& record,
                                                const DetectorParams& p,
                                                const DetectorMoments& initial,
                                                DetectorFilterForm form = DetectorFilterForm::derived);

/// Moments of a 6x6 photodetector density matrix.
DetectorMoments detector_moments(const SystemModel& photodetector_model, const Matrix& rho);

}  // namespace fqf
