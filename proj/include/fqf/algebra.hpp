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

// Parity-graded operator algebra on small dense Hilbert spaces.
//
// A GradedSpace is one tensor factor with a diagonal parity operator theta.
// A CompositeSpace is an ordered list of factors; its theta is the Kronecker
// product of the factor thetas. GradedOperator couples a dense matrix to the
// composite it acts on and classifies it as even, odd or mixed under
// tau(X) = theta X theta.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fqf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Relative tolerance used for parity classification.
inline constexpr double kParityTolerance = 1e-12;

enum class SpaceKind { fermionic, trivial };
enum class Parity { even, odd, mixed };

const char* to_string(Parity p) noexcept;

class GradedSpace {
 public:
  /// Fermionic factor with the given diagonal of theta (entries +1 or -1).
  static GradedSpace fermionic(std::vector<int> parity_signs);
  /// Bosonic or otherwise ungraded factor: theta = I.
  static GradedSpace trivial(std::size_t dim);

  std::size_t dim() const noexcept { return signs_.size(); }
  std::span<const int> parity_signs() const noexcept { return signs_; }
  SpaceKind kind() const noexcept { return kind_; }

  bool operator==(const GradedSpace&) const = default;

 private:
  GradedSpace(std::vector<int> signs, SpaceKind kind);

  std::vector<int> signs_;
  SpaceKind kind_;
};

class CompositeSpace {
 public:
  CompositeSpace() = default;
  explicit CompositeSpace(std::vector<GradedSpace> factors);
  CompositeSpace(std::initializer_list<GradedSpace> factors);

  std::size_t dim() const noexcept;
  std::span<const GradedSpace> factors() const noexcept { return factors_; }
  /// Diagonal of theta for the whole composite.
  std::vector<int> parity_signs() const;
  Matrix theta() const;
  /// True when at least one factor carries a non-trivial grading.
  bool has_fermionic_grading() const noexcept;

  CompositeSpace concat(const CompositeSpace& other) const;

  bool operator==(const CompositeSpace&) const = default;

 private:
  std::vector<GradedSpace> factors_;
};

class GradedOperator {
 public:
  GradedOperator(Matrix matrix, CompositeSpace space);

  static GradedOperator identity(const CompositeSpace& space);
  static GradedOperator zero(const CompositeSpace& space);

  const Matrix& matrix() const noexcept { return matrix_; }
  const CompositeSpace& space() const noexcept { return space_; }
  Parity parity() const noexcept { return parity_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

  GradedOperator adjoint() const;

  friend GradedOperator operator+(const GradedOperator& a, const GradedOperator& b);
  friend GradedOperator operator-(const GradedOperator& a, const GradedOperator& b);
  friend GradedOperator operator*(const GradedOperator& a, const GradedOperator& b);
  friend GradedOperator operator*(Complex s, const GradedOperator& a);
  friend GradedOperator operator-(const GradedOperator& a);

 private:
  Matrix matrix_;
  CompositeSpace space_;
  Parity parity_;
};

/// Classify a matrix against the given theta diagonal.
Parity classify_parity(const Matrix& m, std::span<const int> signs);

/// theta X theta.
GradedOperator tau(const GradedOperator& x);

struct ParityParts {
  GradedOperator even;
  GradedOperator odd;
};
ParityParts parity_decompose(const GradedOperator& x);

/// Antisymmetric tensor product: X1 (x) X2_even + X1 theta1 (x) X2_odd.
/// Reduces to the Kronecker product whenever either side is ungraded.
GradedOperator graded_tensor(const GradedOperator& x1, const GradedOperator& x2);

/// Embed an operator on composite[target_index] into the full composite.
GradedOperator ampliate(const GradedOperator& x, std::size_t target_index,
                        std::span<const GradedSpace> composite);

GradedOperator commutator(const GradedOperator& a, const GradedOperator& b);
GradedOperator anticommutator(const GradedOperator& a, const GradedOperator& b);

struct FermionMode {
  GradedOperator c;
  GradedOperator c_dag;
  GradedOperator n;
};
/// Single fermion mode, basis (unoccupied, occupied), theta = diag(+1, -1).
FermionMode build_fermion_mode();

struct TwoLevel {
  GradedOperator lower;  // sigma_-
  GradedOperator raise;  // sigma_+
  GradedOperator x;
  GradedOperator y;
  GradedOperator z;
  GradedOperator n;  // sigma_+ sigma_-
};
/// Two-level atom on an ungraded space, basis (ground, excited).
TwoLevel build_two_level();

/// Parity of each |j><k|, indexed [j-1][k-1].
using ThreeLevelParity = std::array<std::array<Parity, 3>, 3>;

/// sigma_32 and sigma_13 (and their adjoints) odd, everything else even.
ThreeLevelParity detector_parity_assignment();

class ThreeLevel {
 public:
  /// 1-based level indices.
  const GradedOperator& sigma(int j, int k) const;
  const GradedSpace& space() const noexcept { return space_; }

 private:
  friend ThreeLevel build_three_level(const ThreeLevelParity&);
  ThreeLevel(GradedSpace space, std::vector<GradedOperator> ops);

  GradedSpace space_;
  std::vector<GradedOperator> ops_;
};

/// Builds the unit operators sigma_jk = |j><k| on C^3. The grading is read
/// off the assignment; it must be multiplicatively consistent.
ThreeLevel build_three_level(const ThreeLevelParity& assignment);

/// Frobenius norm.
double norm(const Matrix& m);

}  // namespace fqf
