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

#include "fqf/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "fqf/error.hpp"

namespace fqf {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Splits m into the blocks that commute / anticommute with theta.
std::pair<Matrix, Matrix> split_by_signs(const Matrix& m, std::span<const int> signs) {
  Matrix even = m;
  Matrix odd = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (signs[i] * signs[j] < 0) {
        odd(i, j) = m(i, j);
        even(i, j) = 0.0;
      }
  return {even, odd};
}

void require_same_space(const GradedOperator& a, const GradedOperator& b, const char* what) {
  if (a.dim() != b.dim() || !(a.space() == b.space()))
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": operands act on different spaces (" +
                    std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

}  // namespace

const char* to_string(Parity p) noexcept {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::mixed: return "mixed";
  }
  return "?";
}

double norm(const Matrix& m) { return m.norm(); }

// ---------------------------------------------------------------------------
// Spaces

GradedSpace::GradedSpace(std::vector<int> signs, SpaceKind kind)
    : signs_(std::move(signs)), kind_(kind) {
  if (signs_.empty()) throw Error(ErrorCode::InvalidArgument, "graded space must have dim >= 1");
  for (int s : signs_)
    if (s != 1 && s != -1)
      throw Error(ErrorCode::InvalidArgument, "parity signs must be +1 or -1");
  if (kind_ == SpaceKind::trivial &&
      std::any_of(signs_.begin(), signs_.end(), [](int s) { return s != 1; }))
    throw Error(ErrorCode::InvalidArgument, "trivial space requires theta = I");
}

GradedSpace GradedSpace::fermionic(std::vector<int> parity_signs) {
  return GradedSpace(std::move(parity_signs), SpaceKind::fermionic);
}

GradedSpace GradedSpace::trivial(std::size_t dim) {
  return GradedSpace(std::vector<int>(dim, 1), SpaceKind::trivial);
}

CompositeSpace::CompositeSpace(std::vector<GradedSpace> factors) : factors_(std::move(factors)) {}
CompositeSpace::CompositeSpace(std::initializer_list<GradedSpace> factors) : factors_(factors) {}

std::size_t CompositeSpace::dim() const noexcept {
  std::size_t d = 1;
  for (const auto& f : factors_) d *= f.dim();
  return factors_.empty() ? 0 : d;
}

std::vector<int> CompositeSpace::parity_signs() const {
  std::vector<int> signs{1};
  for (const auto& f : factors_) {
    std::vector<int> next;
    next.reserve(signs.size() * f.dim());
    for (int a : signs)
      for (int b : f.parity_signs()) next.push_back(a * b);
    signs = std::move(next);
  }
  if (factors_.empty()) signs.clear();
  return signs;
}

Matrix CompositeSpace::theta() const {
  const auto signs = parity_signs();
  Matrix t = Matrix::Zero(signs.size(), signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) t(i, i) = signs[i];
  return t;
}

bool CompositeSpace::has_fermionic_grading() const noexcept {
  return std::any_of(factors_.begin(), factors_.end(), [](const GradedSpace& f) {
    return std::any_of(f.parity_signs().begin(), f.parity_signs().end(),
                       [](int s) { return s < 0; });
  });
}

CompositeSpace CompositeSpace::concat(const CompositeSpace& other) const {
  std::vector<GradedSpace> all = factors_;
  all.insert(all.end(), other.factors_.begin(), other.factors_.end());
  return CompositeSpace(std::move(all));
}

// ---------------------------------------------------------------------------
// Operators

Parity classify_parity(const Matrix& m, std::span<const int> signs) {
  const double scale = m.norm();
  if (scale == 0.0) return Parity::even;
  auto [even, odd] = split_by_signs(m, signs);
  // ||theta X theta - X|| = 2 ||X_odd||, ||theta X theta + X|| = 2 ||X_even||.
  if (2.0 * odd.norm() <= kParityTolerance * scale) return Parity::even;
  if (2.0 * even.norm() <= kParityTolerance * scale) return Parity::odd;
  return Parity::mixed;
}

GradedOperator::GradedOperator(Matrix matrix, CompositeSpace space)
    : matrix_(std::move(matrix)), space_(std::move(space)), parity_(Parity::even) {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != d)
    throw Error(ErrorCode::DimensionMismatch,
                "operator is " + std::to_string(matrix_.rows()) + "x" +
                    std::to_string(matrix_.cols()) + " but space has dim " + std::to_string(d));
  parity_ = classify_parity(matrix_, space_.parity_signs());
}

GradedOperator GradedOperator::identity(const CompositeSpace& space) {
  return {Matrix::Identity(space.dim(), space.dim()), space};
}

GradedOperator GradedOperator::zero(const CompositeSpace& space) {
  return {Matrix::Zero(space.dim(), space.dim()), space};
}

GradedOperator GradedOperator::adjoint() const { return {matrix_.adjoint(), space_}; }

GradedOperator operator+(const GradedOperator& a, const GradedOperator& b) {
  require_same_space(a, b, "operator+");
  return {a.matrix_ + b.matrix_, a.space_};
}

GradedOperator operator-(const GradedOperator& a, const GradedOperator& b) {
  require_same_space(a, b, "operator-");
  return {a.matrix_ - b.matrix_, a.space_};
}

GradedOperator operator*(const GradedOperator& a, const GradedOperator& b) {
  require_same_space(a, b, "operator*");
  return {a.matrix_ * b.matrix_, a.space_};
}

GradedOperator operator*(Complex s, const GradedOperator& a) { return {s * a.matrix_, a.space_}; }

GradedOperator operator-(const GradedOperator& a) { return {-a.matrix_, a.space_}; }

GradedOperator tau(const GradedOperator& x) {
  const auto signs = x.space().parity_signs();
  Matrix out = x.matrix();
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      if (signs[i] * signs[j] < 0) out(i, j) = -out(i, j);
  return {std::move(out), x.space()};
}

ParityParts parity_decompose(const GradedOperator& x) {
  auto [even, odd] = split_by_signs(x.matrix(), x.space().parity_signs());
  return {GradedOperator(std::move(even), x.space()), GradedOperator(std::move(odd), x.space())};
}

GradedOperator graded_tensor(const GradedOperator& x1, const GradedOperator& x2) {
  const bool mixed = x1.parity() == Parity::mixed || x2.parity() == Parity::mixed;
  if (mixed && x1.space().has_fermionic_grading() && x2.space().has_fermionic_grading())
    throw Error(ErrorCode::MixedParityOnFermionicSpace,
                "graded_tensor: mixed-parity operator across a fermionic boundary; "
                "decompose it into even and odd parts first");
  const auto signs1 = x1.space().parity_signs();
  auto [even2, odd2] = split_by_signs(x2.matrix(), x2.space().parity_signs());
  Matrix x1_theta = x1.matrix();
  for (Eigen::Index j = 0; j < x1_theta.cols(); ++j)
    if (signs1[j] < 0) x1_theta.col(j) *= -1.0;
  Matrix out = kron(x1.matrix(), even2) + kron(x1_theta, odd2);
  return {std::move(out), x1.space().concat(x2.space())};
}

GradedOperator ampliate(const GradedOperator& x, std::size_t target_index,
                        std::span<const GradedSpace> composite) {
  if (target_index >= composite.size())
    throw Error(ErrorCode::IndexOutOfRange,
                "ampliate: factor index " + std::to_string(target_index) + " out of range for " +
                    std::to_string(composite.size()) + " factors");
  const auto& factors = x.space().factors();
  if (factors.size() != 1 || !(factors[0] == composite[target_index]))
    throw Error(ErrorCode::DimensionMismatch,
                "ampliate: operator does not live on the target factor");
  auto local = [&](std::size_t i) {
    return i == target_index ? x : GradedOperator::identity(CompositeSpace{composite[i]});
  };
  GradedOperator out = local(0);
  for (std::size_t i = 1; i < composite.size(); ++i) out = graded_tensor(out, local(i));
  return out;
}

GradedOperator commutator(const GradedOperator& a, const GradedOperator& b) {
  require_same_space(a, b, "commutator");
  return {a.matrix() * b.matrix() - b.matrix() * a.matrix(), a.space()};
}

GradedOperator anticommutator(const GradedOperator& a, const GradedOperator& b) {
  require_same_space(a, b, "anticommutator");
  return {a.matrix() * b.matrix() + b.matrix() * a.matrix(), a.space()};
}

// ---------------------------------------------------------------------------
// Standard builders

FermionMode build_fermion_mode() {
  const CompositeSpace space{GradedSpace::fermionic({1, -1})};
  Matrix c = Matrix::Zero(2, 2);
  c(0, 1) = 1.0;  // |occupied> -> |unoccupied>
  Matrix cd = c.adjoint();
  Matrix n = cd * c;
  return {GradedOperator(c, space), GradedOperator(cd, space), GradedOperator(n, space)};
}

TwoLevel build_two_level() {
  const CompositeSpace space{GradedSpace::trivial(2)};
  const Complex i{0.0, 1.0};
  Matrix lower = Matrix::Zero(2, 2);
  lower(0, 1) = 1.0;  // |excited> -> |ground>
  Matrix raise = lower.adjoint();
  Matrix x = raise + lower;
  Matrix y = i * (lower - raise);
  Matrix n = raise * lower;
  Matrix z = n - lower * raise;
  return {GradedOperator(lower, space), GradedOperator(raise, space), GradedOperator(x, space),
          GradedOperator(y, space),     GradedOperator(z, space),     GradedOperator(n, space)};
}

ThreeLevelParity detector_parity_assignment() {
  ThreeLevelParity p;
  for (auto& row : p) row.fill(Parity::even);
  p[2][1] = p[1][2] = Parity::odd;  // sigma_32, sigma_23
  p[0][2] = p[2][0] = Parity::odd;  // sigma_13, sigma_31
  return p;
}

ThreeLevel::ThreeLevel(GradedSpace space, std::vector<GradedOperator> ops)
    : space_(std::move(space)), ops_(std::move(ops)) {}

const GradedOperator& ThreeLevel::sigma(int j, int k) const {
  if (j < 1 || j > 3 || k < 1 || k > 3)
    throw Error(ErrorCode::IndexOutOfRange, "sigma_jk indices are 1..3");
  return ops_[static_cast<std::size_t>((j - 1) * 3 + (k - 1))];
}

ThreeLevel build_three_level(const ThreeLevelParity& assignment) {
  std::vector<int> signs(3, 1);
  for (std::size_t k = 0; k < 3; ++k) {
    if (assignment[0][k] == Parity::mixed)
      throw Error(ErrorCode::InvalidParityAssignment, "unit operators have definite parity");
    signs[k] = assignment[0][k] == Parity::odd ? -1 : 1;
  }
  if (signs[0] != 1)
    throw Error(ErrorCode::InvalidParityAssignment, "sigma_11 must be even");
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k) {
      const Parity expected = signs[j] * signs[k] > 0 ? Parity::even : Parity::odd;
      if (assignment[j][k] != expected)
        throw Error(ErrorCode::InvalidParityAssignment,
                    "parity of sigma_" + std::to_string(j + 1) + std::to_string(k + 1) +
                        " is inconsistent with delta(XY) = delta(X) + delta(Y)");
    }
  const bool graded = std::any_of(signs.begin(), signs.end(), [](int s) { return s < 0; });
  GradedSpace space = graded ? GradedSpace::fermionic(signs) : GradedSpace::trivial(3);
  const CompositeSpace composite{space};
  std::vector<GradedOperator> ops;
  ops.reserve(9);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      Matrix m = Matrix::Zero(3, 3);
      m(j, k) = 1.0;
      ops.emplace_back(std::move(m), composite);
    }
  return ThreeLevel(std::move(space), std::move(ops));
}

}  // namespace fqf
