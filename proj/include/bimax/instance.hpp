// Copyright 2026 The bimax Authors
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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bimax/common.hpp"

namespace bimax {

namespace detail {

/// Relative symmetry tolerance for shape matrices.
inline constexpr double kSymmetryTol = 1e-10;
/// An eigenvalue below this fraction of the largest one counts as zero.
inline constexpr double kSpdTol = 1e-12;

inline void require_square(const dmat& m, const std::string& name) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch(name + " must be square, got " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
  if (m.rows() == 0) {
    throw DimensionMismatch(name + " must have positive dimension");
  }
}

inline void require_symmetric(const dmat& m, const std::string& name) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw NotPositiveDefinite(name + " is not symmetric (max asymmetry " +
                              std::to_string(asym) + ")");
  }
}

/// Validates symmetry and strict positive definiteness.
inline void require_spd(const dmat& m, const std::string& name) {
  require_square(m, name);
  require_symmetric(m, name);
  Eigen::SelfAdjointEigenSolver<dmat> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || lo <= kSpdTol * std::max(hi, 0.0)) {
    throw NotPositiveDefinite(name + " is not positive definite (lambda_min " +
                              std::to_string(lo) + ")");
  }
}

}  // namespace detail

/// Ellipsoid { v : (v - center)^T shape (v - center) <= 1 } with a symmetric
/// positive definite shape matrix.
class Ellipsoid {
 public:
  Ellipsoid(dvec center, dmat shape)
      : center_(std::move(center)), shape_(std::move(shape)) {
    detail::require_spd(shape_, "ellipsoid shape");
    if (center_.size() != shape_.rows()) {
      throw DimensionMismatch("ellipsoid center has dimension " +
                              std::to_string(center_.size()) + ", shape is " +
                              std::to_string(shape_.rows()) + "-dimensional");
    }
  }

  const dvec& center() const { return center_; }
  const dmat& shape() const { return shape_; }
  int dim() const { return static_cast<int>(center_.size()); }

  /// Membership with additive slack on the quadratic form.
  bool contains(const dvec& v, double tol = 1e-9) const {
    const dvec diff = v - center_;
    return diff.dot(shape_ * diff) <= 1.0 + tol;
  }

 private:
  dvec center_;
  dmat shape_;
};

/// The nonconvex program: maximize x^T theta subject to x^T A x <= 1 and
/// theta in a confidence ellipsoid centered at c with shape W.
class BilinearInstance {
 public:
  BilinearInstance(dmat action_shape, Ellipsoid confidence)
      : action_shape_(std::move(action_shape)),
        confidence_(std::move(confidence)) {
    detail::require_spd(action_shape_, "action shape");
    if (action_shape_.rows() != confidence_.dim()) {
      throw DimensionMismatch(
          "action shape is " + std::to_string(action_shape_.rows()) +
          "-dimensional, confidence ellipsoid is " +
          std::to_string(confidence_.dim()) + "-dimensional");
    }
  }

  int dim() const { return confidence_.dim(); }
  const dmat& action_shape() const { return action_shape_; }
  const Ellipsoid& confidence() const { return confidence_; }

 private:
  dmat action_shape_;
  Ellipsoid confidence_;
};

/// Joint diagonalization of an instance. The congruence
/// A^{1/2} W A^{1/2} = U^T diag(lambda) U (lambda sorted descending) turns
/// the problem into coordinates where both ellipsoids are axis-aligned:
/// u = U A^{1/2} x, phi = U A^{-1/2} theta, b = U A^{-1/2} c.
///
/// Dense factors are optional so pre-diagonalized instances (A = I, U = I)
/// never materialize d x d identities; an absent factor means identity. The
/// optional permutation covers pre-diagonalized inputs whose spectrum arrives
/// unsorted: solving happens in sorted coordinates and outputs are mapped
/// back through it.
struct DiagonalForm {
  dvec lambda;
  dvec b;
  std::optional<dmat> basis;            ///< U, rows are eigenvectors.
  std::optional<dmat> sqrt_action;      ///< A^{1/2}.
  std::optional<dmat> inv_sqrt_action;  ///< A^{-1/2}.
  /// sorted-coordinate index -> original index (identity when absent).
  std::optional<std::vector<int>> perm;

  int dim() const { return static_cast<int>(lambda.size()); }

  dvec apply_unpermute(const dvec& v) const {
    if (!perm) return v;
    dvec out(v.size());
    for (int i = 0; i < v.size(); ++i) out[(*perm)[i]] = v[i];
    return out;
  }

  /// Maps a diagonal-coordinate action u to the original x = A^{-1/2} U^T u.
  dvec x_from_u(const dvec& u) const {
    dvec v = basis ? dvec(basis->transpose() * u) : apply_unpermute(u);
    return inv_sqrt_action ? dvec(*inv_sqrt_action * v) : v;
  }

  /// Maps a diagonal-coordinate parameter phi to theta = A^{1/2} U^T phi.
  dvec theta_from_phi(const dvec& phi) const {
    dvec v = basis ? dvec(basis->transpose() * phi) : apply_unpermute(phi);
    return sqrt_action ? dvec(*sqrt_action * v) : v;
  }
};

namespace detail {

/// Spectral square root and inverse square root of an SPD matrix.
inline std::pair<dmat, dmat> spd_sqrt_pair(const dmat& m,
                                           const std::string& name) {
  Eigen::SelfAdjointEigenSolver<dmat> es(m);
  const dvec& ev = es.eigenvalues();
  const double hi = ev.maxCoeff();
  if (!(ev.minCoeff() > 0.0) || ev.minCoeff() <= kSpdTol * std::max(hi, 0.0)) {
    throw NotPositiveDefinite(name + " is not positive definite (lambda_min " +
                              std::to_string(ev.minCoeff()) + ")");
  }
  const dvec root = ev.cwiseSqrt();
  const dmat& v = es.eigenvectors();
  dmat sqrt_m = v * root.asDiagonal() * v.transpose();
  dmat inv_sqrt_m = v * root.cwiseInverse().asDiagonal() * v.transpose();
  return {std::move(sqrt_m), std::move(inv_sqrt_m)};
}

}  // namespace detail

/// Computes the diagonalizing transform of an instance. One dense symmetric
/// eigendecomposition for A, one for A^{1/2} W A^{1/2}.
inline DiagonalForm diagonalize(const BilinearInstance& instance) {
  const int d = instance.dim();
  auto [sqrt_a, inv_sqrt_a] =
      detail::spd_sqrt_pair(instance.action_shape(), "action shape");

  dmat mid = sqrt_a * instance.confidence().shape() * sqrt_a;
  mid = ((mid + mid.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<dmat> es(mid);
  const dvec& asc = es.eigenvalues();
  if (!(asc.minCoeff() > 0.0)) {
    throw NotPositiveDefinite(
        "transformed confidence shape is not positive definite");
  }

  DiagonalForm form;
  form.lambda = dvec(d);
  dmat u(d, d);
  for (int i = 0; i < d; ++i) {
    form.lambda[i] = asc[d - 1 - i];
    u.row(i) = es.eigenvectors().col(d - 1 - i).transpose();
  }
  form.b = u * (inv_sqrt_a * instance.confidence().center());
  form.basis = std::move(u);
  form.sqrt_action = std::move(sqrt_a);
  form.inv_sqrt_action = std::move(inv_sqrt_a);
  return form;
}

/// Builds a DiagonalForm directly from a spectrum and transformed center
/// (the pre-diagonalized interchange format, A = I). Accepts an unsorted
/// spectrum by tracking the sort permutation.
inline DiagonalForm make_diagonal_form(dvec lambda, dvec b) {
  if (lambda.size() != b.size()) {
    throw DimensionMismatch("spectrum has " + std::to_string(lambda.size()) +
                            " entries, center has " + std::to_string(b.size()));
  }
  if (lambda.size() == 0) {
    throw DimensionMismatch("spectrum must be nonempty");
  }
  if (!(lambda.minCoeff() > 0.0)) {
    throw NotPositiveDefinite("spectrum entries must be strictly positive");
  }
  DiagonalForm form;
  const int d = static_cast<int>(lambda.size());
  bool sorted = true;
  for (int i = 0; i + 1 < d; ++i) {
    if (lambda[i] < lambda[i + 1]) {
      sorted = false;
      break;
    }
  }
  if (sorted) {
    form.lambda = std::move(lambda);
    form.b = std::move(b);
    return form;
  }
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return lambda[i] > lambda[j]; });
  form.lambda = dvec(d);
  form.b = dvec(d);
  for (int i = 0; i < d; ++i) {
    form.lambda[i] = lambda[order[i]];
    form.b[i] = b[order[i]];
  }
  form.perm = std::move(order);
  return form;
}

/// The bilinear objective x^T theta.
inline double objective(const dvec& x, const dvec& theta) {
  if (x.size() != theta.size()) {
    throw DimensionMismatch("objective arguments have dimensions " +
                            std::to_string(x.size()) + " and " +
                            std::to_string(theta.size()));
  }
  return x.dot(theta);
}

/// The best confidence-ellipsoid response to a fixed action:
/// theta(x) = c + W^{-1} x / ||x||_{W^{-1}}. Throws for x = 0, where every
/// feasible theta is equally good.
inline dvec theta_from_x(const BilinearInstance& instance, const dvec& x) {
  if (x.size() != instance.dim()) {
    throw DimensionMismatch("action has dimension " + std::to_string(x.size()) +
                            ", instance is " + std::to_string(instance.dim()) +
                            "-dimensional");
  }
  const dvec winv_x = instance.confidence().shape().llt().solve(x);
  const double norm2 = x.dot(winv_x);
  if (!(norm2 > 0.0)) {
    throw ZeroVector("theta_from_x requires a nonzero action");
  }
  return instance.confidence().center() + winv_x / std::sqrt(norm2);
}

/// Value of the concave reformulation at x: x^T c + ||x||_{W^{-1}}.
/// Equals max over feasible theta of x^T theta; 0 at x = 0.
inline double px_objective(const BilinearInstance& instance, const dvec& x) {
  if (x.size() != instance.dim()) {
    throw DimensionMismatch("action has dimension " + std::to_string(x.size()) +
                            ", instance is " + std::to_string(instance.dim()) +
                            "-dimensional");
  }
  const dvec winv_x = instance.confidence().shape().llt().solve(x);
  const double norm2 = std::max(0.0, x.dot(winv_x));
  return x.dot(instance.confidence().center()) + std::sqrt(norm2);
}

/// Diagonal-coordinate counterpart of theta_from_x: given an action u with
/// ||u||_2 <= 1 in diagonal coordinates, the maximizing parameter is
/// phi = b + Lambda^{-1} u / ||u||_{Lambda^{-1}}.
inline dvec phi_from_u(const DiagonalForm& form, const dvec& u) {
  const dvec scaled = u.cwiseQuotient(form.lambda);
  const double norm2 = u.dot(scaled);
  if (!(norm2 > 0.0)) {
    throw ZeroVector("phi_from_u requires a nonzero action");
  }
  return form.b + scaled / std::sqrt(norm2);
}

/// Diagonal-coordinate objective value u^T b + ||u||_{Lambda^{-1}}.
inline double diag_value(const DiagonalForm& form, const dvec& u) {
  const double norm2 = std::max(0.0, u.dot(dvec(u.cwiseQuotient(form.lambda))));
  return u.dot(form.b) + std::sqrt(norm2);
}

/// ||v||_M = sqrt(v^T M v) for a symmetric PSD matrix M.
inline double norm_in(const dmat& m, const dvec& v) {
  return std::sqrt(std::max(0.0, v.dot(dvec(m * v))));
}

}  // namespace bimax
