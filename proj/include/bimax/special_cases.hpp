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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "bimax/common.hpp"
#include "bimax/instance.hpp"

namespace bimax {

/// Closed-form and reduction-based solvers for structured cases: centered
/// confidence ellipsoids, explicit vertex polytopes, and l_p action balls
/// with axis-aligned confidence sets.

// ---------------------------------------------------------------------------
// Centered case
// ---------------------------------------------------------------------------

/// Solves the centered case c = 0 exactly: the value is the largest
/// eigenvalue of (W A)^{-1/2}, computed through the symmetric similar matrix
/// A^{1/2} W A^{1/2}. The maximizing pair is assembled in the diagonal basis,
/// where both feasibility and the attained value are exact by construction.
inline Solution solve_centered(const dmat& action_shape,
                               const dmat& confidence_shape) {
  const auto start = std::chrono::steady_clock::now();
  const int d = static_cast<int>(action_shape.rows());
  const BilinearInstance instance(
      action_shape, Ellipsoid(dvec::Zero(d), confidence_shape));
  const DiagonalForm form = diagonalize(instance);
  const double lam_d = form.lambda[d - 1];

  dvec u = dvec::Zero(d);
  u[d - 1] = 1.0;
  Solution sol;
  sol.solver = "centered";
  sol.x = form.x_from_u(u);
  sol.theta = form.theta_from_phi(dvec(u / std::sqrt(lam_d)));
  sol.value = 1.0 / std::sqrt(lam_d);
  sol.diag_point = std::move(u);
  sol.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return sol;
}

/// Instance-level entry point; the center must be exactly zero.
inline Solution solve_centered(const BilinearInstance& instance) {
  if (instance.confidence().center().cwiseAbs().maxCoeff() != 0.0) {
    throw std::invalid_argument(
        "solve_centered requires an exactly zero center");
  }
  return solve_centered(instance.action_shape(),
                        instance.confidence().shape());
}

// ---------------------------------------------------------------------------
// Vertex polytopes
// ---------------------------------------------------------------------------

/// An action set given by an explicit, nonempty list of vertices.
class VertexPolytope {
 public:
  explicit VertexPolytope(std::vector<dvec> vertices)
      : vertices_(std::move(vertices)) {
    if (vertices_.empty()) {
      throw std::invalid_argument("polytope needs at least one vertex");
    }
    const auto d = vertices_.front().size();
    for (const dvec& v : vertices_) {
      if (v.size() != d) {
        throw DimensionMismatch("polytope vertices have mixed dimensions");
      }
    }
  }

  const std::vector<dvec>& vertices() const { return vertices_; }
  int dim() const { return static_cast<int>(vertices_.front().size()); }

 private:
  std::vector<dvec> vertices_;
};

/// Exhaustive search over the vertex list: a linear objective over a polytope
/// is maximized at a vertex, so scoring each vertex with the concave-free
/// form x.c + ||x||_{W^{-1}} is exact. Ties go to the lowest index. A zero
/// vertex scores 0 and pairs with theta = c.
inline Solution solve_polytope(const VertexPolytope& poly,
                               const Ellipsoid& confidence) {
  const auto start = std::chrono::steady_clock::now();
  if (poly.dim() != confidence.dim()) {
    throw DimensionMismatch("polytope is " + std::to_string(poly.dim()) +
                            "-dimensional, confidence set is " +
                            std::to_string(confidence.dim()) +
                            "-dimensional");
  }
  const dvec& c = confidence.center();
  const Eigen::LLT<dmat> chol(confidence.shape());

  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(poly.vertices().size()); ++i) {
    const dvec& v = poly.vertices()[i];
    const dvec solved = chol.solve(v);
    const double score =
        v.dot(c) + std::sqrt(std::max(0.0, v.dot(solved)));
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }

  const dvec& x = poly.vertices()[best];
  const dvec solved = chol.solve(x);
  const double norm = std::sqrt(std::max(0.0, x.dot(solved)));
  Solution sol;
  sol.solver = "polytope";
  sol.x = x;
  sol.theta = norm > 0.0 ? dvec(c + solved / norm) : c;
  sol.value = best_score;
  sol.iterations = static_cast<int>(poly.vertices().size());
  sol.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return sol;
}

// ---------------------------------------------------------------------------
// Axis-aligned l_p case
// ---------------------------------------------------------------------------

/// Unit l_p ball action set (p >= 2) with diagonal confidence shape
/// W = diag(lambda) around c. The substitution y_i = |x_i|^p turns the
/// problem into minimizing a convex H over the simplex.
struct LpAlignedInstance {
  double p = 2.0;
  dvec c;
  dvec lambda;
};

namespace detail {

inline void validate_lp(const LpAlignedInstance& inst) {
  if (inst.p < 2.0) {
    throw UnsupportedP("p = " + std::to_string(inst.p) +
                       " is below 2; the reduced problem is only convex for "
                       "p >= 2");
  }
  if (inst.c.size() != inst.lambda.size()) {
    throw DimensionMismatch("center and lambda sizes differ");
  }
  if (inst.lambda.size() == 0 || inst.lambda.minCoeff() <= 0.0) {
    throw NotPositiveDefinite("lambda must be strictly positive");
  }
}

/// Projects z onto {z >= 0, sum z = total} (sort-based exact projection).
inline dvec project_simplex(const dvec& z, double total) {
  const int d = static_cast<int>(z.size());
  std::vector<double> sorted(z.data(), z.data() + d);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = (sorted[0] - total);
  for (int k = 0; k < d; ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - total) / (k + 1);
    if (sorted[k] - candidate > 0.0) tau = candidate;
  }
  return z.unaryExpr([tau](double v) { return std::max(0.0, v - tau); });
}

}  // namespace detail

/// The reduced objective H(y) = -sum |c_i| y_i^{1/p} - sqrt(sum y_i^{2/p}/lambda_i),
/// defined for y >= 0 (convex on the positive orthant for p >= 2).
inline double lp_objective(const LpAlignedInstance& inst, const dvec& y) {
  detail::validate_lp(inst);
  if (y.size() != inst.c.size()) {
    throw DimensionMismatch("point and instance dimensions differ");
  }
  if (y.minCoeff() < 0.0) {
    throw DomainViolation("lp_objective requires y >= 0");
  }
  double linear = 0.0;
  double weighted = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    linear += std::abs(inst.c[i]) * std::pow(y[i], 1.0 / inst.p);
    weighted += std::pow(y[i], 2.0 / inst.p) / inst.lambda[i];
  }
  return -linear - std::sqrt(weighted);
}

/// Gradient of H at a strictly positive point. H is differentiable only on
/// the open orthant; entries blow up like y_i^{1/p - 1} toward the boundary.
inline dvec lp_gradient(const LpAlignedInstance& inst, const dvec& y) {
  detail::validate_lp(inst);
  if (y.size() != inst.c.size()) {
    throw DimensionMismatch("point and instance dimensions differ");
  }
  if (y.minCoeff() <= 0.0) {
    throw DomainViolation("lp_gradient requires y > 0");
  }
  const double p = inst.p;
  double weighted = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    weighted += std::pow(y[i], 2.0 / p) / inst.lambda[i];
  }
  const double root = std::sqrt(weighted);
  dvec g(y.size());
  for (int i = 0; i < y.size(); ++i) {
    g[i] = -(std::abs(inst.c[i]) * std::pow(y[i], 1.0 / p - 1.0) +
             std::pow(y[i], 2.0 / p - 1.0) / (inst.lambda[i] * root)) /
           p;
  }
  return g;
}

/// Minimizes H over the simplex by projected gradient with per-coordinate
/// floors (H has unbounded gradients at the boundary for p > 2), backtracking
/// line search, a diminishing-step fallback when backtracking stalls, and a
/// running-average candidate. Stops once the best value improves by less
/// than epsilon/4 over 50 iterations. Maps back via x_i = y_i^{1/p} sign(c_i).
inline Solution solve_lp_aligned(const LpAlignedInstance& inst,
                                 double epsilon) {
  const auto start = std::chrono::steady_clock::now();
  detail::validate_lp(inst);
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("solve_lp_aligned: epsilon must be positive");
  }
  const int d = static_cast<int>(inst.c.size());
  const double p = inst.p;

  dvec floors(d);
  for (int i = 0; i < d; ++i) {
    floors[i] = std::min(
        std::pow(epsilon / (4.0 * d * (std::abs(inst.c[i]) + 1.0)), p),
        1.0 / (2.0 * d));
  }
  const double free_mass = 1.0 - floors.sum();

  auto project = [&](const dvec& y) -> dvec {
    return floors + detail::project_simplex(dvec(y - floors), free_mass);
  };
  auto objective = [&](const dvec& y) -> double {
    double linear = 0.0;
    double weighted = 0.0;
    for (int i = 0; i < d; ++i) {
      linear += std::abs(inst.c[i]) * std::pow(y[i], 1.0 / p);
      weighted += std::pow(y[i], 2.0 / p) / inst.lambda[i];
    }
    return -linear - std::sqrt(weighted);
  };
  auto gradient = [&](const dvec& y) -> dvec {
    double weighted = 0.0;
    for (int i = 0; i < d; ++i) {
      weighted += std::pow(y[i], 2.0 / p) / inst.lambda[i];
    }
    const double root = std::sqrt(weighted);
    dvec g(d);
    for (int i = 0; i < d; ++i) {
      g[i] = -(std::abs(inst.c[i]) * std::pow(y[i], 1.0 / p - 1.0) +
               std::pow(y[i], 2.0 / p - 1.0) / (inst.lambda[i] * root)) /
             p;
    }
    return g;
  };

  dvec y = project(dvec::Constant(d, 1.0 / d));
  dvec y_best = y;
  double value = objective(y);
  double best = value;
  dvec running_sum = y;

  int iterations = 0;
  if (d > 1) {
    double step = 1.0;
    std::vector<double> history{best};
    constexpr int kWindow = 50;
    constexpr int kMaxIterations = 200000;
    for (int k = 1; k <= kMaxIterations; ++k) {
      iterations = k;
      const dvec g = gradient(y);
      double s = step;
      bool moved = false;
      for (int attempt = 0; attempt < 60; ++attempt) {
        const dvec y_try = project(dvec(y - s * g));
        const double v_try = objective(y_try);
        if (v_try < value - 1e-16) {
          y = y_try;
          value = v_try;
          step = std::min(s * 2.0, 1e3);
          moved = true;
          break;
        }
        s *= 0.5;
      }
      if (!moved) {
        const double fallback = 1.0 / ((g.norm() + 1.0) * std::sqrt(k));
        y = project(dvec(y - fallback * g));
        value = objective(y);
      }
      running_sum += y;
      if (value < best) {
        best = value;
        y_best = y;
      }
      history.push_back(best);
      if (k >= kWindow &&
          history[k - kWindow] - best < epsilon / 4.0) {
        break;
      }
    }
    const dvec averaged = project(dvec(running_sum / (iterations + 1)));
    const double avg_value = objective(averaged);
    if (avg_value < best) {
      best = avg_value;
      y_best = averaged;
    }
  }

  dvec x(d);
  for (int i = 0; i < d; ++i) {
    const double sign = inst.c[i] < 0.0 ? -1.0 : 1.0;
    x[i] = sign * std::pow(y_best[i], 1.0 / p);
  }
  double weighted = 0.0;
  for (int i = 0; i < d; ++i) weighted += x[i] * x[i] / inst.lambda[i];
  const double norm = std::sqrt(weighted);

  Solution sol;
  sol.solver = "lp";
  sol.x = x;
  sol.theta = inst.c + dvec((x.array() / inst.lambda.array()).matrix() / norm);
  sol.value = -best;
  sol.iterations = iterations;
  sol.diag_point = y_best;
  sol.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return sol;
}

}  // namespace bimax
