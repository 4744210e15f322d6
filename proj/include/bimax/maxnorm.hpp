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
#include <stdexcept>
#include <string>

#include "bimax/common.hpp"
#include "bimax/instance.hpp"

namespace bimax {

/// Direct (non-iterative up to a scalar bisection) solver. In diagonal
/// coordinates the problem is max_{||u|| <= 1} u^T b + ||u||_{Lambda^{-1}};
/// the KKT system pins the optimal u through a single Lagrange multiplier mu
/// solving the secular equation sum_i lambda_i b_i^2 / (mu lambda_i - 1)^2 = 1
/// on the branch mu > 1/lambda_d. Entries of b are floored away from zero
/// first so the branch contains the relevant root; the floor costs at most
/// half the accuracy budget.

/// Center after the entrywise sign-preserving floor |b_i| >= eps/(2 sqrt(d)).
struct ClippedCenter {
  dvec b_plus;
  double epsilon = 0.0;
};

/// Bisection bracket [lower, upper] for the secular root, plus the iteration
/// budget that certifies eps-accuracy.
struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  int iterations = 0;
};

/// Floors each entry of b to magnitude eps/(2 sqrt(d)), keeping signs
/// (sign(0) taken as +1 for determinism).
inline ClippedCenter clip_center(const dvec& b, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("clip_center: epsilon must be positive");
  }
  const double floor = epsilon / (2.0 * std::sqrt(static_cast<double>(b.size())));
  ClippedCenter clipped;
  clipped.epsilon = epsilon;
  clipped.b_plus = dvec(b.size());
  for (int i = 0; i < b.size(); ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    clipped.b_plus[i] = sign * std::max(std::abs(b[i]), floor);
  }
  return clipped;
}

/// Evaluates the secular function s(mu) = sum_i lambda_i b_i^2 (mu lambda_i - 1)^{-2}.
inline double secular_value(double mu, const dvec& lambda, const dvec& b_plus) {
  if (lambda.size() != b_plus.size()) {
    throw DimensionMismatch("secular_value: spectrum has " +
                            std::to_string(lambda.size()) + " entries, center " +
                            std::to_string(b_plus.size()));
  }
  double total = 0.0;
  for (int i = 0; i < lambda.size(); ++i) {
    const double denom = mu * lambda[i] - 1.0;
    if (denom == 0.0) {
      throw PoleHit("secular function evaluated at its pole mu = 1/lambda_" +
                    std::to_string(i + 1));
    }
    total += lambda[i] * b_plus[i] * b_plus[i] / (denom * denom);
  }
  return total;
}

/// Computes the root bracket [m, M] and the bisection budget J.
///
/// m = (sqrt(lambda_d)|b_d| + 1)/lambda_d and M = (sqrt(sum lambda_i b_i^2) + 1)/lambda_d
/// sandwich the root; J halvings shrink the bracket far enough that the value
/// error attributable to the multiplier is below eps/2. Two published budget
/// expressions differ by a log2(lambda_d) term; the larger of the two is used
/// and clamped to [1, 200] (200 halvings exhaust double precision anyway).
inline Bracket bracket_and_iterations(const dvec& lambda, const dvec& b_plus,
                                      double epsilon) {
  if (lambda.size() != b_plus.size()) {
    throw DimensionMismatch("bracket_and_iterations: spectrum has " +
                            std::to_string(lambda.size()) + " entries, center " +
                            std::to_string(b_plus.size()));
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("bracket_and_iterations: epsilon must be positive");
  }
  const int d = static_cast<int>(lambda.size());
  const double lam_d = lambda[d - 1];
  const double bd = std::abs(b_plus[d - 1]);
  if (!(bd > 0.0)) {
    throw ZeroVector(
        "bracket_and_iterations requires a clipped center (|b_d| > 0)");
  }
  double s1 = 0.0;  // sum lambda_i b_i^2
  double s2 = 0.0;  // sum lambda_i^2 b_i^2
  for (int i = 0; i < d; ++i) {
    const double bb = b_plus[i] * b_plus[i];
    s1 += lambda[i] * bb;
    s2 += lambda[i] * lambda[i] * bb;
  }
  Bracket bracket;
  bracket.lower = (std::sqrt(lam_d) * bd + 1.0) / lam_d;
  bracket.upper = (std::sqrt(s1) + 1.0) / lam_d;

  const double width = bracket.upper - bracket.lower;
  double budget = 1.0;
  if (width > 0.0) {
    const double common = 2.0 * width * std::sqrt(s2) / (epsilon * bd * bd);
    const double proof_bits = std::log2(common / lam_d);
    const double box_bits = std::log2(common);
    budget = std::ceil(std::max(proof_bits, box_bits));
  }
  bracket.iterations =
      static_cast<int>(std::clamp(budget, 1.0, 200.0));
  return bracket;
}

/// Core solve in diagonal coordinates. Runs the clip and the bisection at
/// half the requested accuracy so the final re-pairing through the exact
/// best-response theta(x) stays inside the overall eps budget.
inline Solution solve_maxnorm(const DiagonalForm& form, double epsilon = 1e-8) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("solve_maxnorm: epsilon must be positive");
  }
  const auto start = std::chrono::steady_clock::now();
  const double eps_solve = epsilon / 2.0;

  const ClippedCenter clipped = clip_center(form.b, eps_solve);
  const Bracket bracket =
      bracket_and_iterations(form.lambda, clipped.b_plus, eps_solve);

  double lo = bracket.lower;
  double hi = bracket.upper;
  int steps = 0;
  if (hi - lo > 0.0) {
    for (int j = 0; j < bracket.iterations; ++j) {
      const double mid = 0.5 * (lo + hi);
      if (secular_value(mid, form.lambda, clipped.b_plus) <= 1.0) {
        hi = mid;
      } else {
        lo = mid;
      }
      ++steps;
    }
  }
  const double mu = hi;

  const int d = form.dim();
  dvec phi(d);
  for (int i = 0; i < d; ++i) {
    phi[i] = mu * form.lambda[i] * clipped.b_plus[i] /
             (mu * form.lambda[i] - 1.0);
  }
  const dvec u = phi / phi.norm();

  Solution sol;
  sol.solver = "maxnorm";
  sol.multiplier = mu;
  sol.iterations = steps;
  sol.diag_point = phi;
  sol.x = form.x_from_u(u);
  sol.theta = form.theta_from_phi(phi_from_u(form, u));
  sol.value = diag_value(form, u);
  sol.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return sol;
}

/// Full-instance entry point: diagonalizes, then solves; the transform time
/// is reported separately from the solve time.
inline Solution solve_maxnorm(const BilinearInstance& instance,
                              double epsilon = 1e-8) {
  const auto start = std::chrono::steady_clock::now();
  const DiagonalForm form = diagonalize(instance);
  const double transform =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  Solution sol = solve_maxnorm(form, epsilon);
  sol.transform_seconds = transform;
  return sol;
}

}  // namespace bimax
