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
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bimax/common.hpp"
#include "bimax/instance.hpp"

namespace bimax {

/// Barrier-path solver. In diagonal coordinates the problem reduces to the
/// convex program: minimize F(y) = -sum_i |b_i| sqrt(y_i) - sqrt(sum_i y_i/lambda_i)
/// over the simplex, restricted to the box y_i > B_i where the optimum
/// provably lives. The solver follows the central path of
/// F^(t)(y) = t F(y) - sum_i log(y_i - B_i) - log(1 - sum_i y_i)
/// with a two-stage self-concordant Newton method per barrier weight and a
/// geometric weight schedule t <- eta t until the duality gap (d+1)/t is
/// within budget.

/// Data of the convex reduction: box floors B, support of b, initial barrier
/// weight and strictly interior initial point.
struct ConvexReduction {
  dvec lambda;
  dvec inv_lambda;
  dvec b;
  dvec abs_b;
  dvec B;
  std::vector<int> support;
  double t0 = 0.0;
  /// Conservative fallback weight (max over support in both t0 terms).
  double t0_alt = 0.0;
  dvec y0;
  double b_norm = 0.0;
  /// ||b|| + lambda_d^{-1/2}: bounds -F over the domain, used in step caps.
  double objective_scale = 0.0;

  int dim() const { return static_cast<int>(lambda.size()); }
};

/// Value, gradient and factored Hessian of F^(t) at an interior point.
/// The Hessian is D + rho v v^T + tau 1 1^T with D diagonal and
/// v = (1/lambda_i)_i, so systems solve in O(d) via two rank-one updates.
struct BarrierEval {
  double value = 0.0;
  double objective = 0.0;  ///< F(y) alone, without barrier or weight.
  double slack = 0.0;      ///< Simplex slack 1 - sum y at the point.
  dvec gradient;
  dvec hess_diag;
  double hess_rho = 0.0;
  double hess_tau = 0.0;
};

/// Per-call report of newton_inner.
struct NewtonInnerReport {
  int damped_steps = 0;
  int quadratic_steps = 0;
  int safeguard_hits = 0;
  int decrease_violations = 0;
  int contraction_violations = 0;
  double lambda_final = 0.0;
};

/// Builds the convex reduction. Throws AllZeroCenter for b = 0 (the caller
/// routes that case to the centered closed form).
inline ConvexReduction reduce_to_convex(const DiagonalForm& form) {
  const int d = form.dim();
  ConvexReduction red;
  red.lambda = form.lambda;
  red.inv_lambda = form.lambda.cwiseInverse();
  red.b = form.b;
  red.abs_b = form.b.cwiseAbs();
  red.b_norm = form.b.norm();
  if (!(red.b_norm > 0.0)) {
    throw AllZeroCenter("convex reduction undefined for b = 0");
  }
  const double lam_d = form.lambda[d - 1];
  red.objective_scale = red.b_norm + 1.0 / std::sqrt(lam_d);
  const double denom = red.objective_scale * red.objective_scale;

  red.B = dvec(d);
  red.y0 = dvec(d);
  const double pad = (1.0 / lam_d) / (2.0 * d) / denom;
  for (int i = 0; i < d; ++i) {
    red.B[i] = form.b[i] * form.b[i] / denom;
    red.y0[i] = red.B[i] + pad;
    if (form.b[i] != 0.0) red.support.push_back(i);
  }

  double first = 0.0;       // max over support of (b_i^2 B_i)^{-1/2}
  double second_min = std::numeric_limits<double>::infinity();
  double second_max = 0.0;  // min/max over support of (lambda_i^{-1} B_i)^{-1/2}
  for (int i : red.support) {
    const double bb = form.b[i] * form.b[i];
    first = std::max(first, 1.0 / std::sqrt(bb * red.B[i]));
    const double item = 1.0 / std::sqrt(red.inv_lambda[i] * red.B[i]);
    second_min = std::min(second_min, item);
    second_max = std::max(second_max, item);
  }
  red.t0 = 9.0 * std::max(first, second_min);
  red.t0_alt = 9.0 * std::max(first, second_max);
  return red;
}

namespace detail {

/// Simplex slack 1 - sum y via compensated (Neumaier) summation. Near the
/// central path the slack shrinks like 1/t while a naive d-term sum carries
/// about d*eps of absolute noise; that noise enters the barrier gradient
/// through the 1/slack term and would put a floor under the Newton decrement
/// well above sqrt(eps/2) at large d and barrier weight.
inline double simplex_slack(const dvec& y) {
  double sum = 0.0;
  double comp = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double v = y[i];
    const double acc = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - acc) + v : (v - acc) + sum;
    sum = acc;
  }
  return 1.0 - (sum + comp);
}

}  // namespace detail

/// Evaluates F^(t) with gradient and factored Hessian. Throws DomainViolation
/// outside the open domain {y_i > B_i, sum y < 1}.
inline BarrierEval barrier_objective(const dvec& y, double t,
                                     const ConvexReduction& red) {
  const int d = red.dim();
  if (y.size() != d) {
    throw DimensionMismatch("barrier point has dimension " +
                            std::to_string(y.size()) + ", reduction is " +
                            std::to_string(d) + "-dimensional");
  }
  double weighted = 0.0;  // S = sum y_i / lambda_i
  for (int i = 0; i < d; ++i) {
    if (!(y[i] > red.B[i])) {
      throw DomainViolation("barrier point leaves the box: y_" +
                            std::to_string(i + 1) + " <= B_" +
                            std::to_string(i + 1));
    }
    weighted += red.inv_lambda[i] * y[i];
  }
  const double slack = detail::simplex_slack(y);
  if (!(slack > 0.0)) {
    throw DomainViolation("barrier point leaves the simplex: sum y >= 1");
  }

  const double root_weighted = std::sqrt(weighted);
  BarrierEval eval;
  eval.gradient = dvec(d);
  eval.hess_diag = dvec(d);

  double objective = -root_weighted;
  double log_terms = -std::log(slack);
  const double inv_slack = 1.0 / slack;
  for (int i = 0; i < d; ++i) {
    const double root_y = std::sqrt(y[i]);
    const double gap = y[i] - red.B[i];
    objective -= red.abs_b[i] * root_y;
    log_terms -= std::log(gap);
    eval.gradient[i] = t * (-red.abs_b[i] / (2.0 * root_y) -
                            red.inv_lambda[i] / (2.0 * root_weighted)) -
                       1.0 / gap + inv_slack;
    eval.hess_diag[i] =
        t * red.abs_b[i] / (4.0 * y[i] * root_y) + 1.0 / (gap * gap);
  }
  eval.objective = objective;
  eval.value = t * objective + log_terms;
  eval.slack = slack;
  eval.hess_rho = t / (4.0 * weighted * root_weighted);
  eval.hess_tau = inv_slack * inv_slack;
  return eval;
}

namespace detail {

/// Solves (D + rho v v^T + tau 1 1^T) s = rhs in O(d) by applying the
/// Sherman-Morrison identity twice (v = inv_lambda). Both correction
/// denominators exceed 1 because the base matrices are positive definite.
inline dvec solve_hessian(const BarrierEval& eval, const ConvexReduction& red,
                          const dvec& rhs) {
  const dvec inv_d = eval.hess_diag.cwiseInverse();
  const dvec q = inv_d.cwiseProduct(red.inv_lambda);  // D^{-1} v
  const double v_dot_q = red.inv_lambda.dot(q);
  const double denom1 = 1.0 + eval.hess_rho * v_dot_q;

  auto apply_a1_inv = [&](const dvec& z) -> dvec {
    const dvec dz = inv_d.cwiseProduct(z);
    const double coeff = eval.hess_rho * red.inv_lambda.dot(dz) / denom1;
    return dz - coeff * q;
  };

  const dvec r1 = apply_a1_inv(rhs);
  const dvec w = apply_a1_inv(dvec::Ones(red.dim()));
  const double denom2 = 1.0 + eval.hess_tau * w.sum();
  return r1 - (eval.hess_tau * r1.sum() / denom2) * w;
}

inline bool is_interior(const dvec& y, const ConvexReduction& red) {
  for (int i = 0; i < red.dim(); ++i) {
    if (!(y[i] > red.B[i])) return false;
  }
  return simplex_slack(y) > 0.0;
}

/// Noise-aware slack for the damped-decrease assertion: the proven decrease
/// floor is omega(1/4) ~ 0.02686 > 1/38 ~ 0.02632; allow 1e-6 of analytic
/// slack plus cancellation noise of the two near-equal objective values.
inline double decrease_slack(double value_scale) {
  return 1e-6 + 16.0 * std::numeric_limits<double>::epsilon() *
                    std::abs(value_scale);
}

}  // namespace detail

/// Two-stage Newton method on F^(t): damped steps 1/(1 + lambda) while the
/// Newton decrement lambda >= 1/4, then intermediate steps 1/(1 + xi) with
/// xi = lambda^2/(1 + lambda) until lambda^2 <= tol. Self-concordance
/// guarantees (decrease >= 1/38 per damped step, quadratic contraction) are
/// checked on every step and counted in the report.
inline std::pair<dvec, NewtonInnerReport> newton_inner(
    const ConvexReduction& red, double t, dvec y, double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("newton_inner: tol must be positive");
  }
  NewtonInnerReport report;
  BarrierEval eval = barrier_objective(y, t, red);

  // Computable form of the certified step budget: the barrier terms of F^(t)
  // are positive on the domain, so min F^(t) >= -t (||b|| + lambda_d^{-1/2}).
  const double gap_bound = eval.value + t * red.objective_scale;
  const double loglog = std::log2(std::max(2.0, std::log2(1.0 / tol)));
  const double cap_real = 38.0 * std::max(gap_bound, 0.0) + loglog + 200.0;
  const long long cap = cap_real > 1e18 ? std::numeric_limits<long long>::max()
                                        : static_cast<long long>(cap_real);

  dvec step = detail::solve_hessian(eval, red, eval.gradient);
  double lambda = std::sqrt(std::max(0.0, eval.gradient.dot(step)));

  long long total = 0;
  int stalls = 0;
  const int quad_cap = static_cast<int>(loglog) + 40;

  // Resolution floor of the decrement: the simplex slack enters the gradient
  // as 1/slack in every coordinate, and its eps-level rounding measured in
  // the H^{-1} norm is ~eps/slack (1^T H^{-1} 1 <= slack^2 via the tau term).
  // Below this level lambda is noise, so contraction can neither continue
  // nor be meaningfully asserted.
  auto decrement_floor = [](double slack) {
    return 16.0 * std::numeric_limits<double>::epsilon() / slack;
  };

  auto advance = [&](double damping) -> BarrierEval {
    double scale = 1.0 / (1.0 + damping);
    dvec y_try = y - scale * step;
    int halvings = 0;
    while (!detail::is_interior(y_try, red) && halvings < 60) {
      scale *= 0.5;
      y_try = y - scale * step;
      ++halvings;
    }
    if (halvings > 0) {
      ++report.safeguard_hits;
      if (!detail::is_interior(y_try, red)) {
        throw DomainViolation(
            "Newton step could not be safeguarded back into the domain");
      }
    }
    BarrierEval eval_try = barrier_objective(y_try, t, red);
    if (halvings == 0 && lambda >= 0.25) {
      // The decrease floor is only checkable while the rounding noise of the
      // two near-equal objective values stays below it; at extreme barrier
      // scales (t ~ 1e16 from near-zero center coordinates) the subtraction
      // carries no information and termination rests on the decrement alone.
      const double slack = detail::decrease_slack(eval.value);
      if (slack < 1.0 / 38.0) {
        const double decrease = eval.value - eval_try.value;
        if (decrease < 1.0 / 38.0 - slack) {
          ++report.decrease_violations;
        }
        if (decrease <= 0.0) {
          ++stalls;
        } else {
          stalls = 0;
        }
      } else {
        stalls = 0;
      }
    }
    y = std::move(y_try);
    return eval_try;
  };

  while (lambda >= 0.25 && lambda > decrement_floor(eval.slack)) {
    eval = advance(lambda);
    ++report.damped_steps;
    if (++total > cap) {
      throw MaxIterations("damped stage exceeded its certified step budget");
    }
    if (stalls > 5) {
      throw MaxIterations("damped stage stalled without objective decrease");
    }
    step = detail::solve_hessian(eval, red, eval.gradient);
    lambda = std::sqrt(std::max(0.0, eval.gradient.dot(step)));
  }

  while (lambda * lambda > tol && lambda > decrement_floor(eval.slack)) {
    const double xi = lambda * lambda / (1.0 + lambda);
    eval = advance(xi);
    ++report.quadratic_steps;
    step = detail::solve_hessian(eval, red, eval.gradient);
    const double lambda_next =
        std::sqrt(std::max(0.0, eval.gradient.dot(step)));
    if (lambda_next > lambda * lambda * (1.0 + 2.0 * lambda) + 1e-9 +
                          decrement_floor(eval.slack)) {
      ++report.contraction_violations;
    }
    lambda = lambda_next;
    if (report.quadratic_steps > quad_cap) {
      throw MaxIterations("quadratic stage exceeded its certified step budget");
    }
  }

  report.lambda_final = lambda;
  return {std::move(y), report};
}

namespace detail {

/// Closed-form solution for b = 0 in diagonal coordinates (smallest
/// eigenvalue direction of the transformed confidence shape).
inline Solution solve_centered_diag(const DiagonalForm& form) {
  const int d = form.dim();
  const double lam_d = form.lambda[d - 1];
  dvec u = dvec::Zero(d);
  u[d - 1] = 1.0;
  Solution sol;
  sol.x = form.x_from_u(u);
  sol.theta = form.theta_from_phi(dvec(u / std::sqrt(lam_d)));
  sol.value = 1.0 / std::sqrt(lam_d);
  sol.solver = "centered";
  sol.diag_point = u;
  return sol;
}

struct NewtonRunOutcome {
  dvec y;
  std::vector<NewtonPhase> phases;
  int safeguard_hits = 0;
  int decrease_violations = 0;
  int contraction_violations = 0;
  int total_steps = 0;
  bool t0_decrease_violation = false;
};

/// Ceiling on the initial barrier weight. The closed-form t0 grows like
/// 1/min_i b_i^4 and the first centering's damped work grows with t0, so a
/// center with a coordinate near zero (common when b comes from a regression
/// estimate) would make the start weight astronomically large. Epsilon
/// optimality only needs the terminal weight 2(d+1)/eps together with the
/// per-phase tolerance, so the path may start anywhere; beyond this cap we
/// let the geometric schedule climb instead of brute-forcing one centering.
constexpr double kPathStartCap = 1e6;

inline NewtonRunOutcome run_barrier_path(const ConvexReduction& red, double t0,
                                         double epsilon, double eta) {
  const int d = red.dim();
  const double tol = epsilon / 2.0;
  NewtonRunOutcome out;
  double t = t0;
  dvec y = red.y0;
  bool first = true;
  while (true) {
    auto [y_next, report] = newton_inner(red, t, std::move(y), tol);
    y = std::move(y_next);
    out.phases.push_back(
        {t, report.damped_steps, report.quadratic_steps, report.lambda_final});
    out.safeguard_hits += report.safeguard_hits;
    out.decrease_violations += report.decrease_violations;
    out.contraction_violations += report.contraction_violations;
    out.total_steps += report.damped_steps + report.quadratic_steps;
    if (first && report.decrease_violations > 0) {
      out.t0_decrease_violation = true;
    }
    first = false;
    if ((d + 1) / t <= epsilon / 2.0) break;
    t *= eta;
  }
  out.y = std::move(y);
  return out;
}

}  // namespace detail

/// Solves the instance through the convex reduction and barrier path.
/// eta = 0 selects the default schedule 1 + 1/sqrt(d+1).
inline Solution solve_newton(const DiagonalForm& form, double epsilon = 1e-8,
                             double eta = 0.0) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("solve_newton: epsilon must be positive");
  }
  const auto start = std::chrono::steady_clock::now();
  const int d = form.dim();
  if (eta == 0.0) eta = 1.0 + 1.0 / std::sqrt(static_cast<double>(d + 1));
  if (!(eta > 1.0)) {
    throw std::invalid_argument("solve_newton: eta must exceed 1");
  }

  if (form.b.cwiseAbs().maxCoeff() == 0.0) {
    Solution sol = detail::solve_centered_diag(form);
    sol.solver = "newton";
    sol.routed = "centered";
    sol.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return sol;
  }

  const ConvexReduction red = reduce_to_convex(form);
  const double t_start = std::min(red.t0, detail::kPathStartCap);
  detail::NewtonRunOutcome out =
      detail::run_barrier_path(red, t_start, epsilon, eta);
  std::string variant = t_start == red.t0 ? "printed" : "capped";
  const double t_fallback = std::min(red.t0_alt, detail::kPathStartCap);
  if (out.t0_decrease_violation && t_fallback > t_start) {
    out = detail::run_barrier_path(red, t_fallback, epsilon, eta);
    variant = t_fallback == red.t0_alt ? "conservative" : "capped";
  }

  dvec u(d);
  for (int i = 0; i < d; ++i) {
    const double sign = form.b[i] < 0.0 ? -1.0 : 1.0;
    u[i] = sign * std::sqrt(out.y[i]);
  }

  Solution sol;
  sol.solver = "newton";
  sol.x = form.x_from_u(u);
  sol.theta = form.theta_from_phi(phi_from_u(form, u));
  sol.value = diag_value(form, u);
  sol.iterations = out.total_steps;
  sol.diag_point = std::move(out.y);
  sol.phases = std::move(out.phases);
  sol.safeguard_hits = out.safeguard_hits;
  sol.decrease_violations = out.decrease_violations;
  sol.contraction_violations = out.contraction_violations;
  sol.t0_variant = variant;
  sol.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return sol;
}

/// Full-instance entry point; transform time reported separately.
inline Solution solve_newton(const BilinearInstance& instance,
                             double epsilon = 1e-8, double eta = 0.0) {
  const auto start = std::chrono::steady_clock::now();
  const DiagonalForm form = diagonalize(instance);
  const double transform =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  Solution sol = solve_newton(form, epsilon, eta);
  sol.transform_seconds = transform;
  return sol;
}

/// Certified upper bound on the total Newton steps for the default schedule:
/// centering cost (computable via the exact F^(t0)(y0) and the domain lower
/// bound on F) plus per-phase re-centering cost times the phase count.
inline double newton_step_bound(const ConvexReduction& red, double epsilon,
                                double eta) {
  const int d = red.dim();
  const double tol = epsilon / 2.0;
  const double loglog = std::log2(std::max(2.0, std::log2(1.0 / tol)));
  const double t_start = std::min(red.t0, detail::kPathStartCap);
  const BarrierEval at_start = barrier_objective(red.y0, t_start, red);
  const double centering =
      38.0 * std::max(0.0, at_start.value + t_start * red.objective_scale) +
      loglog;
  const double phases = std::max(
      0.0, std::ceil(std::log(2.0 * (d + 1) / (epsilon * t_start)) /
                     std::log(eta)));
  const double per_phase =
      38.0 * (d + 1) * (eta - 1.0 - std::log(eta)) + loglog + 2.0;
  return centering + phases * per_phase;
}

}  // namespace bimax
