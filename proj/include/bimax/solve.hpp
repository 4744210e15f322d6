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

#include <stdexcept>
#include <string>

#include "bimax/common.hpp"
#include "bimax/instance.hpp"
#include "bimax/io.hpp"
#include "bimax/maxnorm.hpp"
#include "bimax/newton.hpp"
#include "bimax/oracle.hpp"
#include "bimax/special_cases.hpp"

namespace bimax {

/// Solver selection and routing. Instances with an exactly zero center are
/// routed to the centered closed form regardless of the requested iterative
/// solver; the detour is recorded in Solution::routed.

enum class SolverKind {
  kMaxNorm,
  kNewton,
  kCentered,
  kPolytope,
  kLp,
  kOracle
};

inline SolverKind parse_solver(const std::string& name) {
  if (name == "maxnorm") return SolverKind::kMaxNorm;
  if (name == "newton") return SolverKind::kNewton;
  if (name == "centered") return SolverKind::kCentered;
  if (name == "polytope") return SolverKind::kPolytope;
  if (name == "lp") return SolverKind::kLp;
  if (name == "oracle") return SolverKind::kOracle;
  throw std::invalid_argument(
      "unknown solver '" + name +
      "' (expected maxnorm|newton|centered|polytope|lp|oracle)");
}

inline std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kMaxNorm:
      return "maxnorm";
    case SolverKind::kNewton:
      return "newton";
    case SolverKind::kCentered:
      return "centered";
    case SolverKind::kPolytope:
      return "polytope";
    case SolverKind::kLp:
      return "lp";
    case SolverKind::kOracle:
      return "oracle";
  }
  return "unknown";
}

struct SolveOptions {
  double epsilon = 1e-8;
  double eta = 0.0;  ///< Newton schedule; 0 selects 1 + 1/sqrt(d+1).
};

namespace detail {

/// Reconstructs the instance a factor-free diagonal form describes:
/// A = I, W = diag(lambda), c = b, all in the original input order.
inline BilinearInstance instance_from_form(const DiagonalForm& form) {
  const dvec lambda = form.apply_unpermute(form.lambda);
  const dvec center = form.apply_unpermute(form.b);
  const int d = form.dim();
  return BilinearInstance(dmat::Identity(d, d),
                          Ellipsoid(center, dmat(lambda.asDiagonal())));
}

inline Solution centered_from_form(const DiagonalForm& form) {
  if (form.b.cwiseAbs().maxCoeff() != 0.0) {
    throw std::invalid_argument(
        "solve_centered requires an exactly zero center");
  }
  const int d = form.dim();
  const double lam_d = form.lambda[d - 1];
  dvec u = dvec::Zero(d);
  u[d - 1] = 1.0;
  Solution sol;
  sol.solver = "centered";
  sol.x = form.x_from_u(u);
  sol.theta = form.theta_from_phi(dvec(u / std::sqrt(lam_d)));
  sol.value = 1.0 / std::sqrt(lam_d);
  sol.diag_point = std::move(u);
  return sol;
}

}  // namespace detail

/// Solves a loaded problem with the requested solver, applying the zero-
/// center routing rule for the iterative solvers.
inline Solution solve_problem(const LoadedProblem& problem, SolverKind kind,
                              const SolveOptions& opts = {}) {
  switch (problem.kind) {
    case ProblemKind::kPolytope: {
      if (kind != SolverKind::kPolytope) {
        throw std::invalid_argument("solver '" + to_string(kind) +
                                    "' cannot handle a polytope instance");
      }
      return solve_polytope(*problem.polytope, *problem.confidence);
    }
    case ProblemKind::kLp: {
      if (kind != SolverKind::kLp) {
        throw std::invalid_argument(
            "solver '" + to_string(kind) +
            "' cannot handle an l_p-aligned instance");
      }
      return solve_lp_aligned(*problem.lp, opts.epsilon);
    }
    case ProblemKind::kPrediag: {
      const DiagonalForm& form = *problem.form;
      const bool zero_center = form.b.cwiseAbs().maxCoeff() == 0.0;
      switch (kind) {
        case SolverKind::kMaxNorm: {
          if (zero_center) {
            Solution sol = detail::centered_from_form(form);
            sol.solver = "maxnorm";
            sol.routed = "centered";
            return sol;
          }
          return solve_maxnorm(form, opts.epsilon);
        }
        case SolverKind::kNewton: {
          if (zero_center) {
            Solution sol = detail::centered_from_form(form);
            sol.solver = "newton";
            sol.routed = "centered";
            return sol;
          }
          return solve_newton(form, opts.epsilon, opts.eta);
        }
        case SolverKind::kCentered:
          return detail::centered_from_form(form);
        case SolverKind::kOracle:
          return oracle_solve(detail::instance_from_form(form), opts.epsilon);
        default:
          throw std::invalid_argument(
              "solver '" + to_string(kind) +
              "' cannot handle a pre-diagonalized instance");
      }
    }
    case ProblemKind::kFull: {
      const BilinearInstance& instance = *problem.instance;
      const bool zero_center =
          instance.confidence().center().cwiseAbs().maxCoeff() == 0.0;
      switch (kind) {
        case SolverKind::kMaxNorm: {
          if (zero_center) {
            Solution sol = solve_centered(instance);
            sol.solver = "maxnorm";
            sol.routed = "centered";
            return sol;
          }
          return solve_maxnorm(instance, opts.epsilon);
        }
        case SolverKind::kNewton: {
          if (zero_center) {
            Solution sol = solve_centered(instance);
            sol.solver = "newton";
            sol.routed = "centered";
            return sol;
          }
          return solve_newton(instance, opts.epsilon, opts.eta);
        }
        case SolverKind::kCentered:
          return solve_centered(instance);
        case SolverKind::kOracle:
          return oracle_solve(instance, opts.epsilon);
        default:
          throw std::invalid_argument("solver '" + to_string(kind) +
                                      "' cannot handle a full instance");
      }
    }
  }
  throw std::logic_error("unreachable problem kind");
}

}  // namespace bimax
