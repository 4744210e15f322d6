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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bimax {

inline constexpr const char* kVersion = "0.1.0";

using dvec = Eigen::VectorXd;
using dmat = Eigen::MatrixXd;

/// Base class for every failure the solvers can signal. Messages name the
/// violated invariant so CLI consumers can forward them verbatim.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A shape matrix is not symmetric positive definite within tolerance.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// Two containers that must share a dimension do not.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A direction that must be nonzero is (numerically) zero.
class ZeroVector : public Error {
 public:
  using Error::Error;
};

/// The secular function was evaluated at (or across) a pole.
class PoleHit : public Error {
 public:
  using Error::Error;
};

/// A barrier objective was evaluated outside its open domain.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// An iterative routine exceeded its certified step budget.
class MaxIterations : public Error {
 public:
  using Error::Error;
};

/// The convex reduction requires a nonzero transformed center.
class AllZeroCenter : public Error {
 public:
  using Error::Error;
};

/// The aligned-norm solver only supports p >= 2.
class UnsupportedP : public Error {
 public:
  using Error::Error;
};

/// A requested snapshot time lies outside the recorded horizon.
class TimeOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Per-phase diagnostics of the barrier solver: barrier scale, step counts by
/// stage, and the Newton decrement at which the phase terminated.
struct NewtonPhase {
  double t = 0.0;
  int damped_steps = 0;
  int quadratic_steps = 0;
  double lambda_final = 0.0;
};

/// Result of one solve. `x` is feasible for the action ellipsoid and `theta`
/// for the confidence ellipsoid by construction; `value` equals `x . theta`.
struct Solution {
  dvec x;
  dvec theta;
  double value = 0.0;
  /// Secular-equation multiplier (bisection solver only).
  std::optional<double> multiplier;
  /// Total iteration count (bisection steps, Newton steps, sweeps, ...).
  int iterations = 0;
  double wall_time_seconds = 0.0;
  /// Time spent diagonalizing before the solver proper started.
  double transform_seconds = 0.0;
  std::string solver;
  /// Set when the dispatcher re-routed the request (e.g. "centered" for a
  /// zero-center instance handed to an iterative solver).
  std::string routed;

  /// Solver point in diagonal coordinates: phi-hat for the bisection solver,
  /// the simplex point y for the barrier solver. Empty otherwise.
  dvec diag_point;

  /// Barrier solver only: one entry per centering phase.
  std::vector<NewtonPhase> phases;
  /// Barrier solver only: count of feasibility backtracks (expected 0).
  int safeguard_hits = 0;
  /// Barrier solver only: internal self-concordance checks that failed
  /// (expected 0; a nonzero count triggered the conservative t0 retry).
  int decrease_violations = 0;
  /// Barrier solver only: quadratic-stage contraction checks that failed.
  int contraction_violations = 0;
  /// Barrier solver only: which start weight ran — "printed", "conservative",
  /// or "capped" when the closed form exceeded the path-start ceiling.
  std::string t0_variant;
};

}  // namespace bimax
