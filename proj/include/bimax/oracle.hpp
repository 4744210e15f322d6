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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "bimax/common.hpp"
#include "bimax/instance.hpp"
#include "bimax/rng.hpp"

namespace bimax {

/// Independent reference solvers used to test the main algorithms:
/// alternate maximization with random restarts (converges to local maxima,
/// hence the restarts) and a dense angular grid for d <= 3.

/// Seed and stream label of the built-in restart sequence; exposed so tests
/// can replay the exact restart points (theta0 = c + W^{-1/2} g, g standard
/// normal from this stream).
inline constexpr std::uint64_t kOracleSeed = 0x0b5e55ed;
inline constexpr const char* kOracleStream = "oracle-restarts";

/// Alternates exact best responses: x maximizing x.theta over the action
/// ellipsoid, then theta maximizing over the confidence ellipsoid, until the
/// theta update moves less than epsilon. The bilinear value is nondecreasing
/// because each half-step is an exact maximization. Converges to a local
/// (not necessarily global) maximum.
inline Solution alternate_maximization(const BilinearInstance& instance,
                                       const dvec& theta0, double epsilon,
                                       std::vector<double>* value_trace =
                                           nullptr) {
  const auto start = std::chrono::steady_clock::now();
  if (theta0.size() != instance.dim()) {
    throw DimensionMismatch("theta0 has dimension " +
                            std::to_string(theta0.size()) + ", instance is " +
                            std::to_string(instance.dim()) + "-dimensional");
  }
  if (theta0.norm() == 0.0) {
    throw ZeroVector("alternate maximization needs a nonzero starting theta");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument(
        "alternate_maximization: epsilon must be positive");
  }
  const Eigen::LLT<dmat> chol_action(instance.action_shape());
  const Eigen::LLT<dmat> chol_conf(instance.confidence().shape());
  const dvec& c = instance.confidence().center();

  constexpr int kMaxSweeps = 2000;
  dvec theta = theta0;
  dvec x;
  double value = 0.0;
  int sweeps = 0;
  for (int k = 0; k < kMaxSweeps; ++k) {
    const dvec pre = chol_action.solve(theta);
    const double action_norm = std::sqrt(std::max(0.0, theta.dot(pre)));
    if (action_norm == 0.0) break;
    x = pre / action_norm;

    const dvec post = chol_conf.solve(x);
    const double conf_norm = std::sqrt(std::max(0.0, x.dot(post)));
    const dvec theta_next = c + post / conf_norm;

    sweeps = k + 1;
    value = x.dot(theta_next);
    if (value_trace != nullptr) value_trace->push_back(value);
    const bool settled = (theta_next - theta).norm() <= epsilon;
    theta = theta_next;
    if (settled) break;
  }

  Solution sol;
  sol.solver = "altmax";
  sol.x = x;
  sol.theta = theta;
  sol.value = value;
  sol.iterations = sweeps;
  sol.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return sol;
}

namespace detail {

/// Dense angular sweep of the action sphere for d <= 3, scoring the
/// concave-free objective; returns the best direction found, or an empty
/// vector for d > 3.
inline dvec grid_best_direction(const BilinearInstance& instance) {
  const int d = instance.dim();
  if (d > 3) return dvec();
  const dmat inv_sqrt_action =
      spd_sqrt_pair(instance.action_shape(), "action shape").second;
  const Eigen::LLT<dmat> chol_conf(instance.confidence().shape());
  const dvec& c = instance.confidence().center();

  auto score = [&](const dvec& x) {
    const dvec solved = chol_conf.solve(x);
    return x.dot(c) + std::sqrt(std::max(0.0, x.dot(solved)));
  };

  dvec best_x;
  double best = -std::numeric_limits<double>::infinity();
  auto consider = [&](const dvec& direction) {
    const dvec x = inv_sqrt_action * direction;
    const double s = score(x);
    if (s > best) {
      best = s;
      best_x = x;
    }
  };

  if (d == 1) {
    consider(dvec::Constant(1, 1.0));
    consider(dvec::Constant(1, -1.0));
  } else if (d == 2) {
    constexpr int kPoints = 10000;
    for (int k = 0; k < kPoints; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / kPoints;
      dvec v(2);
      v << std::cos(angle), std::sin(angle);
      consider(v);
    }
  } else {
    constexpr int kPoints = 400;
    for (int i = 0; i < kPoints; ++i) {
      const double azimuth = 2.0 * std::numbers::pi * i / kPoints;
      for (int j = 0; j < kPoints; ++j) {
        const double polar = std::numbers::pi * (j + 0.5) / kPoints;
        dvec v(3);
        v << std::sin(polar) * std::cos(azimuth),
            std::sin(polar) * std::sin(azimuth), std::cos(polar);
        consider(v);
      }
    }
  }
  return best_x;
}

}  // namespace detail

/// Reference solver: the best of 64 seeded alternate-maximization restarts
/// and, for d <= 3, a dense angular grid (whose best point is additionally
/// polished by alternate maximization). Ties between restarts go to the
/// lowest restart index.
inline Solution oracle_solve(const BilinearInstance& instance,
                             double epsilon) {
  const auto start = std::chrono::steady_clock::now();
  const int d = instance.dim();
  const dvec& c = instance.confidence().center();
  const dmat inv_sqrt_conf =
      detail::spd_sqrt_pair(instance.confidence().shape(), "confidence shape")
          .second;

  Rng rng = make_stream(kOracleSeed, kOracleStream);
  Solution best;
  best.value = -std::numeric_limits<double>::infinity();
  int runs = 0;
  auto consider = [&](Solution candidate) {
    ++runs;
    if (candidate.value > best.value) best = std::move(candidate);
  };

  constexpr int kRestarts = 64;
  for (int r = 0; r < kRestarts; ++r) {
    dvec g(d);
    for (int i = 0; i < d; ++i) g[i] = rng.normal();
    const dvec theta0 = c + inv_sqrt_conf * g;
    if (theta0.norm() == 0.0) continue;
    consider(alternate_maximization(instance, theta0, epsilon));
  }

  const dvec grid_x = detail::grid_best_direction(instance);
  if (grid_x.size() > 0) {
    Solution grid;
    grid.solver = "grid";
    grid.x = grid_x;
    grid.theta = theta_from_x(instance, grid_x);
    grid.value = grid_x.dot(grid.theta);
    consider(std::move(grid));
    consider(
        alternate_maximization(instance, theta_from_x(instance, grid_x),
                               epsilon));
  }

  best.solver = "oracle";
  best.iterations = runs;
  best.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return best;
}

}  // namespace bimax
