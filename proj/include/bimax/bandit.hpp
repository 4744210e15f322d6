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
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Cholesky>

#include "bimax/common.hpp"
#include "bimax/generators.hpp"
#include "bimax/instance.hpp"
#include "bimax/maxnorm.hpp"
#include "bimax/newton.hpp"
#include "bimax/rng.hpp"
#include "bimax/special_cases.hpp"

namespace bimax {

/// Linear bandit simulation: Gaussian rewards y_t = x_t.zeta + z_t over the
/// unit ball, an optimistic agent that solves the bilinear problem against
/// its confidence ellipsoid every round, and the 1-D epsilon-LinUCB
/// construction demonstrating that approximate optimism suffers linear
/// regret.

/// Environment: hidden parameter, unit-variance Gaussian noise, horizon.
struct BanditEnv {
  dvec zeta;
  double sigma = 1.0;
  int horizon = 0;
  std::uint64_t seed = 0;
};

/// Environment with a seeded random parameter direction of given norm.
inline BanditEnv make_env(int d, double zeta_norm, int horizon,
                          std::uint64_t seed) {
  if (d < 1 || horizon < 1) {
    throw std::invalid_argument("environment needs d >= 1 and horizon >= 1");
  }
  Rng rng = make_stream(seed, "zeta");
  dvec direction(d);
  double norm = 0.0;
  while (norm == 0.0) {
    for (int i = 0; i < d; ++i) direction[i] = rng.normal();
    norm = direction.norm();
  }
  BanditEnv env;
  env.zeta = zeta_norm * direction / norm;
  env.sigma = 1.0;
  env.horizon = horizon;
  env.seed = seed;
  return env;
}

/// One played round: action, realized reward, noise-free instantaneous
/// regret, and the wall time the solver spent producing the action.
struct RegretStep {
  dvec x;
  double reward = 0.0;
  double instant_regret = 0.0;
  double solver_time = 0.0;
};

/// Full run record. `cumulative[t]` is the exact prefix sum of the
/// instantaneous regrets through round t+1. Snapshots hold the confidence
/// parameters at requested times; `certificate_violations` counts rounds on
/// which an approximate optimist's played pair fell below its approximation
/// ratio (always 0 for the exact agents).
struct RegretTrace {
  std::vector<RegretStep> per_round;
  std::vector<double> cumulative;
  std::vector<DesignSnapshot> snapshots;
  int certificate_violations = 0;

  double total_regret() const {
    return cumulative.empty() ? 0.0 : cumulative.back();
  }
};

enum class PbSolver { kMaxNorm, kNewton };

/// Optimistic-agent configuration. delta = 0 selects the default 1/T.
struct OptimisticConfig {
  PbSolver solver = PbSolver::kMaxNorm;
  double regularizer = 1.0;
  double norm_bound = 1.0;
  double delta = 0.0;
  double solver_epsilon = 1e-8;
  std::vector<int> snapshot_times;
};

/// Runs the optimistic agent: each round forms the ridge estimate and the
/// ellipsoid W_t = V_t / beta_t with the standard self-normalized radius
/// sqrt(beta_t) = sigma sqrt(2 log(1/delta) + log det(V_t / lambda_reg)) +
/// sqrt(lambda_reg) S, solves the bilinear problem with A = I and c = the
/// estimate, and plays the maximizing action. Rounds with an exactly zero
/// estimate use the centered closed form.
inline RegretTrace run_optimistic(const BanditEnv& env,
                                  const OptimisticConfig& cfg) {
  const int d = static_cast<int>(env.zeta.size());
  const int T = env.horizon;
  if (T < 1) throw std::invalid_argument("horizon must be at least 1");
  const double delta = cfg.delta > 0.0 ? cfg.delta : 1.0 / T;
  const double lambda_reg = cfg.regularizer;
  if (!(lambda_reg > 0.0)) {
    throw std::invalid_argument("regularizer must be positive");
  }

  std::unordered_set<int> wanted(cfg.snapshot_times.begin(),
                                 cfg.snapshot_times.end());
  Rng noise = make_stream(env.seed, "bandit-noise");
  const double optimal = env.zeta.norm();
  const dmat identity = dmat::Identity(d, d);

  dmat design = lambda_reg * identity;
  dvec moment = dvec::Zero(d);

  RegretTrace trace;
  trace.per_round.reserve(T);
  trace.cumulative.reserve(T);
  double running = 0.0;

  for (int t = 1; t <= T; ++t) {
    const Eigen::LLT<dmat> chol(design);
    const dvec estimate = chol.solve(moment);
    double log_det = 0.0;
    const dmat l = chol.matrixL();
    for (int i = 0; i < d; ++i) log_det += 2.0 * std::log(l(i, i));
    log_det -= d * std::log(lambda_reg);
    const double radius =
        env.sigma * std::sqrt(2.0 * std::log(1.0 / delta) + log_det) +
        std::sqrt(lambda_reg) * cfg.norm_bound;
    const double beta = radius * radius;
    dmat confidence = design / beta;
    confidence = ((confidence + confidence.transpose()) / 2.0).eval();

    if (wanted.count(t) > 0) {
      trace.snapshots.push_back({t, estimate, confidence});
    }

    Solution sol;
    const auto solve_start = std::chrono::steady_clock::now();
    if (estimate.cwiseAbs().maxCoeff() == 0.0) {
      sol = solve_centered(identity, confidence);
    } else {
      const BilinearInstance instance(identity,
                                      Ellipsoid(estimate, confidence));
      sol = cfg.solver == PbSolver::kMaxNorm
                ? solve_maxnorm(instance, cfg.solver_epsilon)
                : solve_newton(instance, cfg.solver_epsilon);
    }
    const double solve_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      solve_start)
            .count();

    const dvec x = sol.x;
    const double mean_reward = x.dot(env.zeta);
    const double reward = mean_reward + env.sigma * noise.normal();
    design += x * x.transpose();
    moment += reward * x;

    running += optimal - mean_reward;
    trace.per_round.push_back({x, reward, optimal - mean_reward, solve_time});
    trace.cumulative.push_back(running);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// 1-D epsilon-LinUCB construction
// ---------------------------------------------------------------------------

/// Scalar confidence interval C_t = [zeta_hat - f(t)/sqrt(V), zeta_hat +
/// f(t)/sqrt(V)] with f(t) = 1 + sqrt(log(T + t T)) and V >= 1.
struct OneDimConfidence {
  double Vt = 1.0;
  double zeta_hat = 0.0;

  static double f(double t, double T) {
    return 1.0 + std::sqrt(std::log(T + t * T));
  }
  double lower(double t, double T) const {
    return zeta_hat - f(t, T) / std::sqrt(Vt);
  }
  double upper(double t, double T) const {
    return zeta_hat + f(t, T) / std::sqrt(Vt);
  }
};

/// Round after which the interval is positive with high probability and the
/// adversarial epsilon-optimist locks onto the suboptimal action.
inline double eps_linucb_threshold(double epsilon, double T) {
  return 4.0 * (1.0 + std::sqrt(std::log(T + T * T))) /
         ((1.0 - epsilon) * (1.0 - epsilon));
}

/// Paired traces of the adversarial epsilon-optimist and the exact optimist.
struct EpsLinUcbResult {
  RegretTrace approx;
  RegretTrace exact;
  double t_eps = 0.0;
};

namespace detail {

struct ScalarAgentState {
  OneDimConfidence conf;
  double moment = 0.0;

  void update(double x, double reward) {
    conf.Vt += x * x;
    moment += x * reward;
    conf.zeta_hat = moment / conf.Vt;
  }
};

}  // namespace detail

/// Two-action instance of the lower-bound construction: actions {1-eps, 1},
/// hidden parameter 1, unit noise. The epsilon-optimist plays 1-eps whenever
/// the interval is entirely positive — a valid (1-eps)-approximate choice —
/// and therefore accumulates regret eps per round; the exact optimist's
/// regret is sublinear. Both agents see the same noise realizations.
inline EpsLinUcbResult run_eps_linucb_demo(double epsilon, int T,
                                           std::uint64_t seed) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1)");
  }
  if (T < 1) throw std::invalid_argument("horizon must be at least 1");

  const double zeta = 1.0;
  const double x_lo = 1.0 - epsilon;
  Rng noise = make_stream(seed, "eps-linucb-noise");

  EpsLinUcbResult result;
  result.t_eps = eps_linucb_threshold(epsilon, T);
  detail::ScalarAgentState approx_state, exact_state;
  double run_approx = 0.0, run_exact = 0.0;

  for (int t = 1; t <= T; ++t) {
    const double z = noise.normal();

    const double hi_e = exact_state.conf.upper(t, T);
    const double x_exact = hi_e >= 0.0 ? 1.0 : x_lo;

    const double lo_a = approx_state.conf.lower(t, T);
    const double hi_a = approx_state.conf.upper(t, T);
    double x_approx;
    if (lo_a > 0.0) {
      x_approx = x_lo;
    } else {
      x_approx = hi_a >= 0.0 ? 1.0 : x_lo;
    }
    const double best_value = std::max(1.0 * hi_a, x_lo * hi_a);
    if (x_approx * hi_a < (1.0 - epsilon) * best_value - 1e-12) {
      ++result.approx.certificate_violations;
    }

    const double reward_a = x_approx * zeta + z;
    const double reward_e = x_exact * zeta + z;
    approx_state.update(x_approx, reward_a);
    exact_state.update(x_exact, reward_e);

    run_approx += zeta - x_approx * zeta;
    run_exact += zeta - x_exact * zeta;
    result.approx.per_round.push_back(
        {dvec::Constant(1, x_approx), reward_a, zeta - x_approx * zeta, 0.0});
    result.exact.per_round.push_back(
        {dvec::Constant(1, x_exact), reward_e, zeta - x_exact * zeta, 0.0});
    result.approx.cumulative.push_back(run_approx);
    result.exact.cumulative.push_back(run_exact);
  }
  return result;
}

/// Continuous-action variant over X = [0, 1]: the adversarial agent scales
/// the exact optimist's action by (1 - eps), again a valid approximate
/// choice with regret at least eps per round once the interval is positive.
inline EpsLinUcbResult run_eps_linucb_continuous(double epsilon, int T,
                                                 std::uint64_t seed) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1)");
  }
  if (T < 1) throw std::invalid_argument("horizon must be at least 1");

  const double zeta = 1.0;
  Rng noise = make_stream(seed, "eps-linucb-noise");

  EpsLinUcbResult result;
  result.t_eps = eps_linucb_threshold(epsilon, T);
  detail::ScalarAgentState approx_state, exact_state;
  double run_approx = 0.0, run_exact = 0.0;

  for (int t = 1; t <= T; ++t) {
    const double z = noise.normal();

    const double x_exact = exact_state.conf.upper(t, T) >= 0.0 ? 1.0 : 0.0;
    const double x_own_exact =
        approx_state.conf.upper(t, T) >= 0.0 ? 1.0 : 0.0;
    const double x_approx = (1.0 - epsilon) * x_own_exact;

    const double reward_a = x_approx * zeta + z;
    const double reward_e = x_exact * zeta + z;
    approx_state.update(x_approx, reward_a);
    exact_state.update(x_exact, reward_e);

    run_approx += zeta - x_approx * zeta;
    run_exact += zeta - x_exact * zeta;
    result.approx.per_round.push_back(
        {dvec::Constant(1, x_approx), reward_a, zeta - x_approx * zeta, 0.0});
    result.exact.per_round.push_back(
        {dvec::Constant(1, x_exact), reward_e, zeta - x_exact * zeta, 0.0});
    result.approx.cumulative.push_back(run_approx);
    result.exact.cumulative.push_back(run_exact);
  }
  return result;
}

}  // namespace bimax
