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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "bimax/instance.hpp"
#include "bimax/maxnorm.hpp"
#include "bimax/rng.hpp"
#include "bimax/special_cases.hpp"
#include "support.hpp"

namespace bimax {
namespace {

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

dvec vec2(double a, double b) {
  dvec v(2);
  v << a, b;
  return v;
}

TEST_CASE("solve_centered on unit balls") {
  Solution sol = solve_centered(dmat::Identity(3, 3), dmat::Identity(3, 3));
  CHECK(sol.solver == "centered");
  CHECK_THAT(sol.value, WithinAbs(1.0, 1e-12));
  CHECK_THAT(sol.x.norm(), WithinAbs(1.0, 1e-12));
  CHECK_THAT(sol.theta.norm(), WithinAbs(1.0, 1e-12));
  CHECK_THAT(sol.x.dot(sol.theta), WithinAbs(1.0, 1e-12));
}

TEST_CASE("solve_centered on a diagonal pair") {
  dmat a(2, 2), w(2, 2);
  a << 1.0, 0.0, 0.0, 4.0;
  w << 4.0, 0.0, 0.0, 1.0;
  Solution sol = solve_centered(a, w);
  // (WA)^{-1/2} = diag(1/2, 1/2): a fully degenerate spectrum with value 1/2.
  CHECK_THAT(sol.value, WithinAbs(0.5, 1e-12));
  BilinearInstance inst(a, Ellipsoid(dvec::Zero(2), w));
  CHECK(testing::feasible_pair(inst, sol.x, sol.theta));
  CHECK_THAT(objective(sol.x, sol.theta), WithinAbs(0.5, 1e-12));
}

TEST_CASE("solve_centered equals the eigenvalue restatement") {
  Rng rng = make_stream(101, "centered-eigen");
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform01() * 8.0);
    const dmat a = testing::random_spd(d, 0.2, 6.0, rng);
    const dmat w = testing::random_spd(d, 0.2, 6.0, rng);
    Solution sol = solve_centered(a, w);

    // value^2 is the largest eigenvalue of A^{-1} W^{-1}.
    const dmat m = a.inverse() * w.inverse();
    Eigen::EigenSolver<dmat> es(m);
    const double top = es.eigenvalues().real().maxCoeff();
    CHECK_THAT(sol.value * sol.value, WithinRel(top, 1e-9));

    BilinearInstance inst(a, Ellipsoid(dvec::Zero(d), w));
    CHECK(testing::feasible_pair(inst, sol.x, sol.theta));
    CHECK_THAT(objective(sol.x, sol.theta), WithinRel(sol.value, 1e-9));

    // Cross-check against the clipped bisection solver.
    Solution mn = solve_maxnorm(inst, 1e-8);
    CHECK(std::abs(sol.value - mn.value) <= 1e-6);
  }
}

TEST_CASE("solve_centered instance overload requires a zero center") {
  Ellipsoid off(vec2(0.1, 0.0), dmat::Identity(2, 2));
  BilinearInstance inst(dmat::Identity(2, 2), off);
  CHECK_THROWS_AS(solve_centered(inst), std::invalid_argument);

  Ellipsoid centered(dvec::Zero(2), dmat::Identity(2, 2));
  BilinearInstance ok(dmat::Identity(2, 2), centered);
  CHECK_THAT(solve_centered(ok).value, WithinAbs(1.0, 1e-12));
}

TEST_CASE("solve_polytope scans the vertex list") {
  SECTION("l1-ball vertices with an offset center") {
    std::vector<dvec> verts = {vec2(1.0, 0.0), vec2(-1.0, 0.0),
                               vec2(0.0, 1.0), vec2(0.0, -1.0)};
    Ellipsoid conf(vec2(0.5, 0.0), dmat::Identity(2, 2));
    Solution sol = solve_polytope(VertexPolytope(verts), conf);
    CHECK(sol.solver == "polytope");
    CHECK_THAT(sol.value, WithinAbs(1.5, 1e-12));
    CHECK(sol.x == verts[0]);
    CHECK_THAT(sol.theta(0), WithinAbs(1.5, 1e-12));
    CHECK_THAT(sol.theta(1), WithinAbs(0.0, 1e-12));
    CHECK(sol.iterations == 4);
  }
  SECTION("single vertex") {
    std::vector<dvec> verts = {vec2(0.3, -0.7)};
    Ellipsoid conf(vec2(0.0, 0.0), dmat::Identity(2, 2));
    Solution sol = solve_polytope(VertexPolytope(verts), conf);
    CHECK(sol.x == verts[0]);
    CHECK_THAT(sol.value, WithinRel(verts[0].norm(), 1e-12));
  }
  SECTION("symmetric ties break to the lowest index") {
    const double s = std::sqrt(0.5);
    std::vector<dvec> verts = {vec2(s, s), vec2(s, -s), vec2(-s, s)};
    Ellipsoid conf(dvec::Zero(2), dmat::Identity(2, 2));
    Solution sol = solve_polytope(VertexPolytope(verts), conf);
    CHECK(sol.x == verts[0]);
    CHECK_THAT(sol.value, WithinAbs(1.0, 1e-12));
  }
  SECTION("a zero vertex scores zero and can win") {
    std::vector<dvec> verts = {dvec::Zero(2), vec2(-1.0, 0.0)};
    Ellipsoid conf(vec2(10.0, 0.0), dmat::Identity(2, 2));
    Solution sol = solve_polytope(VertexPolytope(verts), conf);
    // Scores: 0 for the origin, -10 + 1 = -9 for -e1.
    CHECK(sol.x == verts[0]);
    CHECK_THAT(sol.value, WithinAbs(0.0, 0.0));
    CHECK(sol.theta == conf.center());
  }
  SECTION("validation") {
    CHECK_THROWS_AS(VertexPolytope(std::vector<dvec>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(VertexPolytope({vec2(1.0, 0.0), dvec::Ones(3)}),
                    DimensionMismatch);
    Ellipsoid conf3(dvec::Zero(3), dmat::Identity(3, 3));
    CHECK_THROWS_AS(solve_polytope(VertexPolytope({vec2(1.0, 0.0)}), conf3),
                    DimensionMismatch);
  }
}

TEST_CASE("solve_polytope equals the direct double loop") {
  Rng rng = make_stream(103, "polytope-loop");
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform01() * 4.0);
    const dmat w = testing::random_spd(d, 0.3, 4.0, rng);
    dvec c(d);
    for (int i = 0; i < d; ++i) c(i) = rng.normal();
    Ellipsoid conf(c, w);

    std::vector<dvec> verts;
    const int n = 3 + static_cast<int>(rng.uniform01() * 12.0);
    for (int k = 0; k < n; ++k) {
      dvec v(d);
      for (int i = 0; i < d; ++i) v(i) = rng.normal();
      verts.push_back(v);
    }
    BilinearInstance inst(dmat::Identity(d, d), conf);
    Solution sol = solve_polytope(VertexPolytope(verts), conf);

    double best = -std::numeric_limits<double>::infinity();
    for (const dvec& v : verts) {
      const double val =
          v.cwiseAbs().maxCoeff() == 0.0
              ? 0.0
              : objective(v, theta_from_x(inst, v));
      best = std::max(best, val);
    }
    CHECK_THAT(sol.value, WithinRel(best, 1e-10));
  }
}

TEST_CASE("solve_lp_aligned handles the degenerate single coordinate") {
  LpAlignedInstance inst;
  inst.p = 3.5;
  inst.c = dvec::Constant(1, -2.0);
  inst.lambda = dvec::Constant(1, 4.0);
  Solution sol = solve_lp_aligned(inst, 1e-8);
  CHECK(sol.solver == "lp");
  // y = 1 forced: value |c| + lambda^{-1/2} = 2.5, x = sign(c).
  CHECK_THAT(sol.value, WithinAbs(2.5, 1e-9));
  CHECK_THAT(sol.x(0), WithinAbs(-1.0, 1e-9));
}

TEST_CASE("solve_lp_aligned at p = 2 matches the bisection solver") {
  SECTION("worked corner case") {
    LpAlignedInstance inst;
    inst.p = 2.0;
    inst.c = vec2(1.0, 0.0);
    inst.lambda = vec2(1.0, 4.0);
    const double eps = 1e-8;
    Solution lp = solve_lp_aligned(inst, eps);

    dmat w(2, 2);
    w << 1.0, 0.0, 0.0, 4.0;
    BilinearInstance full(dmat::Identity(2, 2),
                          Ellipsoid(inst.c, w));
    Solution mn = solve_maxnorm(full, eps);
    CHECK(std::abs(lp.value - mn.value) <= 2.0 * eps);
    // The optimum is the corner y = e1: value |c_1| + lambda_1^{-1/2} = 2.
    CHECK_THAT(lp.value, WithinAbs(2.0, 1e-7));
    CHECK(testing::feasible_pair(full, lp.x, lp.theta));
  }
  SECTION("random diagonal instances") {
    Rng rng = make_stream(107, "lp-vs-maxnorm");
    const double eps = 1e-6;
    for (int trial = 0; trial < 10; ++trial) {
      const int d = 2 + static_cast<int>(rng.uniform01() * 5.0);
      LpAlignedInstance inst;
      inst.p = 2.0;
      inst.c = dvec(d);
      inst.lambda = dvec(d);
      for (int i = 0; i < d; ++i) {
        inst.c(i) = rng.normal();
        inst.lambda(i) = rng.uniform(0.3, 6.0);
      }
      Solution lp = solve_lp_aligned(inst, eps);
      Solution mn = solve_maxnorm(
          BilinearInstance(dmat::Identity(d, d),
                           Ellipsoid(inst.c, dmat(inst.lambda.asDiagonal()))),
          eps);
      CHECK(std::abs(lp.value - mn.value) <= 2.0 * eps);
    }
  }
}

TEST_CASE("solve_lp_aligned at p = 4 matches a dense angular grid") {
  LpAlignedInstance inst;
  inst.p = 4.0;
  inst.c = vec2(1.0, 1.0);
  inst.lambda = vec2(1.0, 1.0);
  Solution sol = solve_lp_aligned(inst, 1e-6);

  // Grid the l4 sphere: x = (cos^{1/2} a, sin^{1/2} a) spans the positive
  // quadrant; the objective there is x . c + |x ./ lambda|_{lambda^{-1}}.
  double best = 0.0;
  const int n = 1000000;
  for (int k = 0; k <= n; ++k) {
    const double a = 0.5 * std::numbers::pi * k / n;
    const double x1 = std::sqrt(std::cos(a));
    const double x2 = std::sqrt(std::sin(a));
    const double val = x1 + x2 + std::sqrt(x1 * x1 + x2 * x2);
    best = std::max(best, val);
  }
  CHECK_THAT(sol.value, WithinAbs(best, 1e-4));
}

TEST_CASE("lp objective is midpoint convex for p >= 2") {
  Rng rng = make_stream(109, "lp-midpoint");
  for (double p : {2.0, 3.0, 4.0}) {
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 2 + static_cast<int>(rng.uniform01() * 4.0);
      LpAlignedInstance inst;
      inst.p = p;
      inst.c = dvec(d);
      inst.lambda = dvec(d);
      for (int i = 0; i < d; ++i) {
        inst.c(i) = rng.normal();
        inst.lambda(i) = rng.uniform(0.2, 5.0);
      }
      // Two random points in the open simplex.
      dvec y1(d), y2(d);
      for (int i = 0; i < d; ++i) {
        y1(i) = rng.exponential() + 1e-6;
        y2(i) = rng.exponential() + 1e-6;
      }
      y1 /= y1.sum() * (1.0 + 1e-9);
      y2 /= y2.sum() * (1.0 + 1e-9);
      const dvec mid = (y1 + y2) / 2.0;
      CHECK(lp_objective(inst, mid) <=
            (lp_objective(inst, y1) + lp_objective(inst, y2)) / 2.0 + 1e-10);
    }
  }
}

TEST_CASE("solve_lp_aligned validates its inputs") {
  LpAlignedInstance inst;
  inst.p = 1.5;
  inst.c = vec2(1.0, 0.0);
  inst.lambda = vec2(1.0, 1.0);
  CHECK_THROWS_AS(solve_lp_aligned(inst, 1e-6), UnsupportedP);

  inst.p = 2.0;
  inst.lambda = dvec::Ones(3);
  CHECK_THROWS_AS(solve_lp_aligned(inst, 1e-6), DimensionMismatch);

  inst.lambda = vec2(1.0, -1.0);
  CHECK_THROWS_AS(solve_lp_aligned(inst, 1e-6), NotPositiveDefinite);

  inst.lambda = vec2(1.0, 1.0);
  CHECK_THROWS_AS(solve_lp_aligned(inst, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lp_objective(inst, vec2(-0.1, 0.5)), DomainViolation);
}

}  // namespace
}  // namespace bimax
