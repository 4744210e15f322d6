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
#include "bimax/oracle.hpp"
#include "bimax/rng.hpp"
#include "support.hpp"

namespace bimax {
namespace {

using Catch::Matchers::WithinAbs;

dvec vec1(double a) {
  dvec v(1);
  v << a;
  return v;
}

dvec vec2(double a, double b) {
  dvec v(2);
  v << a, b;
  return v;
}

BilinearInstance worked_instance() {
  dmat w(2, 2);
  w << 1.0, 0.0, 0.0, 0.25;
  return BilinearInstance(dmat::Identity(2, 2),
                          Ellipsoid(vec2(1.0, 0.0), w));
}

TEST_CASE("alternate maximization contracts to the 1-d optimum") {
  BilinearInstance inst(dmat::Identity(1, 1),
                        Ellipsoid(vec1(3.0), dmat::Identity(1, 1)));
  Solution sol = alternate_maximization(inst, vec1(1.0), 1e-10);
  CHECK(sol.solver == "altmax");
  CHECK_THAT(sol.value, WithinAbs(4.0, 1e-9));
  CHECK_THAT(sol.x(0), WithinAbs(1.0, 1e-9));
  CHECK_THAT(sol.theta(0), WithinAbs(4.0, 1e-9));
}

TEST_CASE("alternate maximization can be trapped on the symmetry axis") {
  BilinearInstance inst = worked_instance();
  const double star = 4.0 / std::sqrt(3.0);

  // Starting exactly on the axis converges to the local maximum value 2.
  Solution axis = alternate_maximization(inst, vec2(1.0, 0.0), 1e-12);
  CHECK_THAT(axis.value, WithinAbs(2.0, 1e-9));

  // Any off-axis perturbation escapes to the global optimum; the two signs
  // land on the two mirror-image maximizers.
  Solution up = alternate_maximization(inst, vec2(1.0, 1e-9), 1e-12);
  Solution down = alternate_maximization(inst, vec2(1.0, -1e-9), 1e-12);
  CHECK_THAT(up.value, WithinAbs(star, 1e-9));
  CHECK_THAT(down.value, WithinAbs(star, 1e-9));
  CHECK(up.theta(1) > 0.0);
  CHECK(down.theta(1) < 0.0);

  Solution diag = alternate_maximization(inst, vec2(1.0, 1.0), 1e-12);
  CHECK_THAT(diag.value, WithinAbs(star, 1e-9));
  CHECK(testing::feasible_pair(inst, diag.x, diag.theta));
}

TEST_CASE("alternate maximization never decreases the objective") {
  Rng rng = make_stream(113, "altmax-monotone");
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform01() * 6.0);
    BilinearInstance inst = testing::random_instance(d, 0.2, 5.0, 1.0, rng);
    dvec theta0(d);
    for (int i = 0; i < d; ++i) theta0(i) = rng.normal();
    std::vector<double> trace;
    Solution sol = alternate_maximization(inst, theta0, 1e-10, &trace);
    REQUIRE_FALSE(trace.empty());
    for (std::size_t k = 1; k < trace.size(); ++k) {
      CHECK(trace[k] >= trace[k - 1] - 1e-12);
    }
    CHECK_THAT(sol.value, WithinAbs(trace.back(), 1e-15));
    CHECK(testing::feasible_pair(inst, sol.x, sol.theta));
  }
}

TEST_CASE("alternate maximization validates the start point") {
  BilinearInstance inst = worked_instance();
  CHECK_THROWS_AS(alternate_maximization(inst, dvec::Zero(2), 1e-8),
                  ZeroVector);
  CHECK_THROWS_AS(alternate_maximization(inst, vec1(1.0), 1e-8),
                  DimensionMismatch);
  CHECK_THROWS_AS(alternate_maximization(inst, vec2(1.0, 1.0), 0.0),
                  std::invalid_argument);
}

TEST_CASE("oracle_solve finds the global optimum of the worked instance") {
  Solution sol = oracle_solve(worked_instance(), 1e-9);
  CHECK(sol.solver == "oracle");
  CHECK_THAT(sol.value, WithinAbs(4.0 / std::sqrt(3.0), 1e-8));
}

TEST_CASE("oracle_solve on unit balls and centered instances") {
  SECTION("unit balls give norm(c) + 1") {
    Rng rng = make_stream(127, "oracle-unit");
    dvec c(3);
    for (int i = 0; i < 3; ++i) c(i) = rng.normal();
    BilinearInstance inst(dmat::Identity(3, 3),
                          Ellipsoid(c, dmat::Identity(3, 3)));
    Solution sol = oracle_solve(inst, 1e-9);
    CHECK_THAT(sol.value, WithinAbs(c.norm() + 1.0, 1e-8));
  }
  SECTION("zero center still produces the eigen direction") {
    dmat w(2, 2);
    w << 0.25, 0.0, 0.0, 1.0;
    BilinearInstance inst(dmat::Identity(2, 2),
                          Ellipsoid(dvec::Zero(2), w));
    Solution sol = oracle_solve(inst, 1e-9);
    CHECK_THAT(sol.value, WithinAbs(2.0, 1e-8));
  }
}

TEST_CASE("oracle_solve dominates any single alternate-maximization run") {
  Rng rng = make_stream(131, "oracle-dominates");
  for (int trial = 0; trial < 10; ++trial) {
    BilinearInstance inst = testing::random_instance(2, 0.2, 8.0, 1.2, rng);
    dvec theta0(2);
    for (int i = 0; i < 2; ++i) theta0(i) = rng.normal();
    Solution single = alternate_maximization(inst, theta0, 1e-9);
    Solution multi = oracle_solve(inst, 1e-9);
    CHECK(multi.value >= single.value - 1e-9);
    CHECK(testing::feasible_pair(inst, multi.x, multi.theta));
  }
}

TEST_CASE("multistart and grid agree in two dimensions") {
  Rng rng = make_stream(137, "oracle-grid-agree");
  for (int trial = 0; trial < 100; ++trial) {
    BilinearInstance inst = testing::random_instance(2, 0.2, 10.0, 1.0, rng);
    Solution sol = oracle_solve(inst, 1e-9);
    // A fresh dense sweep over action directions, polished once.
    double best = -std::numeric_limits<double>::infinity();
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * std::numbers::pi * (k + 0.5) / n;
      dvec x = vec2(std::cos(a), std::sin(a));
      x /= norm_in(inst.action_shape(), x);
      best = std::max(best, px_objective(inst, x));
    }
    CHECK(sol.value >= best - 1e-5);
  }
}

TEST_CASE("oracle is deterministic across calls") {
  Rng rng = make_stream(139, "oracle-deterministic");
  BilinearInstance inst = testing::random_instance(3, 0.3, 4.0, 1.0, rng);
  Solution a = oracle_solve(inst, 1e-9);
  Solution b = oracle_solve(inst, 1e-9);
  CHECK(a.value == b.value);
  CHECK(a.x == b.x);
  CHECK(a.theta == b.theta);
}

}  // namespace
}  // namespace bimax
