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

#include <cstdint>

#include "bimax/generators.hpp"
#include "bimax/instance.hpp"
#include "bimax/rng.hpp"

namespace bimax::testing {

/// Random SPD matrix Q diag(lambda) Q^T with eigenvalues in [lo, hi].
inline dmat random_spd(int d, double lo, double hi, Rng& rng) {
  const dmat q = random_rotation(d, rng);
  dvec lambda(d);
  for (int i = 0; i < d; ++i) lambda[i] = rng.uniform(lo, hi);
  dmat m = q * lambda.asDiagonal() * q.transpose();
  return ((m + m.transpose()) / 2.0).eval();
}

/// Random full instance with conditioning bounded by roughly hi/lo on both
/// shapes and a Gaussian center of the given scale.
inline BilinearInstance random_instance(int d, double lo, double hi,
                                        double center_scale, Rng& rng) {
  const dmat a = random_spd(d, lo, hi, rng);
  const dmat w = random_spd(d, lo, hi, rng);
  dvec c(d);
  for (int i = 0; i < d; ++i) c[i] = center_scale * rng.normal();
  return BilinearInstance(a, Ellipsoid(c, w));
}

/// Checks that (x, theta) is feasible for the instance within tol and that
/// the solution value matches the bilinear objective.
inline bool feasible_pair(const BilinearInstance& instance, const dvec& x,
                          const dvec& theta, double tol = 1e-9) {
  const double action = norm_in(instance.action_shape(), x);
  const dvec delta = theta - instance.confidence().center();
  const double conf = norm_in(instance.confidence().shape(), delta);
  return action <= 1.0 + tol && conf <= 1.0 + tol;
}

}  // namespace bimax::testing
