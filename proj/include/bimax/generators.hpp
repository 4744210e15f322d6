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
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "bimax/common.hpp"
#include "bimax/instance.hpp"
#include "bimax/rng.hpp"

namespace bimax {

/// Seeded synthetic instance generation: the three spectrum families of the
/// benchmark suite, the matching center distribution, and extraction of
/// solver instances from bandit-run snapshots.

enum class SpectrumKind { kStacked, kRandomStacked, kOrderedExp };

inline std::string to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::kStacked:
      return "stacked";
    case SpectrumKind::kRandomStacked:
      return "rstacked";
    case SpectrumKind::kOrderedExp:
      return "oexp";
  }
  return "unknown";
}

/// Recipe for a random spectrum: scale a, condition target kappa, dimension,
/// seed. Stacked sets lambda_1 = a*kappa and the rest to a (condition number
/// exactly kappa); RandomStacked draws the rest as a * sorted uniforms;
/// OrderedExp is kappa/2 times sorted unit exponentials.
struct SpectrumSpec {
  SpectrumKind kind = SpectrumKind::kStacked;
  double a = 1.0;
  double kappa = 1.0;
  int d = 1;
  std::uint64_t seed = 0;
};

inline dvec generate_spectrum(const SpectrumSpec& spec) {
  if (spec.d < 1) {
    throw std::invalid_argument("spectrum dimension must be at least 1");
  }
  if (!(spec.a > 0.0) || !(spec.kappa >= 1.0)) {
    throw std::invalid_argument(
        "spectrum requires a > 0 and kappa >= 1");
  }
  Rng rng = make_stream(spec.seed, "spectrum");
  dvec lambda(spec.d);
  switch (spec.kind) {
    case SpectrumKind::kStacked:
      lambda.setConstant(spec.a);
      lambda[0] = spec.a * spec.kappa;
      break;
    case SpectrumKind::kRandomStacked: {
      std::vector<double> tail(spec.d - 1);
      for (double& v : tail) v = spec.a * rng.uniform_open();
      std::sort(tail.begin(), tail.end(), std::greater<double>());
      lambda[0] = spec.a * spec.kappa;
      for (int i = 1; i < spec.d; ++i) lambda[i] = tail[i - 1];
      break;
    }
    case SpectrumKind::kOrderedExp: {
      std::vector<double> draws(spec.d);
      for (double& v : draws) v = rng.exponential();
      std::sort(draws.begin(), draws.end(), std::greater<double>());
      for (int i = 0; i < spec.d; ++i) {
        lambda[i] = spec.kappa * draws[i] / 2.0;
      }
      break;
    }
  }
  return lambda;
}

/// Center distribution shared by all spectrum families: b_1 = 1 and the
/// remaining entries i.i.d. uniform on (0, 0.1).
inline dvec generate_center(int d, std::uint64_t seed) {
  if (d < 1) {
    throw std::invalid_argument("center dimension must be at least 1");
  }
  Rng rng = make_stream(seed, "center");
  dvec b(d);
  b[0] = 1.0;
  for (int i = 1; i < d; ++i) b[i] = 0.1 * rng.uniform_open();
  return b;
}

/// Haar-distributed rotation via QR of a Gaussian matrix with the standard
/// sign fix (diagonal of R forced positive).
inline dmat random_rotation(int d, Rng& rng) {
  dmat gauss(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) gauss(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<dmat> qr(gauss);
  dmat q = qr.householderQ();
  const dmat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

/// Builds a full instance whose diagonal form has the given spectrum and
/// center: A = I, W = Q diag(lambda) Q^T, c = Q b for a seeded rotation Q.
inline BilinearInstance instance_from_diag(const dvec& lambda, const dvec& b,
                                           std::uint64_t seed) {
  if (lambda.size() != b.size()) {
    throw DimensionMismatch("spectrum and center sizes differ");
  }
  const int d = static_cast<int>(lambda.size());
  Rng rng = make_stream(seed, "rotation");
  const dmat q = random_rotation(d, rng);
  dmat w = q * lambda.asDiagonal() * q.transpose();
  w = ((w + w.transpose()) / 2.0).eval();
  return BilinearInstance(dmat::Identity(d, d), Ellipsoid(q * b, w));
}

/// One recorded round of a bandit run: the confidence-ellipsoid parameters
/// the agent solved against at time t.
struct DesignSnapshot {
  int t = 0;
  dvec zeta_hat;
  dmat confidence_shape;
};

/// Extracts the P_B instance (A = I, W = W_t, c = zeta_hat_t) for each
/// requested time from a snapshot list. Throws TimeOutOfRange for times with
/// no recorded snapshot.
inline std::vector<BilinearInstance> instances_from_bandit_run(
    const std::vector<DesignSnapshot>& snapshots,
    const std::vector<int>& times) {
  std::vector<BilinearInstance> out;
  out.reserve(times.size());
  for (int t : times) {
    const auto it =
        std::find_if(snapshots.begin(), snapshots.end(),
                     [t](const DesignSnapshot& s) { return s.t == t; });
    if (it == snapshots.end()) {
      throw TimeOutOfRange("no design snapshot recorded at t = " +
                           std::to_string(t));
    }
    const int d = static_cast<int>(it->zeta_hat.size());
    out.emplace_back(dmat::Identity(d, d),
                     Ellipsoid(it->zeta_hat, it->confidence_shape));
  }
  return out;
}

}  // namespace bimax
