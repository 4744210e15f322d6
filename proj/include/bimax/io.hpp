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
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "json.hpp"

#include "bimax/common.hpp"
#include "bimax/generators.hpp"
#include "bimax/instance.hpp"
#include "bimax/special_cases.hpp"

namespace bimax {

/// Machine-readable input/output: JSON instance and solution formats, and
/// the CSV primitives shared by the benchmark and bandit commands. All
/// floating-point output uses round-trip-safe precision.

using ordered_json = nlohmann::ordered_json;

/// 17-significant-digit rendering (round-trip safe for IEEE doubles).
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Fixed-point seconds with nanosecond resolution.
inline std::string format_time(double seconds) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", seconds);
  return buf;
}

// ---------------------------------------------------------------------------
// JSON conversions
// ---------------------------------------------------------------------------

inline dvec json_to_vector(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array()) {
    throw std::invalid_argument("field '" + key + "' must be an array");
  }
  dvec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw std::invalid_argument("field '" + key +
                                  "' must contain only numbers");
    }
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

inline dmat json_to_matrix(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("field '" + key +
                                "' must be a nonempty array of rows");
  }
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  dmat m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw std::invalid_argument("field '" + key +
                                  "' must be rectangular");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw std::invalid_argument("field '" + key +
                                    "' must contain only numbers");
      }
      m(static_cast<int>(r), static_cast<int>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

inline ordered_json vector_to_json(const dvec& v) {
  ordered_json j = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

inline ordered_json matrix_to_json(const dmat& m) {
  ordered_json j = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(std::move(row));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Problem files
// ---------------------------------------------------------------------------

/// The four accepted instance layouts, detected by their keys:
///  - full:      { "A": [[..]], "W": [[..]], "c": [..] }
///  - prediag:   { "lambda": [..], "b": [..] }          (extra keys ignored)
///  - polytope:  { "vertices": [[..]], "c": [..], "W": [[..]] }
///  - lp:        { "p": num, "c": [..], "lambda": [..] }
enum class ProblemKind { kFull, kPrediag, kPolytope, kLp };

struct LoadedProblem {
  ProblemKind kind = ProblemKind::kFull;
  std::optional<BilinearInstance> instance;
  std::optional<DiagonalForm> form;
  std::optional<VertexPolytope> polytope;
  std::optional<Ellipsoid> confidence;
  std::optional<LpAlignedInstance> lp;
};

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j,
                                         const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw std::invalid_argument("instance JSON is missing field '" + key +
                                "'");
  }
  return *it;
}

}  // namespace detail

inline LoadedProblem parse_problem(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("instance JSON must be an object");
  }
  LoadedProblem out;
  if (j.contains("vertices")) {
    out.kind = ProblemKind::kPolytope;
    const nlohmann::json& verts = detail::require_key(j, "vertices");
    if (!verts.is_array() || verts.empty()) {
      throw std::invalid_argument("'vertices' must be a nonempty array");
    }
    std::vector<dvec> vertices;
    vertices.reserve(verts.size());
    for (const auto& v : verts) vertices.push_back(json_to_vector(v, "vertices"));
    out.polytope.emplace(std::move(vertices));
    out.confidence.emplace(json_to_vector(detail::require_key(j, "c"), "c"),
                           json_to_matrix(detail::require_key(j, "W"), "W"));
  } else if (j.contains("A")) {
    out.kind = ProblemKind::kFull;
    out.instance.emplace(
        json_to_matrix(detail::require_key(j, "A"), "A"),
        Ellipsoid(json_to_vector(detail::require_key(j, "c"), "c"),
                  json_to_matrix(detail::require_key(j, "W"), "W")));
  } else if (j.contains("p")) {
    out.kind = ProblemKind::kLp;
    const nlohmann::json& p = detail::require_key(j, "p");
    if (!p.is_number()) {
      throw std::invalid_argument("field 'p' must be a number");
    }
    LpAlignedInstance inst;
    inst.p = p.get<double>();
    inst.c = json_to_vector(detail::require_key(j, "c"), "c");
    inst.lambda = json_to_vector(detail::require_key(j, "lambda"), "lambda");
    out.lp = std::move(inst);
  } else if (j.contains("lambda") && j.contains("b")) {
    out.kind = ProblemKind::kPrediag;
    out.form = make_diagonal_form(
        json_to_vector(detail::require_key(j, "lambda"), "lambda"),
        json_to_vector(detail::require_key(j, "b"), "b"));
  } else {
    throw std::invalid_argument(
        "unrecognized instance layout: expected one of the key sets "
        "{A, W, c}, {lambda, b}, {vertices, c, W}, {p, c, lambda}");
  }
  return out;
}

inline LoadedProblem read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open instance file: " + path);
  }
  nlohmann::json j;
  in >> j;  // throws nlohmann::json::parse_error on malformed input
  return parse_problem(j);
}

// ---------------------------------------------------------------------------
// Solution output
// ---------------------------------------------------------------------------

/// Solution as JSON. Timing fields are omitted when include_times is false
/// (reproducible-output mode); transform_seconds additionally requires
/// include_transform.
inline ordered_json solution_to_json(const Solution& sol, bool include_times,
                                     bool include_transform) {
  ordered_json j;
  j["solver"] = sol.solver;
  if (!sol.routed.empty()) j["routed"] = sol.routed;
  j["value"] = sol.value;
  j["x"] = vector_to_json(sol.x);
  j["theta"] = vector_to_json(sol.theta);
  if (sol.multiplier.has_value()) {
    j["mu"] = *sol.multiplier;
  } else {
    j["mu"] = nullptr;
  }
  j["iterations"] = sol.iterations;
  if (!sol.phases.empty()) {
    ordered_json phases = ordered_json::array();
    for (const NewtonPhase& p : sol.phases) {
      phases.push_back({{"t", p.t},
                        {"damped_steps", p.damped_steps},
                        {"quadratic_steps", p.quadratic_steps},
                        {"lambda_final", p.lambda_final}});
    }
    j["phases"] = std::move(phases);
    j["safeguard_hits"] = sol.safeguard_hits;
    j["decrease_violations"] = sol.decrease_violations;
    j["contraction_violations"] = sol.contraction_violations;
    j["t0_variant"] = sol.t0_variant;
  }
  if (include_times) {
    j["wall_time_seconds"] = sol.wall_time_seconds;
    if (include_transform) j["transform_seconds"] = sol.transform_seconds;
  }
  return j;
}

// ---------------------------------------------------------------------------
// CSV primitives
// ---------------------------------------------------------------------------

/// Every CSV starts with a metadata comment naming the library version and
/// the full parameter set of the run that produced it.
inline void write_csv_metadata(std::ostream& out, const std::string& params) {
  out << "# bimax " << kVersion << ' ' << params << '\n';
}

inline void write_csv_row(std::ostream& out,
                          const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out << ',';
    out << cells[i];
  }
  out << '\n';
}

/// Eigenvalue and |b|-entry histograms of recorded bandit design snapshots
/// (b is the center expressed in the eigenbasis of the confidence shape).
/// Rows: snapshot time, kind in {eigenvalue, abs_b}, value.
inline void write_design_histograms(
    std::ostream& out, const std::vector<DesignSnapshot>& snapshots,
    const std::string& params) {
  write_csv_metadata(out, params);
  write_csv_row(out, {"t", "kind", "value"});
  for (const DesignSnapshot& snap : snapshots) {
    const Eigen::SelfAdjointEigenSolver<dmat> eig(snap.confidence_shape);
    const dvec values = eig.eigenvalues();
    const dvec b = eig.eigenvectors().transpose() * snap.zeta_hat;
    for (int i = 0; i < values.size(); ++i) {
      write_csv_row(out, {std::to_string(snap.t), "eigenvalue",
                          format_double(values[i])});
    }
    for (int i = 0; i < b.size(); ++i) {
      write_csv_row(out, {std::to_string(snap.t), "abs_b",
                          format_double(std::abs(b[i]))});
    }
  }
}

}  // namespace bimax
