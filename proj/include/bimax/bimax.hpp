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

/// Umbrella header for the bimax library: solvers for the bilinear
/// maximization problem over an ellipsoidal action set and a confidence
/// ellipsoid, plus the supporting generators, oracles, bandit harness and
/// serialization.

#include "bimax/bandit.hpp"
#include "bimax/common.hpp"
#include "bimax/generators.hpp"
#include "bimax/instance.hpp"
#include "bimax/io.hpp"
#include "bimax/maxnorm.hpp"
#include "bimax/newton.hpp"
#include "bimax/oracle.hpp"
#include "bimax/solve.hpp"
#include "bimax/special_cases.hpp"
#include "bimax/rng.hpp"
