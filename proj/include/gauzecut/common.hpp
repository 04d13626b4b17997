// Copyright 2026 The Gauzecut Authors
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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gauzecut {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

using VertexId = std::uint32_t;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid arguments or configuration (bad dimensions, bad hyperparameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A request that is well formed but cannot be realized (unreachable pose,
/// non-convergent solve, degenerate geometry).
class GeometryError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

/// Side length of the standard 4x4 inch FLS gauze square, in millimetres.
inline constexpr double kGauzeSideMm = 101.6;

}  // namespace gauzecut
