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

// Movable-camera support: map a desired image-space rigid motion back to a
// rigid world motion the platform can execute. World units are millimetres.

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gauzecut/common.hpp"
#include "gauzecut/stewart.hpp"

namespace gauzecut {

using CameraMatrix = Eigen::Matrix<double, 3, 4>;

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
  /// (this o other)(x) = this(other(x)).
  RigidTransform compose(const RigidTransform& other) const;
  RigidTransform inverse() const;
};

/// Homogeneous projection with perspective divide; throws GeometryError when
/// the point lies on the principal plane.
Eigen::Vector2d project(const CameraMatrix& c, const Vec3& x);

/// Best rigid fit (Kabsch) of x_k -> y_k. Throws GeometryError when fewer
/// than 4 points are given or the source cloud is coplanar.
RigidTransform fit_rigid(std::span<const Vec3> from, std::span<const Vec3> to);

struct RigidMapResult {
  RigidTransform transform;
  std::vector<Vec3> mapped;        // x'_k before the rigid fit
  std::vector<double> residuals;   // |f(x_k) - x'_k|
};

/// x'_k = (C^T C)^+ C^T T C x_k + (I - (C^T C)^+ C^T C) x_k in homogeneous
/// coordinates; the second term carries the component the camera cannot
/// observe, so T = I maps every point to itself. Then fits the nearest
/// rigid transform. Throws GeometryError for rank(C) != 3, a degenerate
/// sample cloud, or a mapped point at infinity.
RigidMapResult rigid_inverse_map(const CameraMatrix& c, const Eigen::Matrix3d& t, std::span<const Vec3> samples);

struct PoseCommand {
  PlatformPose offset;   // from home: cm and degrees
  PlatformPose clamped;  // offset limited to the soft range
  bool in_range = true;
};

/// Translation converted mm -> cm, rotation to roll/pitch/yaw degrees.
PoseCommand pose_for_camera_motion(const RigidTransform& f);

/// 12 numbers: R row-major then t.
void write_rigid_row(std::ostream& out, const RigidTransform& f);

/// Reads a 3x4 camera matrix as 3 comma separated rows.
CameraMatrix read_camera_csv(std::istream& in);
/// Reads "x,y,z" rows (optional header).
std::vector<Vec3> read_points_csv(std::istream& in);

}  // namespace gauzecut
