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

#include "gauzecut/camera.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace gauzecut {
namespace {

std::vector<double> parse_numbers(const std::string& line) {
  std::string s = line;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) return {};
  return out;
}

}  // namespace

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
  RigidTransform r;
  r.rotation = rotation * other.rotation;
  r.translation = rotation * other.translation + translation;
  return r;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform r;
  r.rotation = rotation.transpose();
  r.translation = -(r.rotation * translation);
  return r;
}

Eigen::Vector2d project(const CameraMatrix& c, const Vec3& x) {
  const Eigen::Vector3d y = c * x.homogeneous();
  const double scale = c.row(2).norm() * std::max(1.0, x.norm());
  if (std::abs(y.z()) <= 1e-12 * scale) throw GeometryError("project: point lies on the principal plane");
  return y.head<2>() / y.z();
}

RigidTransform fit_rigid(std::span<const Vec3> from, std::span<const Vec3> to) {
  if (from.size() != to.size()) throw ConfigError("fit_rigid: point counts differ");
  if (from.size() < 4) throw GeometryError("fit_rigid: need at least 4 non-coplanar points");
  Vec3 cf = Vec3::Zero(), ct = Vec3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    cf += from[i];
    ct += to[i];
  }
  cf /= static_cast<double>(from.size());
  ct /= static_cast<double>(to.size());

  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    const Vec3 a = from[i] - cf;
    scatter += a * a.transpose();
    h += a * (to[i] - ct).transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);
  const Vec3 ev = eig.eigenvalues();
  if (!(ev(0) > 1e-10 * std::max(ev(2), 1e-300))) {
    throw GeometryError("fit_rigid: sample cloud is rank deficient (coplanar or collinear)");
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d u = svd.matrixU(), v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  RigidTransform out;
  out.rotation = v * d * u.transpose();
  // Re-orthonormalize so R^T R = I holds to rounding.
  Eigen::JacobiSVD<Eigen::Matrix3d> polish(out.rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.rotation = polish.matrixU() * polish.matrixV().transpose();
  out.translation = ct - out.rotation * cf;
  return out;
}

RigidMapResult rigid_inverse_map(const CameraMatrix& c, const Eigen::Matrix3d& t, std::span<const Vec3> samples) {
  Eigen::FullPivLU<CameraMatrix> lu(c);
  lu.setThreshold(1e-12);
  if (lu.rank() != 3) throw GeometryError("rigid_inverse_map: camera matrix must have rank 3");

  const Eigen::Matrix4d ctc = c.transpose() * c;
  const Eigen::Matrix4d pinv = ctc.completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::Matrix4d observed = pinv * ctc;
  const Eigen::Matrix4d m = pinv * c.transpose() * t * c + (Eigen::Matrix4d::Identity() - observed);

  RigidMapResult out;
  out.mapped.reserve(samples.size());
  for (const Vec3& x : samples) {
    const Eigen::Vector4d y = m * x.homogeneous();
    if (std::abs(y.w()) <= 1e-12) throw GeometryError("rigid_inverse_map: mapped point at infinity");
    out.mapped.push_back(y.head<3>() / y.w());
  }
  out.transform = fit_rigid(samples, out.mapped);
  out.residuals.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.residuals.push_back((out.transform.apply(samples[i]) - out.mapped[i]).norm());
  }
  return out;
}

PoseCommand pose_for_camera_motion(const RigidTransform& f) {
  PoseCommand cmd;
  cmd.offset.translation = f.translation / 10.0;
  cmd.offset.rotation = euler_from_matrix(f.rotation);
  cmd.in_range = offset_in_range(cmd.offset);
  cmd.clamped = cmd.offset;
  for (int k = 0; k < 3; ++k) {
    cmd.clamped.translation[k] = std::clamp(cmd.clamped.translation[k], -kTranslationRangeCm, kTranslationRangeCm);
    cmd.clamped.rotation[k] = std::clamp(cmd.clamped.rotation[k], -kRotationRangeDeg, kRotationRangeDeg);
  }
  return cmd;
}

void write_rigid_row(std::ostream& out, const RigidTransform& f) {
  out.precision(17);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out << f.rotation(r, c) << ',';
  }
  out << f.translation.x() << ',' << f.translation.y() << ',' << f.translation.z();
}

CameraMatrix read_camera_csv(std::istream& in) {
  CameraMatrix c;
  int row = 0;
  std::string line;
  while (row < 3 && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const std::vector<double> v = parse_numbers(line);
    if (v.size() != 4) throw ConfigError("camera CSV: each row needs 4 numbers");
    for (int k = 0; k < 4; ++k) c(row, k) = v[k];
    ++row;
  }
  if (row != 3) throw ConfigError("camera CSV: expected 3 rows");
  return c;
}

std::vector<Vec3> read_points_csv(std::istream& in) {
  std::vector<Vec3> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const std::vector<double> v = parse_numbers(line);
    if (v.size() != 3) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw ConfigError("points CSV: each row needs 3 numbers");
    }
    first = false;
    out.emplace_back(v[0], v[1], v[2]);
  }
  return out;
}

}  // namespace gauzecut
