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

#include "gauzecut/stewart.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/Dense>

namespace gauzecut {
namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

Eigen::Matrix3d rx(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}
Eigen::Matrix3d ry(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}
Eigen::Matrix3d rz(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}
Eigen::Matrix3d drx(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << 0, 0, 0, 0, -s, -c, 0, c, -s;
  return m;
}
Eigen::Matrix3d dry(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << -s, 0, c, 0, 0, 0, -c, 0, -s;
  return m;
}
Eigen::Matrix3d drz(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << -s, -c, 0, c, -s, 0, 0, 0, 0;
  return m;
}

Vec3 polar(double radius, double deg) {
  return {radius * std::cos(deg * kDegToRad), radius * std::sin(deg * kDegToRad), 0.0};
}

}  // namespace

void PlatformDims::validate() const {
  for (double v : {l1, l2, z_home, l_ob, l_op}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("platform dims: lengths must be positive");
  }
  for (double a : {theta_b, theta_p}) {
    if (!(a > 0.0 && a < 120.0)) throw ConfigError("platform dims: pair angles must lie in (0, 120) degrees");
  }
  if (!(servo_limit > 0.0)) throw ConfigError("platform dims: servo_limit must be positive");
  if (quantize && !(quantum > 0.0)) throw ConfigError("platform dims: quantum must be positive");
}

PlatformPose PlatformPose::home(const PlatformDims& dims) {
  PlatformPose p;
  p.translation = Vec3(0.0, 0.0, dims.z_home);
  return p;
}

Vec6 PlatformPose::as_vector() const {
  Vec6 v;
  v << translation, rotation;
  return v;
}

PlatformPose PlatformPose::from_vector(const Vec6& v) {
  PlatformPose p;
  p.translation = v.head<3>();
  p.rotation = v.tail<3>();
  return p;
}

PlatformLayout attachment_layout(const PlatformDims& dims) {
  dims.validate();
  PlatformLayout layout;
  for (int k = 0; k < 3; ++k) {
    const double c = 120.0 * k;
    const double minus = c - 0.5 * dims.theta_b;
    const double plus = c + 0.5 * dims.theta_b;
    layout.base[2 * k] = polar(dims.l_ob, minus);
    layout.base[2 * k + 1] = polar(dims.l_ob, plus);
    layout.platform[2 * k] = polar(dims.l_op, c - 60.0 + 0.5 * dims.theta_p);
    layout.platform[2 * k + 1] = polar(dims.l_op, c + 60.0 - 0.5 * dims.theta_p);
    layout.beta[2 * k] = minus - 90.0;
    layout.beta[2 * k + 1] = plus + 90.0;
  }
  if (dims.beta) layout.beta = *dims.beta;
  return layout;
}

Eigen::Matrix3d rotation_matrix(const Vec3& rpy_deg) {
  return rz(rpy_deg.z() * kDegToRad) * ry(rpy_deg.y() * kDegToRad) * rx(rpy_deg.x() * kDegToRad);
}

Vec3 euler_from_matrix(const Eigen::Matrix3d& r) {
  const double pitch = -std::asin(std::clamp(r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return Vec3(roll, pitch, yaw) * kRadToDeg;
}

Vec3 horn_tip(const PlatformLayout& layout, const PlatformDims& dims, int i, double alpha_deg) {
  const double a = alpha_deg * kDegToRad;
  const double b = layout.beta[i] * kDegToRad;
  return layout.base[i] + dims.l1 * Vec3(std::cos(a) * std::cos(b), std::cos(a) * std::sin(b), std::sin(a));
}

std::array<double, 6> leg_residuals(const PlatformPose& pose, const ServoAngles& angles, const PlatformDims& dims) {
  const PlatformLayout layout = attachment_layout(dims);
  const Eigen::Matrix3d r = rotation_matrix(pose.rotation);
  std::array<double, 6> out{};
  for (int i = 0; i < 6; ++i) {
    const Vec3 anchor = r * layout.platform[i] + pose.translation;
    out[i] = (anchor - horn_tip(layout, dims, i, angles[i])).norm() - dims.l2;
  }
  return out;
}

IkResult inverse_kinematics(const PlatformPose& pose, const PlatformDims& dims) {
  if (!pose.as_vector().allFinite()) throw ConfigError("inverse_kinematics: pose must be finite");
  const PlatformLayout layout = attachment_layout(dims);
  const Eigen::Matrix3d r = rotation_matrix(pose.rotation);
  IkResult out;
  for (int i = 0; i < 6; ++i) {
    const Vec3 q = r * layout.platform[i] + pose.translation - layout.base[i];
    const double b = layout.beta[i] * kDegToRad;
    const double e = 2.0 * dims.l1 * q.z();
    const double f = 2.0 * dims.l1 * (std::cos(b) * q.x() + std::sin(b) * q.y());
    const double g = q.squaredNorm() - (dims.l2 * dims.l2 - dims.l1 * dims.l1);
    const double norm = std::hypot(e, f);
    if (!(norm > 0.0) || std::abs(g) > norm) {
      throw UnreachableError("inverse_kinematics: leg " + std::to_string(i) + " cannot reach the pose");
    }
    const double alpha = (std::asin(g / norm) - std::atan2(f, e)) * kRadToDeg;
    if (std::abs(alpha) > dims.servo_limit) {
      throw UnreachableError("inverse_kinematics: servo " + std::to_string(i) + " beyond its limit (" +
                             std::to_string(alpha) + " deg)");
    }
    out.angles[i] = alpha;
  }
  out.residuals = leg_residuals(pose, out.angles, dims);
  for (double res : out.residuals) {
    if (!(std::abs(res) < 1e-9)) throw GeometryError("inverse_kinematics: leg residual check failed");
  }
  if (dims.quantize) {
    for (double& a : out.angles) a = std::round(a / dims.quantum) * dims.quantum;
  }
  out.in_range = range_check(pose, dims);
  return out;
}

FkResult forward_kinematics(const ServoAngles& angles, const PlatformDims& dims,
                            std::optional<PlatformPose> initial_guess, int max_iterations) {
  for (double a : angles) {
    if (!std::isfinite(a)) throw ConfigError("forward_kinematics: angles must be finite");
  }
  const PlatformLayout layout = attachment_layout(dims);
  std::array<Vec3, 6> tips;
  for (int i = 0; i < 6; ++i) tips[i] = horn_tip(layout, dims, i, angles[i]);

  Vec6 x = initial_guess.value_or(PlatformPose::home(dims)).as_vector();
  auto residuals = [&](const Vec6& s, Vec6& res, Mat6* jac) {
    const Vec3 rpy = s.tail<3>() * kDegToRad;
    const Eigen::Matrix3d Rx = rx(rpy.x()), Ry = ry(rpy.y()), Rz = rz(rpy.z());
    const Eigen::Matrix3d r = Rz * Ry * Rx;
    for (int i = 0; i < 6; ++i) {
      const Vec3 leg = r * layout.platform[i] + s.head<3>() - tips[i];
      const double len = leg.norm();
      res[i] = len - dims.l2;
      if (jac) {
        const Vec3 u = leg / len;
        const Vec3& p = layout.platform[i];
        jac->row(i).head<3>() = u.transpose();
        (*jac)(i, 3) = u.dot(Rz * Ry * drx(rpy.x()) * p) * kDegToRad;
        (*jac)(i, 4) = u.dot(Rz * dry(rpy.y()) * Rx * p) * kDegToRad;
        (*jac)(i, 5) = u.dot(drz(rpy.z()) * Ry * Rx * p) * kDegToRad;
      }
    }
  };

  Vec6 res;
  Mat6 jac;
  residuals(x, res, &jac);
  double cost = res.squaredNorm();
  double mu = 1e-6;
  int it = 0;
  for (; it < max_iterations && std::sqrt(cost) >= 1e-12; ++it) {
    const Mat6 jtj = jac.transpose() * jac;
    const Vec6 jtr = jac.transpose() * res;
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      Mat6 a = jtj;
      a.diagonal().array() += mu * (1.0 + jtj.diagonal().array());
      const Vec6 step = a.ldlt().solve(-jtr);
      const Vec6 trial = x + step;
      Vec6 trial_res;
      residuals(trial, trial_res, nullptr);
      const double trial_cost = trial_res.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        x = trial;
        res = trial_res;
        cost = trial_cost;
        mu = std::max(mu * 0.1, 1e-15);
        accepted = true;
      } else {
        mu *= 10.0;
      }
    }
    if (!accepted) break;
    residuals(x, res, &jac);
    cost = res.squaredNorm();
  }
  const double residual = std::sqrt(cost);
  if (!(residual < 1e-8)) {
    throw NonConvergenceError("forward_kinematics: residual " + std::to_string(residual) + " cm after " +
                                  std::to_string(it) + " iterations",
                              residual, x);
  }
  FkResult out;
  out.pose = PlatformPose::from_vector(x);
  out.residual = residual;
  out.iterations = it;
  return out;
}

bool offset_in_range(const PlatformPose& offset) {
  // Inclusive limits; the slack absorbs rounding in pose - home.
  constexpr double slack = 1e-9;
  for (int k = 0; k < 3; ++k) {
    if (!(std::abs(offset.translation[k]) <= kTranslationRangeCm + slack)) return false;
    if (!(std::abs(offset.rotation[k]) <= kRotationRangeDeg + slack)) return false;
  }
  return true;
}

bool range_check(const PlatformPose& pose, const PlatformDims& dims) {
  PlatformPose offset = pose;
  offset.translation.z() -= dims.z_home;
  return offset_in_range(offset);
}

MotionAxis parse_axis(std::string_view name) {
  static constexpr std::array<std::string_view, 6> names = {"x", "y", "z", "roll", "pitch", "yaw"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<MotionAxis>(i);
  }
  throw ConfigError("unknown motion axis '" + std::string(name) + "'");
}

std::string_view axis_name(MotionAxis axis) {
  static constexpr std::array<std::string_view, 6> names = {"x", "y", "z", "roll", "pitch", "yaw"};
  return names[static_cast<std::size_t>(axis)];
}

MotionKind parse_motion_kind(std::string_view name) {
  if (name == "sinusoid") return MotionKind::kSinusoid;
  if (name == "breathing") return MotionKind::kBreathing;
  throw ConfigError("unknown motion mode '" + std::string(name) + "'");
}

double quantize_time(double t) { return std::round(t / kClockQuantumS) * kClockQuantumS; }

void MotionMode::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ConfigError("motion mode: amplitude must be >= 0");
  if (!(frequency > 0.0) || !std::isfinite(frequency)) throw ConfigError("motion mode: frequency must be > 0");
}

double MotionMode::value(double t) const {
  const double tq = quantize_time(t);
  if (kind == MotionKind::kSinusoid) return amplitude * std::sin(2.0 * kPi * frequency * tq);
  const double e = std::exp(1.0);
  const double y = (std::exp(std::sin(frequency * tq)) - 1.0 / e) * 2.0 * amplitude / (e - 1.0 / e);
  return rotational() ? y - amplitude : y;
}

double MotionMode::period() const {
  return kind == MotionKind::kSinusoid ? 1.0 / frequency : 2.0 * kPi / frequency;
}

PlatformPose MotionMode::pose(double t, const PlatformDims& dims) const {
  PlatformPose p = PlatformPose::home(dims);
  const double v = value(t);
  const int k = static_cast<int>(axis);
  if (k < 3) {
    p.translation[k] += v;
  } else {
    p.rotation[k - 3] += v;
  }
  return p;
}

void write_pose_csv_row(std::ostream& out, const PlatformPose& pose) {
  out.precision(17);
  out << pose.translation.x() << ',' << pose.translation.y() << ',' << pose.translation.z() << ','
      << pose.rotation.x() << ',' << pose.rotation.y() << ',' << pose.rotation.z();
}

void write_angles_csv_row(std::ostream& out, const ServoAngles& angles) {
  out.precision(17);
  for (int i = 0; i < 6; ++i) out << (i ? "," : "") << angles[i];
}

}  // namespace gauzecut
