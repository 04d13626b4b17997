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

// Rotary-servo Stewart platform: attachment layout, closed-form inverse
// kinematics, Levenberg-Marquardt forward kinematics and motion profiles.
//
// Lengths are centimetres, angles degrees. Servo i turns a horn of length L1
// in the vertical plane with azimuth beta_i about base point B_i; a rod of
// length L2 joins the horn tip to platform anchor P_i. Base pairs are centred
// at 0, 120 and 240 degrees; the platform pairs are yawed by 60 degrees so
// each pair straddles two base pairs.

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gauzecut/common.hpp"

namespace gauzecut {

class UnreachableError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

struct PlatformPose;

class NonConvergenceError : public GeometryError {
 public:
  NonConvergenceError(const std::string& what, double residual, const Eigen::Matrix<double, 6, 1>& state)
      : GeometryError(what), residual_(residual), state_(state) {}
  double residual() const { return residual_; }
  /// Final iterate: x, y, z (cm), roll, pitch, yaw (deg).
  const Eigen::Matrix<double, 6, 1>& state() const { return state_; }

 private:
  double residual_;
  Eigen::Matrix<double, 6, 1> state_;
};

inline constexpr double kTranslationRangeCm = 1.27;
inline constexpr double kRotationRangeDeg = 15.0;

struct PlatformDims {
  double l1 = 2.0;       // servo horn
  double l2 = 6.0;       // rod
  double z_home = 5.1;   // platform above the servo axes at home
  double l_ob = 8.1;     // base attachment radius
  double l_op = 8.1;     // platform attachment radius
  double theta_b = 31.0;
  double theta_p = 23.5;
  /// Overrides the tangent horn azimuths when set.
  std::optional<std::array<double, 6>> beta;
  double servo_limit = 90.0;
  /// Round angles to the servo resolution (0.29 deg) after solving.
  bool quantize = false;
  double quantum = 0.29;

  void validate() const;
};

struct PlatformPose {
  Vec3 translation = Vec3::Zero();  // cm
  Vec3 rotation = Vec3::Zero();     // roll, pitch, yaw (deg)

  static PlatformPose home(const PlatformDims& dims = {});
  Eigen::Matrix<double, 6, 1> as_vector() const;
  static PlatformPose from_vector(const Eigen::Matrix<double, 6, 1>& v);
};

using ServoAngles = std::array<double, 6>;

struct PlatformLayout {
  std::array<Vec3, 6> base;
  std::array<Vec3, 6> platform;  // platform frame, z = 0
  std::array<double, 6> beta;    // degrees
};

PlatformLayout attachment_layout(const PlatformDims& dims);

/// R = Rz(yaw) * Ry(pitch) * Rx(roll), angles in degrees.
Eigen::Matrix3d rotation_matrix(const Vec3& rpy_deg);
/// Inverse of rotation_matrix with pitch in [-90, 90].
Vec3 euler_from_matrix(const Eigen::Matrix3d& r);

struct IkResult {
  ServoAngles angles{};
  std::array<double, 6> residuals{};  // |tip - anchor| - L2, cm
  bool in_range = false;              // pose within the soft range
};

/// Throws UnreachableError when some leg cannot close or a servo would pass
/// its limit.
IkResult inverse_kinematics(const PlatformPose& pose, const PlatformDims& dims = {});

/// Horn tip of servo i at angle alpha (deg).
Vec3 horn_tip(const PlatformLayout& layout, const PlatformDims& dims, int i, double alpha_deg);

/// |tip_i - anchor_i| - L2 for every leg.
std::array<double, 6> leg_residuals(const PlatformPose& pose, const ServoAngles& angles,
                                    const PlatformDims& dims = {});

struct FkResult {
  PlatformPose pose;
  double residual = 0.0;  // Euclidean norm over the six legs, cm
  int iterations = 0;
};

/// Throws NonConvergenceError (carrying the final residual and iterate) when
/// the residual norm is not below 1e-8 cm after max_iterations.
FkResult forward_kinematics(const ServoAngles& angles, const PlatformDims& dims = {},
                            std::optional<PlatformPose> initial_guess = std::nullopt,
                            int max_iterations = 100);

/// Soft range test on the pose measured from home.
bool range_check(const PlatformPose& pose, const PlatformDims& dims = {});
/// Soft range test on an offset from home.
bool offset_in_range(const PlatformPose& offset);

enum class MotionAxis { kX, kY, kZ, kRoll, kPitch, kYaw };
enum class MotionKind { kSinusoid, kBreathing };

MotionAxis parse_axis(std::string_view name);
MotionKind parse_motion_kind(std::string_view name);
std::string_view axis_name(MotionAxis axis);

inline constexpr double kClockQuantumS = 5e-6;

struct MotionMode {
  MotionAxis axis = MotionAxis::kZ;
  MotionKind kind = MotionKind::kSinusoid;
  double amplitude = 0.0;  // cm or deg
  double frequency = 1.0;  // Hz

  void validate() const;
  bool rotational() const { return axis >= MotionAxis::kRoll; }
  /// Offset along the axis at time t, with t quantized to the 5 us clock.
  /// Sinusoid: A sin(2 pi w t). Breathing: (exp(sin(w t)) - 1/e) 2A / (e - 1/e),
  /// minus A on rotational axes.
  double value(double t) const;
  PlatformPose pose(double t, const PlatformDims& dims = {}) const;
  /// Duration of one cycle in seconds.
  double period() const;
};

double quantize_time(double t);

/// CSV helpers: x,y,z,roll,pitch,yaw and a0..a5.
void write_pose_csv_row(std::ostream& out, const PlatformPose& pose);
void write_angles_csv_row(std::ostream& out, const ServoAngles& angles);

}  // namespace gauzecut
