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

// Periodic disturbance estimation and cutting controllers under platform
// motion. Positions are millimetres in the gauze frame, times seconds. The
// tracking error is the gauze-frame offset between where the scissors act
// and where the commanded path lies on the moving gauze.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gauzecut/common.hpp"

namespace gauzecut {

/// d(t) = A sin(2 pi w (t + phi)).
struct Sinusoid {
  double amplitude = 0.0;
  double frequency = 1.0;  // Hz
  double phase = 0.0;      // s

  double value(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
  /// Extremum times (velocity zeros) in [t0, t1], ascending.
  std::vector<double> extrema(double t0, double t1) const;
};

struct SineFit {
  Sinusoid params;
  double rmse = 0.0;
  int iterations = 0;
};

/// Coarse frequency scan followed by Levenberg-Marquardt refinement. The
/// phase is reported in [0, 1/w). Throws ConfigError for mismatched or
/// insufficient data (fewer than 2 periods or 8 samples per period at the
/// fitted frequency), GeometryError for constant data or non-convergence.
SineFit fit_sinusoid(std::span<const double> t, std::span<const double> y);

enum class ControllerKind { kOpenLoop, kFullSync, kIntermittent };

inline constexpr double kDefaultWindowS = 0.25;

struct Controller {
  ControllerKind kind = ControllerKind::kFullSync;
  double window_s = kDefaultWindowS;  // intermittent only

  void validate() const;
};

ControllerKind parse_controller(std::string_view name);
std::string_view controller_name(ControllerKind kind);

struct ExecutionSpec {
  double path_duration_s = 10.0;  // commanded path time at full speed
  double dt = 1e-3;
  double latency_s = 0.0;
  double start_time_s = 0.0;
};

struct TrackingTrace {
  std::vector<double> time;
  std::vector<double> error;     // signed, mm
  std::vector<double> progress;  // commanded path time completed, s
  std::vector<std::uint8_t> cutting;
  double completion_time = 0.0;
  double max_error = 0.0;  // over cutting samples
  double rms_error = 0.0;  // over cutting samples
};

/// OpenLoop ignores the disturbance (error -d(t)). FullSync adds the
/// estimated disturbance, applied latency_s late (error d^(t - lat) - d(t)).
/// Intermittent advances the path only inside windows centred on the
/// estimated extrema, offset by the latency, holding the compensation
/// d^(t_k) of that extremum (error d^(t_k) - d(t)); samples outside windows
/// hold position and do not count toward the error.
TrackingTrace execute(const Controller& controller, const ExecutionSpec& spec, const Sinusoid& truth,
                      const Sinusoid& estimate);

struct DisturbanceModel {
  Sinusoid truth{25.0, 0.2, 0.0};
  double sigma_freq_rel = 0.03;
  double sigma_phase_s = 0.22;
  double latency_mean_s = 0.0;
  double latency_jitter_s = 0.576;

  void validate() const;
};

struct ErrorBudget {
  double rms = 0.0;         // over every sample of every trial
  double worst_case = 0.0;  // RMS across trials of each trial's peak error
  double peak = 0.0;        // largest error seen in any trial
  /// slope * sigma_phase, at the unit slope (1 mm per 0.22 s) and at the
  /// physical slope A 2 pi w.
  double analytic_phase_unit = 0.0;
  double analytic_phase_physical = 0.0;
  /// slope * latency jitter.
  double analytic_latency_unit = 0.0;
  double analytic_latency_physical = 0.0;
  /// slope * (sigma_phase + latency jitter): the worst-time error with both.
  double analytic_total_unit = 0.0;
  double analytic_total_physical = 0.0;
  std::vector<double> trial_rms;
  std::vector<double> trial_peak;
};

/// Unit slope of the normalized worst-time analysis, mm/s.
inline constexpr double kUnitSlopeMmPerS = 1.0 / 0.22;

/// Monte-Carlo: each trial draws w^ = w (1 + s_w N), phi^ = phi + s_phi N and
/// a latency mean + U[0, jitter], then executes `controller`. Trials run on
/// `threads` workers with per-trial seeds derived from `seed`.
ErrorBudget error_budget(const DisturbanceModel& model, const Controller& controller, int trials,
                         std::uint64_t seed, const ExecutionSpec& spec = {}, unsigned threads = 1);

/// CSV: trial,controller,rms,worst.
void write_budget_csv(std::ostream& out, const ErrorBudget& budget, ControllerKind kind);

struct WindowEstimate {
  double seconds = 0.0;
  bool bounded = true;  // false when the curvature vanishes
};

/// 2 sqrt(2 tol / |C''(t_opt)|) with C'' = A (2 pi w)^2.
WindowEstimate window_width_from_curvature(const Sinusoid& estimate, double tolerance_mm);

}  // namespace gauzecut
