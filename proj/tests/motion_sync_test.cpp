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


#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "gauzecut/motion_sync.hpp"
#include "gauzecut/rng.hpp"

namespace gauzecut {
namespace {

struct Samples {
  std::vector<double> t, y;
};

Samples sample(const Sinusoid& s, double rate, double duration, double noise = 0.0, std::uint64_t seed = 0) {
  Samples out;
  Rng rng(seed);
  for (int k = 0; k * (1.0 / rate) < duration; ++k) {
    const double t = k / rate;
    out.t.push_back(t);
    out.y.push_back(s.value(t) + noise * rng.normal());
  }
  return out;
}

Sinusoid reference_setup() { return Sinusoid{25.0, 0.2, 0.0}; }

TEST(Sinusoid, ValueAndDerivatives) {
  const Sinusoid s{2.0, 0.5, 0.25};
  const double w = 2 * kPi * 0.5;
  EXPECT_NEAR(s.value(0.0), 2.0 * std::sin(w * 0.25), 1e-15);
  EXPECT_NEAR(s.velocity(0.3), 2.0 * w * std::cos(w * 0.55), 1e-12);
  EXPECT_NEAR(s.acceleration(0.3), -2.0 * w * w * std::sin(w * 0.55), 1e-12);
  for (double t : s.extrema(0.0, 10.0)) EXPECT_NEAR(std::abs(s.value(t)), 2.0, 1e-12);
  EXPECT_EQ(s.extrema(0.0, 10.0).size(), 10u);
}

TEST(Fit, NoiselessRoundTrip) {
  const Sinusoid truth{2.5, 0.2, 0.3};
  const Samples d = sample(truth, 15.0, 60.0);
  const SineFit f = fit_sinusoid(d.t, d.y);
  EXPECT_NEAR(f.params.amplitude, 2.5, 1e-6);
  EXPECT_NEAR(f.params.frequency, 0.2, 1e-6);
  EXPECT_NEAR(f.params.phase, 0.3, 1e-6);
  EXPECT_LT(f.rmse, 1e-9);
}

TEST(Fit, NegativeAmplitudeIsReportedAsPhaseShift) {
  const Sinusoid truth{1.0, 0.5, 0.4};
  const Samples d = sample(truth, 20.0, 20.0);
  const SineFit f = fit_sinusoid(d.t, d.y);
  EXPECT_GT(f.params.amplitude, 0.0);
  for (std::size_t i = 0; i < d.t.size(); i += 17) EXPECT_NEAR(f.params.value(d.t[i]), d.y[i], 1e-8);
}

TEST(Fit, ConstantAndInsufficientDataAreRejected) {
  std::vector<double> t;
  for (int k = 0; k < 100; ++k) t.push_back(0.1 * k);
  const std::vector<double> flat(100, 3.0);
  EXPECT_THROW(fit_sinusoid(t, flat), GeometryError);
  const std::vector<double> two{0.0, 1.0};
  EXPECT_THROW(fit_sinusoid(two, two), ConfigError);
  const std::vector<double> mismatched{0.0, 1.0, 2.0};
  EXPECT_THROW(fit_sinusoid(t, mismatched), ConfigError);
}

TEST(Fit, NoisyFrequencyWithinOnePercent) {
  const Sinusoid truth{2.5, 0.2, 0.3};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Samples d = sample(truth, 15.0, 60.0, 0.05 * 2.5, seed);
    const SineFit f = fit_sinusoid(d.t, d.y);
    ASSERT_LT(std::abs(f.params.frequency - 0.2) / 0.2, 0.01) << seed;
  }
}

TEST(Execute, FullSyncWithPerfectEstimateCancels) {
  const Sinusoid truth = reference_setup();
  const TrackingTrace tr = execute({ControllerKind::kFullSync}, {}, truth, truth);
  EXPECT_LT(tr.max_error, 1e-9);
  EXPECT_NEAR(tr.completion_time, 10.0, 1e-9);
}

TEST(Execute, OpenLoopSeesTheFullAmplitude) {
  const Sinusoid truth = reference_setup();
  const TrackingTrace tr = execute({ControllerKind::kOpenLoop}, {}, truth, truth);
  EXPECT_NEAR(tr.max_error, 25.0, 1e-6);
}

TEST(Execute, IntermittentWindowsStayWithinCosineBound) {
  const Sinusoid truth = reference_setup();
  const double bound = 25.0 * (1.0 - std::cos(2 * kPi * 0.2 * 0.125));
  EXPECT_NEAR(bound, 0.308, 1e-3);
  ExecutionSpec spec;
  spec.dt = 1e-4;
  const TrackingTrace tr = execute({ControllerKind::kIntermittent, 0.25}, spec, truth, truth);
  EXPECT_LE(tr.max_error, bound + 1e-9);
  EXPECT_LE(tr.max_error, 0.31 * 1.05);
  EXPECT_GT(tr.max_error, 0.9 * bound);
}

TEST(Execute, IntermittentIsSlowerThanOpenLoop) {
  const Sinusoid truth = reference_setup();
  const TrackingTrace open = execute({ControllerKind::kOpenLoop}, {}, truth, truth);
  const TrackingTrace gated = execute({ControllerKind::kIntermittent}, {}, truth, truth);
  EXPECT_GT(gated.completion_time, open.completion_time);
  // Two windows of 0.25 s per 5 s period: roughly 10x slower.
  EXPECT_GT(gated.completion_time, 5.0 * open.completion_time);
}

TEST(Execute, IntermittentBeatsFullSyncUnderPhaseError) {
  const double sigma = 0.22, window = 0.25;
  int checked = 0;
  for (double a : {5.0, 10.0, 25.0}) {
    for (double w : {0.1, 0.2, 0.3, 0.5}) {
      const double slope_bound = a * 2 * kPi * w * sigma;
      const double cos_bound = a * (1.0 - std::cos(2 * kPi * w * (window / 2 + sigma)));
      if (!(slope_bound > cos_bound)) continue;
      const Sinusoid truth{a, w, 0.0};
      const Sinusoid estimate{a, w, sigma};
      ExecutionSpec spec;
      spec.dt = 2e-4;
      const TrackingTrace full = execute({ControllerKind::kFullSync}, spec, truth, estimate);
      const TrackingTrace gated = execute({ControllerKind::kIntermittent, window}, spec, truth, estimate);
      EXPECT_LT(gated.max_error, full.max_error) << a << ' ' << w;
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Budget, ZeroNoiseGivesZeroError) {
  DisturbanceModel m;
  m.sigma_freq_rel = 0.0;
  m.sigma_phase_s = 0.0;
  m.latency_jitter_s = 0.0;
  const ErrorBudget b = error_budget(m, {ControllerKind::kFullSync}, 10, 1);
  EXPECT_LT(b.rms, 1e-9);
  EXPECT_LT(b.worst_case, 1e-9);
  EXPECT_LT(b.peak, 1e-9);
}

TEST(Budget, UnitSlopeFigures) {
  const ErrorBudget b = error_budget({}, {ControllerKind::kFullSync}, 20, 1);
  EXPECT_NEAR(b.analytic_phase_unit, 1.0, 1e-12);
  EXPECT_NEAR(b.analytic_latency_unit, 0.576 / 0.22, 1e-12);
  EXPECT_GT(b.analytic_latency_unit, 2.5);
  EXPECT_GT(b.analytic_total_unit, 3.0);
  EXPECT_NEAR(b.analytic_phase_physical, 25.0 * 2 * kPi * 0.2 * 0.22, 1e-9);
}

TEST(Budget, EmpiricalWorstCaseMatchesSlopeBound) {
  DisturbanceModel m;
  m.sigma_freq_rel = 0.0;
  m.latency_jitter_s = 0.0;
  const ErrorBudget b = error_budget(m, {ControllerKind::kFullSync}, 400, 7);
  const double analytic = b.analytic_phase_physical;
  EXPECT_NEAR(b.worst_case, analytic, 0.25 * analytic);
}

TEST(Budget, MonotoneInEachNoiseSource) {
  // Common random numbers: the same seed across nested noise levels.
  auto worst = [](double sf, double sp, double lj) {
    DisturbanceModel m;
    m.sigma_freq_rel = sf;
    m.sigma_phase_s = sp;
    m.latency_jitter_s = lj;
    ExecutionSpec spec;
    spec.dt = 5e-3;
    return error_budget(m, {ControllerKind::kFullSync}, 50, 3, spec).worst_case;
  };
  for (int axis = 0; axis < 3; ++axis) {
    double prev = -1.0;
    for (double level : {0.0, 0.5, 1.0, 2.0}) {
      const double sf = axis == 0 ? 0.03 * level : 0.03;
      const double sp = axis == 1 ? 0.22 * level : 0.22;
      const double lj = axis == 2 ? 0.576 * level : 0.576;
      const double w = worst(sf, sp, lj);
      EXPECT_GE(w, prev) << axis << ' ' << level;
      prev = w;
    }
  }
}

TEST(Budget, DeterministicAcrossThreadCounts) {
  ExecutionSpec spec;
  spec.dt = 5e-3;
  const ErrorBudget a = error_budget({}, {ControllerKind::kFullSync}, 30, 11, spec, 1);
  const ErrorBudget b = error_budget({}, {ControllerKind::kFullSync}, 30, 11, spec, 3);
  EXPECT_EQ(a.trial_peak, b.trial_peak);
  std::ostringstream sa, sb;
  write_budget_csv(sa, a, ControllerKind::kFullSync);
  write_budget_csv(sb, b, ControllerKind::kFullSync);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().rfind("trial,controller,rms,worst\n", 0), 0u);
}

TEST(Window, CurvatureExample) {
  const WindowEstimate w = window_width_from_curvature(reference_setup(), 0.5);
  const double expected = 2 * std::sqrt(2 * 0.0005 / (0.025 * std::pow(0.4 * kPi, 2)));
  EXPECT_NEAR(w.seconds, expected, 1e-12);
  EXPECT_NEAR(w.seconds, 0.32, 0.005);
  EXPECT_TRUE(w.bounded);
}

TEST(Window, LimitsAndScaling) {
  EXPECT_NEAR(window_width_from_curvature(reference_setup(), 1e-12).seconds, 0.0, 1e-6);
  const double base = window_width_from_curvature(reference_setup(), 0.5).seconds;
  const double doubled = window_width_from_curvature(Sinusoid{25.0, 0.4, 0.0}, 0.5).seconds;
  EXPECT_NEAR(doubled, base / 2, 1e-12);
  EXPECT_FALSE(window_width_from_curvature(Sinusoid{0.0, 0.2, 0.0}, 0.5).bounded);
  EXPECT_THROW(window_width_from_curvature(reference_setup(), 0.0), ConfigError);
}

TEST(Controllers, NamesRoundTrip) {
  for (ControllerKind k : {ControllerKind::kOpenLoop, ControllerKind::kFullSync, ControllerKind::kIntermittent}) {
    EXPECT_EQ(parse_controller(controller_name(k)), k);
  }
  EXPECT_THROW(parse_controller("bang_bang"), ConfigError);
  Controller c{ControllerKind::kIntermittent, 0.0};
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace gauzecut
