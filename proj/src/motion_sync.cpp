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

#include "gauzecut/motion_sync.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "gauzecut/parallel.hpp"
#include "gauzecut/rng.hpp"

namespace gauzecut {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

struct LinearFit {
  double a = 0.0, b = 0.0, sse = std::numeric_limits<double>::infinity();
};

// Least-squares a sin(2 pi f t) + b cos(2 pi f t) at fixed f.
LinearFit fit_at(std::span<const double> t, std::span<const double> y, double f) {
  double ss = 0, sc = 0, cc = 0, ys = 0, yc = 0, yy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double s = std::sin(kTwoPi * f * t[i]);
    const double c = std::cos(kTwoPi * f * t[i]);
    ss += s * s;
    sc += s * c;
    cc += c * c;
    ys += y[i] * s;
    yc += y[i] * c;
    yy += y[i] * y[i];
  }
  const double det = ss * cc - sc * sc;
  LinearFit fit;
  if (std::abs(det) < 1e-12 * std::max(1.0, ss * cc)) return fit;
  fit.a = (ys * cc - yc * sc) / det;
  fit.b = (yc * ss - ys * sc) / det;
  fit.sse = std::max(0.0, yy - fit.a * ys - fit.b * yc);
  return fit;
}

double sse_of(std::span<const double> t, std::span<const double> y, const Eigen::Vector3d& p) {
  double sse = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double w = kTwoPi * p[2] * t[i];
    const double r = p[0] * std::sin(w) + p[1] * std::cos(w) - y[i];
    sse += r * r;
  }
  return sse;
}

}  // namespace

double Sinusoid::value(double t) const { return amplitude * std::sin(kTwoPi * frequency * (t + phase)); }

double Sinusoid::velocity(double t) const {
  return amplitude * kTwoPi * frequency * std::cos(kTwoPi * frequency * (t + phase));
}

double Sinusoid::acceleration(double t) const {
  const double w = kTwoPi * frequency;
  return -amplitude * w * w * std::sin(w * (t + phase));
}

std::vector<double> Sinusoid::extrema(double t0, double t1) const {
  std::vector<double> out;
  if (!(frequency > 0.0)) return out;
  // Extrema where 2 pi f (t + phi) = pi/2 + k pi.
  const double k0 = std::ceil(2.0 * ((t0 + phase) * frequency - 0.25) - 1e-12);
  for (double k = k0;; k += 1.0) {
    const double tk = (0.25 + 0.5 * k) / frequency - phase;
    if (tk > t1 + 1e-12) break;
    if (tk >= t0 - 1e-12) out.push_back(tk);
  }
  return out;
}

SineFit fit_sinusoid(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw ConfigError("fit_sinusoid: time and value counts differ");
  if (t.size() < 16) throw ConfigError("fit_sinusoid: insufficient data (need at least 16 samples)");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(y[i])) throw ConfigError("fit_sinusoid: non-finite sample");
    if (i > 0 && !(t[i] > t[i - 1])) throw ConfigError("fit_sinusoid: times must be strictly increasing");
  }
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= n;
  if (std::sqrt(var) <= 1e-12 * std::max(1.0, std::abs(mean))) {
    throw GeometryError("fit_sinusoid: constant data, amplitude is unidentifiable");
  }

  const double span_t = t.back() - t.front();
  std::vector<double> gaps(t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) gaps[i] = t[i + 1] - t[i];
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  const double fs = 1.0 / gaps[gaps.size() / 2];

  // Scan between one cycle over the record and Nyquist.
  const double f_lo = 1.0 / span_t;
  const double f_hi = 0.5 * fs;
  const double df = 1.0 / (8.0 * span_t);
  double best_f = f_lo;
  LinearFit best;
  for (double f = f_lo; f <= f_hi; f += df) {
    const LinearFit fit = fit_at(t, y, f);
    if (fit.sse < best.sse) {
      best = fit;
      best_f = f;
    }
  }
  if (!std::isfinite(best.sse)) throw GeometryError("fit_sinusoid: frequency scan failed");

  Eigen::Vector3d p(best.a, best.b, best_f);
  double cost = sse_of(t, y, p);
  double mu = 1e-3;
  int it = 0;
  for (; it < 200; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double w = kTwoPi * p[2] * t[i];
      const double s = std::sin(w), c = std::cos(w);
      const Eigen::Vector3d g(s, c, kTwoPi * t[i] * (p[0] * c - p[1] * s));
      const double r = p[0] * s + p[1] * c - y[i];
      jtj += g * g.transpose();
      jtr += g * r;
    }
    bool accepted = false;
    Eigen::Vector3d step = Eigen::Vector3d::Zero();
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      Eigen::Matrix3d a = jtj;
      a.diagonal() += mu * jtj.diagonal().cwiseMax(1e-300);
      step = a.ldlt().solve(-jtr);
      const double trial = sse_of(t, y, p + step);
      if (std::isfinite(trial) && trial <= cost) {
        p += step;
        cost = trial;
        mu = std::max(mu * 0.1, 1e-16);
        accepted = true;
      } else {
        mu *= 10.0;
      }
    }
    if (!accepted) break;
    if (step.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + p.cwiseAbs().maxCoeff())) break;
  }
  if (!std::isfinite(cost) || !(p[2] > 0.0)) throw GeometryError("fit_sinusoid: refinement did not converge");

  SineFit out;
  out.params.frequency = p[2];
  out.params.amplitude = std::hypot(p[0], p[1]);
  const double period = 1.0 / p[2];
  double phase = std::atan2(p[1], p[0]) / (kTwoPi * p[2]);
  phase = std::fmod(phase, period);
  if (phase < 0.0) phase += period;
  if (phase >= period) phase -= period;
  out.params.phase = phase;
  out.rmse = std::sqrt(cost / n);
  out.iterations = it;

  if (span_t * p[2] < 2.0) throw ConfigError("fit_sinusoid: insufficient data (fewer than 2 periods)");
  if (fs / p[2] < 8.0) throw ConfigError("fit_sinusoid: insufficient data (fewer than 8 samples per period)");
  return out;
}

void Controller::validate() const {
  if (kind == ControllerKind::kIntermittent && !(window_s > 0.0)) {
    throw ConfigError("controller: window must be > 0");
  }
}

ControllerKind parse_controller(std::string_view name) {
  if (name == "open_loop") return ControllerKind::kOpenLoop;
  if (name == "full_sync") return ControllerKind::kFullSync;
  if (name == "intermittent") return ControllerKind::kIntermittent;
  throw ConfigError("unknown controller '" + std::string(name) + "'");
}

std::string_view controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kOpenLoop: return "open_loop";
    case ControllerKind::kFullSync: return "full_sync";
    case ControllerKind::kIntermittent: return "intermittent";
  }
  return "full_sync";
}

TrackingTrace execute(const Controller& controller, const ExecutionSpec& spec, const Sinusoid& truth,
                      const Sinusoid& estimate) {
  controller.validate();
  if (!(spec.dt > 0.0) || !(spec.path_duration_s > 0.0)) throw ConfigError("execute: dt and path duration must be > 0");
  if (!(estimate.frequency > 0.0) || !(truth.frequency > 0.0)) throw ConfigError("execute: frequencies must be > 0");
  TrackingTrace trace;
  const auto path_steps = static_cast<long long>(std::llround(spec.path_duration_s / spec.dt));
  double sumsq = 0.0;
  long long counted = 0;
  auto record = [&](double t, double err, double progress, bool cutting) {
    trace.time.push_back(t);
    trace.error.push_back(err);
    trace.progress.push_back(progress);
    trace.cutting.push_back(cutting ? 1 : 0);
    if (cutting) {
      sumsq += err * err;
      ++counted;
      trace.max_error = std::max(trace.max_error, std::abs(err));
    }
  };

  if (controller.kind != ControllerKind::kIntermittent) {
    for (long long k = 0; k <= path_steps; ++k) {
      const double t = spec.start_time_s + static_cast<double>(k) * spec.dt;
      const double err = controller.kind == ControllerKind::kOpenLoop
                             ? -truth.value(t)
                             : estimate.value(t - spec.latency_s) - truth.value(t);
      record(t, err, static_cast<double>(k) * spec.dt, true);
    }
    trace.completion_time = static_cast<double>(path_steps) * spec.dt;
  } else {
    const double half = 0.5 * controller.window_s;
    const long long cap = path_steps * 100000 + 1000000;
    long long done = 0;
    long long k = 0;
    for (; done < path_steps; ++k) {
      if (k > cap) throw GeometryError("execute: intermittent controller made no progress");
      const double t = spec.start_time_s + static_cast<double>(k) * spec.dt;
      const double local = t - spec.latency_s;
      const double idx = std::round(2.0 * ((local + estimate.phase) * estimate.frequency - 0.25));
      const double tk = (0.25 + 0.5 * idx) / estimate.frequency - estimate.phase;
      const double off = local - tk;
      const bool in_window = off >= -half && off < half;
      if (in_window) ++done;
      record(t, in_window ? estimate.value(tk) - truth.value(t) : 0.0, static_cast<double>(done) * spec.dt,
             in_window);
    }
    trace.completion_time = static_cast<double>(k) * spec.dt;
  }
  trace.rms_error = counted ? std::sqrt(sumsq / static_cast<double>(counted)) : 0.0;
  return trace;
}

void DisturbanceModel::validate() const {
  if (!(truth.amplitude >= 0.0) || !(truth.frequency > 0.0)) throw ConfigError("disturbance: need A >= 0 and w > 0");
  if (!(sigma_freq_rel >= 0.0) || !(sigma_phase_s >= 0.0) || !(latency_mean_s >= 0.0) || !(latency_jitter_s >= 0.0)) {
    throw ConfigError("disturbance: noise and latency parameters must be >= 0");
  }
}

ErrorBudget error_budget(const DisturbanceModel& model, const Controller& controller, int trials,
                         std::uint64_t seed, const ExecutionSpec& spec, unsigned threads) {
  model.validate();
  if (trials < 1) throw ConfigError("error_budget: trials must be >= 1");
  ErrorBudget out;
  out.trial_rms.resize(trials);
  out.trial_peak.resize(trials);
  std::vector<double> sumsq(trials), count(trials);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const double n_freq = rng.normal();
    const double n_phase = rng.normal();
    const double u = rng.uniform();
    Sinusoid est = model.truth;
    est.frequency = model.truth.frequency * (1.0 + model.sigma_freq_rel * n_freq);
    est.phase = model.truth.phase + model.sigma_phase_s * n_phase;
    ExecutionSpec s = spec;
    s.latency_s = model.latency_mean_s + model.latency_jitter_s * u;
    const TrackingTrace trace = execute(controller, s, model.truth, est);
    out.trial_rms[i] = trace.rms_error;
    out.trial_peak[i] = trace.max_error;
    double c = 0.0;
    for (std::uint8_t flag : trace.cutting) c += flag;
    count[i] = c;
    sumsq[i] = trace.rms_error * trace.rms_error * c;
  });
  double total_sq = 0.0, total_n = 0.0, peak_sq = 0.0;
  for (int i = 0; i < trials; ++i) {
    total_sq += sumsq[i];
    total_n += count[i];
    peak_sq += out.trial_peak[i] * out.trial_peak[i];
    out.peak = std::max(out.peak, out.trial_peak[i]);
  }
  out.rms = total_n > 0.0 ? std::sqrt(total_sq / total_n) : 0.0;
  out.worst_case = std::sqrt(peak_sq / trials);

  const double physical = model.truth.amplitude * kTwoPi * model.truth.frequency;
  out.analytic_phase_unit = kUnitSlopeMmPerS * model.sigma_phase_s;
  out.analytic_phase_physical = physical * model.sigma_phase_s;
  out.analytic_latency_unit = kUnitSlopeMmPerS * model.latency_jitter_s;
  out.analytic_latency_physical = physical * model.latency_jitter_s;
  out.analytic_total_unit = out.analytic_phase_unit + out.analytic_latency_unit;
  out.analytic_total_physical = out.analytic_phase_physical + out.analytic_latency_physical;
  return out;
}

void write_budget_csv(std::ostream& out, const ErrorBudget& budget, ControllerKind kind) {
  out.precision(17);
  out << "trial,controller,rms,worst\n";
  for (std::size_t i = 0; i < budget.trial_rms.size(); ++i) {
    out << i << ',' << controller_name(kind) << ',' << budget.trial_rms[i] << ',' << budget.trial_peak[i] << '\n';
  }
}

WindowEstimate window_width_from_curvature(const Sinusoid& estimate, double tolerance_mm) {
  if (!(tolerance_mm > 0.0)) throw ConfigError("window_width_from_curvature: tolerance must be > 0");
  const double w = kTwoPi * estimate.frequency;
  const double curvature = std::abs(estimate.amplitude * w * w);
  WindowEstimate out;
  if (!(curvature > 0.0)) {
    out.seconds = std::numeric_limits<double>::infinity();
    out.bounded = false;
    return out;
  }
  out.seconds = 2.0 * std::sqrt(2.0 * tolerance_mm / curvature);
  return out;
}

}  // namespace gauzecut
