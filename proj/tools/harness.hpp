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

// Scenario configuration and the pipeline stages behind the gauzecut CLI.
//
// Every stage is a plain function of the scenario (plus the artifacts of the
// stages before it) and writes its results into an output directory. Running
// the stages one by one produces the same files as `pipeline`.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gauzecut/camera.hpp"
#include "gauzecut/cloth.hpp"
#include "gauzecut/grasp.hpp"
#include "gauzecut/motion_sync.hpp"
#include "gauzecut/pattern.hpp"
#include "gauzecut/policy.hpp"
#include "gauzecut/stewart.hpp"

namespace gauzecut::harness {

inline constexpr const char* kVersion = "0.1.0";

struct ClothBlock {
  int resolution = 25;
  ClothParams params;
  PinSpec pins;
  std::vector<VertexId> released;  // pins dropped after the layout is applied
  int settle_steps = 2000;
};

struct PatternBlock {
  enum class Kind { kCircle, kFile, kPoints } kind = Kind::kCircle;
  double diameter_mm = 50.0;
  int points = 100;
  std::filesystem::path file;  // resolved against the scenario's directory
  std::vector<Vec2> waypoints;
  bool closed = false;
};

struct PlannerBlock {
  double theta_max_deg = 60.0;
  double step_mm = 2.0;
  OrderMode ordering = OrderMode::kExhaustive;
};

struct TensionBlock {
  CemConfig cem;  // seed and threads are filled in per run
  int d_max_mm = kDefaultMaxDisplacementMm;
  double lambda = 0.0;  // <= 0 selects 10 N
  EpisodeConfig episode;
  int resolution = kDefaultResolution;
};

struct GraspBlock {
  int candidates = kDefaultGraspCandidates;
  double margin_mm = kDefaultGraspMarginMm;
  std::optional<VertexId> vertex;  // skips the search in `train`
};

struct PlatformBlock {
  PlatformDims dims;
  MotionMode motion{MotionAxis::kZ, MotionKind::kSinusoid, 1.0, 0.5};
  double duration_s = 4.0;
  double dt = 0.05;
};

struct SyncBlock {
  DisturbanceModel model;
  Controller controller;
  int trials = 200;
  ExecutionSpec execution;
};

struct CameraBlock {
  std::filesystem::path matrix;
  std::filesystem::path samples;
  Eigen::Matrix3d transform = Eigen::Matrix3d::Identity();
};

struct Scenario {
  std::string name = "default";
  std::uint64_t seed = 1;
  std::string output;  // empty: $GAUZECUT_OUT/<name> or ./gauzecut_out/<name>
  ClothBlock cloth;
  PatternBlock pattern;
  PlannerBlock planner;
  TensionBlock tension;
  GraspBlock grasp;
  PlatformBlock platform;
  SyncBlock sync;
  std::optional<CameraBlock> camera;
};

/// Parses a scenario document. Every block is optional; unknown keys, wrong
/// types and referenced files that do not exist raise ConfigError. Relative
/// paths resolve against base_dir.
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);
/// Fully resolved form; parse_scenario(to_json(s)) == s.
nlohmann::json to_json(const Scenario& s);
/// FNV-1a 64 over the canonical dump of to_json.
std::uint64_t config_hash(const Scenario& s);
std::string hex64(std::uint64_t v);

/// Stage seeds are split from the root seed by name.
std::uint64_t stage_seed(const Scenario& s, const char* stage);

Cloth initial_cloth(const Scenario& s);
Pattern scenario_pattern(const Scenario& s);
/// Lowest-id pinned vertex, else the first vertex clear of the pattern. A
/// pinned grasp held still leaves the cloth as it was, so episodes with it
/// and no tension show the cloth's own response.
VertexId reference_grasp(const Cloth& cloth, const Pattern& pattern, double margin_mm);
EpisodeEnv make_env(const Scenario& s, const Cloth& state0, const CutTrajectory& trajectory,
                    const Pattern& pattern, VertexId grasp);

struct PlanOutput {
  CutTrajectory trajectory;
  std::vector<std::size_t> notches;
  std::size_t segment_count = 0;
  OrderSearchResult search;
  VertexId scoring_grasp = 0;
};
/// Orders segments by the no-tension score of a full episode per ordering.
PlanOutput plan_stage(const Scenario& s, unsigned threads);

struct TrainOutput {
  VertexId grasp = 0;
  CemResult result;
  TensionPolicy policy;
};
/// CEM seed is split from the train stream by the grasp id, matching the
/// per-candidate training inside the grasp search.
TrainOutput train_stage(const Scenario& s, const CutTrajectory& trajectory, VertexId grasp, unsigned threads);

struct GraspOutput {
  std::vector<VertexId> candidates;
  GraspSelection selection;
};
GraspOutput grasp_stage(const Scenario& s, const CutTrajectory& trajectory, unsigned threads);

struct ExecuteOutput {
  VertexId grasp = 0;
  EpisodeResult episode;
  Evaluation trained;
  Evaluation baseline;  // no tension, same grasp
};
ExecuteOutput execute_stage(const Scenario& s, const CutTrajectory& trajectory, const TensionPolicy& policy);

struct BenchReport {
  int episodes = 0;
  unsigned threads = 1;
  double wall_s = 0.0;
  double episodes_per_s = 0.0;
  double steps_per_s = 0.0;
  std::size_t steps_per_episode = 0;
  bool identical_scores = true;
  std::size_t cells = 0;
};
/// Repeated no-tension episodes of the scenario's cloth and circle.
BenchReport bench(const Scenario& s, int episodes, unsigned threads);

// Artifact writers and readers. File names are fixed so staged runs and
// `pipeline` fill the same directory layout.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

void save_plan(const std::filesystem::path& dir, const PlanOutput& out);
CutTrajectory load_trajectory(const std::filesystem::path& dir);
void save_grasp(const std::filesystem::path& dir, const GraspOutput& out);
VertexId load_grasp_choice(const std::filesystem::path& dir);
void save_train(const std::filesystem::path& dir, const TrainOutput& out);
TensionPolicy load_policy(const std::filesystem::path& dir);
void save_execute(const std::filesystem::path& dir, const ExecuteOutput& out);

/// manifest-<command>.json: command, config hash, seed, version, thread
/// count, artifact list and wall-clock stamps.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const Scenario& s,
                    unsigned threads, const std::vector<std::string>& artifacts, double wall_s);
/// error.json with the failing stage, the error class and message.
void write_error(const std::filesystem::path& dir, const std::string& command, const std::string& kind,
                 const std::string& message);

}  // namespace gauzecut::harness
