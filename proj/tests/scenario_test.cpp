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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "harness.hpp"

namespace gauzecut::harness {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(testing::TempDir()) / ("gauzecut_scenario_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Small training budget so the full pipeline runs in a few seconds.
json tiny() {
  return json::parse(R"({
    "name": "tiny",
    "seed": 99,
    "pattern": {"circle": {"diameter_mm": 50, "points": 100}},
    "tension": {"iterations": 2, "population": 4},
    "grasp": {"candidates": 2}
  })");
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(GAUZECUT_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Scenario, EmptyDocumentGivesDefaults) {
  const Scenario s = parse_scenario(json::object());
  EXPECT_EQ(s.cloth.resolution, 25);
  EXPECT_EQ(s.cloth.pins.layout, PinLayout::kCorners);
  EXPECT_EQ(s.pattern.kind, PatternBlock::Kind::kCircle);
  EXPECT_EQ(s.pattern.diameter_mm, 50.0);
  EXPECT_EQ(s.pattern.points, 100);
  EXPECT_EQ(s.planner.step_mm, 2.0);
  EXPECT_EQ(s.grasp.candidates, 20);
  EXPECT_EQ(s.grasp.margin_mm, 5.0);
  EXPECT_EQ(s.tension.cem.population, 64);
  EXPECT_EQ(s.tension.cem.iterations, 30);
  EXPECT_FALSE(s.camera.has_value());
}

TEST(Scenario, UnknownKeysAreRejectedAtEveryLevel) {
  for (const char* doc : {R"({"sed": 1})", R"({"cloth": {"resolutoin": 25}})",
                          R"({"pattern": {"circle": {"diameter": 50}}})", R"({"tension": {"iters": 3}})",
                          R"({"platform": {"motion": {"axes": "z"}}})", R"({"sync": {"latency": 1}})",
                          R"({"grasp": {"k": 3}})", R"({"planner": {"theta": 60}})"}) {
    EXPECT_THROW(parse_scenario(json::parse(doc)), ConfigError) << doc;
  }
}

TEST(Scenario, WrongTypesAndBadValuesAreRejected) {
  for (const char* doc :
       {R"({"seed": -1})", R"({"seed": 1.5})", R"({"cloth": {"resolution": "25"}})", R"({"cloth": {"pins": "edges"}})",
        R"({"cloth": {"resolution": 1}})", R"({"cloth": {"gravity": [0, 0]}})", R"({"planner": {"ordering": "best"}})",
        R"({"planner": {"step_mm": 0}})", R"({"tension": {"population": 1}})", R"({"grasp": {"candidates": 0}})",
        R"({"grasp": {"vertex": 625}})", R"({"sync": {"controller": "magic"}})",
        R"({"pattern": {"circle": {}, "points": [[0.1, 0.1], [0.9, 0.9]]}})", R"({"pattern": {"points": [[0.1]]}})",
        R"({"cloth": {"extra_pins": [700]}})", R"([1, 2])"}) {
    EXPECT_THROW(parse_scenario(json::parse(doc)), ConfigError) << doc;
  }
}

TEST(Scenario, ReferencedFilesMustExist) {
  EXPECT_THROW(parse_scenario(json::parse(R"({"pattern": {"file": "no_such_pattern.txt"}})"), scratch("files")),
               ConfigError);
  const fs::path dir = scratch("files2");
  std::ofstream(dir / "line.txt") << "0.1,0.5\n0.9,0.5\n";
  const Scenario s = parse_scenario(json::parse(R"({"pattern": {"file": "line.txt"}})"), dir);
  EXPECT_EQ(s.pattern.file, dir / "line.txt");
  EXPECT_EQ(scenario_pattern(s).waypoints.size(), 2u);
  EXPECT_THROW(
      parse_scenario(json::parse(R"({"camera": {"matrix": "cam.csv", "samples": "pts.csv"}})"), dir),
      ConfigError);
}

TEST(Scenario, CanonicalFormRoundTrips) {
  const Scenario a = parse_scenario(tiny());
  const json j = to_json(a);
  const Scenario b = parse_scenario(j);
  EXPECT_EQ(to_json(b), j);
  EXPECT_EQ(config_hash(a), config_hash(b));
}

TEST(Scenario, HashTracksConfigurationButNotOutputLocation) {
  json doc = tiny();
  const std::uint64_t h = config_hash(parse_scenario(doc));
  doc["output"] = "somewhere/else";
  EXPECT_EQ(config_hash(parse_scenario(doc)), h);
  doc["seed"] = 100;
  EXPECT_NE(config_hash(parse_scenario(doc)), h);
  doc["seed"] = 99;
  doc["tension"]["population"] = 5;
  EXPECT_NE(config_hash(parse_scenario(doc)), h);
  EXPECT_EQ(hex64(0x1234), "0000000000001234");
}

TEST(Scenario, StageSeedsAreNamedStreams) {
  const Scenario s = parse_scenario(tiny());
  EXPECT_NE(stage_seed(s, "train"), stage_seed(s, "grasp"));
  EXPECT_NE(stage_seed(s, "train"), stage_seed(s, "sync"));
  EXPECT_EQ(stage_seed(s, "train"), stage_seed(parse_scenario(tiny()), "train"));
}

TEST(Stages, StraightLinePlanHasOneSegmentAndNoNotches) {
  const Scenario s = parse_scenario(json::parse(R"({"pattern": {"points": [[0.1, 0.3], [0.9, 0.3]]}})"));
  const PlanOutput plan = plan_stage(s, 1);
  EXPECT_EQ(plan.segment_count, 1u);
  EXPECT_TRUE(plan.notches.empty());
  const fs::path dir = scratch("line");
  save_plan(dir, plan);
  std::istringstream csv(read_text(dir / "trajectory.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "index,segment,source,reversed,x_mm,y_mm,notch");
  int rows = 0, notch_rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    notch_rows += line.back() == '1';
    EXPECT_EQ(line.substr(line.find(',') + 1, 2), "0,");  // single run
  }
  EXPECT_EQ(rows, static_cast<int>(plan.trajectory.size()));
  EXPECT_EQ(notch_rows, 0);
}

TEST(Stages, ReferenceGraspIsPinnedAndClearOfThePattern) {
  const Scenario s = parse_scenario(json::object());
  const Cloth c = initial_cloth(s);
  const VertexId g = reference_grasp(c, scenario_pattern(s), 5.0);
  EXPECT_TRUE(c.is_pinned(g));
  EXPECT_EQ(g, 0u);
}

TEST(Stages, StagedRunsComposeIntoThePipeline) {
  const Scenario s = parse_scenario(tiny());
  const fs::path staged = scratch("staged");
  const fs::path piped = scratch("piped");

  save_plan(staged, plan_stage(s, 1));
  save_grasp(staged, grasp_stage(s, load_trajectory(staged), 1));
  save_train(staged, train_stage(s, load_trajectory(staged), load_grasp_choice(staged), 1));
  save_execute(staged, execute_stage(s, load_trajectory(staged), load_policy(staged)));

  // The same stages with a different worker count, handing results over in
  // memory instead of through files.
  const PlanOutput plan = plan_stage(s, 3);
  save_plan(piped, plan);
  const GraspOutput g = grasp_stage(s, plan.trajectory, 2);
  save_grasp(piped, g);
  const TrainOutput t = train_stage(s, plan.trajectory, g.selection.best.vertex, 2);
  save_train(piped, t);
  save_execute(piped, execute_stage(s, plan.trajectory, t.policy));

  for (const char* f : {"trajectory.csv", "plan.json", "grasp_reports.csv", "grasp.json", "policy.txt",
                        "training_log.csv", "episode.csv", "score.json"}) {
    EXPECT_EQ(read_text(staged / f), read_text(piped / f)) << f;
  }
  // Training the winner again reproduces the policy found during the search.
  EXPECT_EQ(t.result.best, g.selection.best.policy);
}

TEST(Stages, MissingUpstreamArtifactsAreConfigErrors) {
  const fs::path dir = scratch("missing");
  EXPECT_THROW(load_trajectory(dir), ConfigError);
  EXPECT_THROW(load_policy(dir), ConfigError);
  EXPECT_THROW(load_grasp_choice(dir), ConfigError);
}

TEST(Bench, SingleEpisodeReportsPositiveThroughput) {
  const BenchReport r = bench(parse_scenario(json::object()), 1, 1);
  EXPECT_EQ(r.episodes, 1);
  EXPECT_GT(r.steps_per_s, 0.0);
  EXPECT_EQ(r.steps_per_episode, 80u * 20u);
  EXPECT_THROW(bench(parse_scenario(json::object()), 0, 1), ConfigError);
}

TEST(Bench, HundredEpisodesScoreIdentically) {
  const BenchReport r = bench(parse_scenario(json::object()), 100, 2);
  EXPECT_TRUE(r.identical_scores);
  EXPECT_GT(r.cells, 0u);
}

TEST(Cli, StewartIkAtHomeHasZeroResidual) {
  const fs::path dir = scratch("cli_ik");
  ASSERT_EQ(run_cli("stewart ik --out " + dir.string(), dir / "log.txt"), 0);
  std::istringstream csv(read_text(dir / "ik.csv"));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, "a0,a1,a2,a3,a4,a5,r0,r1,r2,r3,r4,r5,max_residual,in_range");
  std::vector<double> v;
  std::stringstream cells(row);
  std::string cell;
  while (std::getline(cells, cell, ',')) v.push_back(std::stod(cell));
  ASSERT_EQ(v.size(), 14u);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(v[i], v[0], 1e-9);
  EXPECT_LT(v[12], 1e-9);
  EXPECT_EQ(v[13], 1.0);
  EXPECT_TRUE(fs::exists(dir / "manifest-stewart-ik.json"));
}

TEST(Cli, FailuresExitNonzeroWithAnErrorRecord) {
  const fs::path dir = scratch("cli_err");
  std::ofstream(dir / "bad.json") << R"({"cloth": {"colour": "white"}})";
  EXPECT_EQ(run_cli("plan --scenario " + (dir / "bad.json").string() + " --out " + dir.string(), dir / "log.txt"), 2);
  const json err = json::parse(read_text(dir / "error.json"));
  EXPECT_EQ(err["command"], "plan");
  EXPECT_EQ(err["error"], "config");
  EXPECT_NE(err["message"].get<std::string>().find("colour"), std::string::npos);

  EXPECT_EQ(run_cli("stewart ik --pose 0,0,20,0,0,0 --out " + dir.string(), dir / "log.txt"), 3);
  EXPECT_EQ(json::parse(read_text(dir / "error.json"))["error"], "geometry");
  EXPECT_NE(run_cli("no-such-command", dir / "log.txt"), 0);
}

TEST(Cli, OutputRootFromEnvironment) {
  const fs::path root = scratch("cli_env");
  const std::string cmd = "GAUZECUT_OUT=" + root.string() + " " + GAUZECUT_CLI + " stewart ik > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(root / "default" / "ik.csv"));
}

TEST(Cli, RepeatedRunsWriteIdenticalCsvs) {
  const fs::path a = scratch("cli_rep_a");
  const fs::path b = scratch("cli_rep_b");
  std::ofstream(a / "s.json") << tiny().dump();
  const std::string scenario = " --scenario " + (a / "s.json").string();
  ASSERT_EQ(run_cli("pipeline" + scenario + " --out " + a.string(), a / "log.txt"), 0);
  ASSERT_EQ(run_cli("pipeline" + scenario + " --threads 2 --out " + b.string(), b / "log.txt"), 0);
  for (const char* f : {"trajectory.csv", "grasp_reports.csv", "policy.txt", "training_log.csv", "episode.csv",
                        "score.json"}) {
    EXPECT_EQ(read_text(a / f), read_text(b / f)) << f;
  }
  const json m = json::parse(read_text(a / "manifest-pipeline.json"));
  EXPECT_EQ(m["seed"], 99);
  EXPECT_EQ(m["config_hash"], hex64(config_hash(parse_scenario(tiny()))));
  EXPECT_EQ(m["version"], kVersion);
}

}  // namespace
}  // namespace gauzecut::harness
