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

// gauzecut command-line front end. See README.md for the scenario format.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gauzecut/rng.hpp"
#include "harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gauzecut;
using namespace gauzecut::harness;

namespace {

struct Options {
  std::string scenario;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int episodes = 1;
  unsigned threads = 1;
  std::string pose = "0,0,0,0,0,0";
  std::string angles;
  std::string camera_file;
  std::string samples_file;
  std::string transform;
};

struct Context {
  Scenario scenario;
  fs::path out;
  unsigned threads = 1;
};

std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& what) {
  std::string s = text;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  std::vector<double> v;
  double x;
  while (in >> x) v.push_back(x);
  if (!in.eof() || v.size() != expected) {
    throw ConfigError(what + ": expected " + std::to_string(expected) + " comma separated numbers");
  }
  return v;
}

fs::path output_dir(const Options& o, const Scenario& s) {
  if (!o.out.empty()) return o.out;
  if (!s.output.empty()) return s.output;
  if (const char* root = std::getenv("GAUZECUT_OUT"); root && *root) return fs::path(root) / s.name;
  return fs::path("gauzecut_out") / s.name;
}

std::string csv_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::vector<std::string> run_plan(const Context& c) {
  const PlanOutput plan = plan_stage(c.scenario, c.threads);
  save_plan(c.out, plan);
  std::cout << "plan: " << plan.segment_count << " segment(s), " << plan.notches.size() << " notch(es), "
            << plan.trajectory.size() << " waypoints\n";
  return {"trajectory.csv", "plan.json"};
}

std::vector<std::string> run_grasp(const Context& c) {
  const GraspOutput g = grasp_stage(c.scenario, load_trajectory(c.out), c.threads);
  save_grasp(c.out, g);
  std::cout << "grasp: vertex " << g.selection.best.vertex << " score " << g.selection.best.evaluation.score.cells
            << " cells\n";
  return {"grasp_reports.csv", "grasp.json"};
}

std::vector<std::string> run_train(const Context& c) {
  const VertexId grasp = c.scenario.grasp.vertex ? *c.scenario.grasp.vertex : load_grasp_choice(c.out);
  const TrainOutput t = train_stage(c.scenario, load_trajectory(c.out), grasp, c.threads);
  save_train(c.out, t);
  std::cout << "train: grasp " << grasp << " best fitness " << t.result.best_evaluation.fitness << " score "
            << t.result.best_evaluation.score.cells << " cells\n";
  return {"policy.txt", "training_log.csv"};
}

std::vector<std::string> run_execute(const Context& c) {
  const ExecuteOutput e = execute_stage(c.scenario, load_trajectory(c.out), load_policy(c.out));
  save_execute(c.out, e);
  std::cout << "execute: score " << e.trained.score.cells << " cells (no tension " << e.baseline.score.cells
            << "), reward " << e.trained.reward_total << "/" << e.episode.events.size() << "\n";
  return {"episode.csv", "score.json"};
}

std::vector<std::string> run_pipeline(const Context& c) {
  std::vector<std::string> all;
  auto add = [&](const std::vector<std::string>& a) { all.insert(all.end(), a.begin(), a.end()); };
  add(run_plan(c));
  if (!c.scenario.grasp.vertex) add(run_grasp(c));
  add(run_train(c));
  add(run_execute(c));
  return all;
}

std::vector<std::string> run_stewart_ik(const Context& c, const Options& o) {
  const auto v = parse_list(o.pose, 6, "--pose");
  const PlatformDims& dims = c.scenario.platform.dims;
  PlatformPose pose = PlatformPose::home(dims);
  pose.translation += Vec3(v[0], v[1], v[2]);
  pose.rotation = Vec3(v[3], v[4], v[5]);
  const IkResult ik = inverse_kinematics(pose, dims);
  std::ostringstream csv;
  csv << "a0,a1,a2,a3,a4,a5,r0,r1,r2,r3,r4,r5,max_residual,in_range\n";
  double worst = 0.0;
  for (double a : ik.angles) csv << csv_double(a) << ',';
  for (double r : ik.residuals) {
    csv << csv_double(r) << ',';
    worst = std::max(worst, std::abs(r));
  }
  csv << csv_double(worst) << ',' << (ik.in_range ? 1 : 0) << '\n';
  write_text(c.out / "ik.csv", csv.str());
  std::cout << csv.str();
  return {"ik.csv"};
}

std::vector<std::string> run_stewart_fk(const Context& c, const Options& o) {
  if (o.angles.empty()) throw ConfigError("stewart fk: --angles is required");
  const auto v = parse_list(o.angles, 6, "--angles");
  ServoAngles angles{};
  std::copy(v.begin(), v.end(), angles.begin());
  const FkResult fk = forward_kinematics(angles, c.scenario.platform.dims);
  std::ostringstream csv;
  csv << "x,y,z,roll,pitch,yaw,residual,iterations\n";
  write_pose_csv_row(csv, fk.pose);
  csv << ',' << csv_double(fk.residual) << ',' << fk.iterations << '\n';
  write_text(c.out / "fk.csv", csv.str());
  std::cout << csv.str();
  return {"fk.csv"};
}

std::vector<std::string> run_stewart_mode(const Context& c) {
  const PlatformBlock& p = c.scenario.platform;
  std::ostringstream csv;
  csv << "t,x,y,z,roll,pitch,yaw,a0,a1,a2,a3,a4,a5,status\n";
  const auto n = static_cast<long>(std::floor(p.duration_s / p.dt + 1e-9));
  int unreachable = 0;
  for (long k = 0; k <= n; ++k) {
    const double t = k * p.dt;
    const PlatformPose pose = p.motion.pose(t, p.dims);
    csv << csv_double(t) << ',';
    write_pose_csv_row(csv, pose);
    csv << ',';
    try {
      const IkResult ik = inverse_kinematics(pose, p.dims);
      write_angles_csv_row(csv, ik.angles);
      csv << (ik.in_range ? ",ok\n" : ",out_of_range\n");
    } catch (const UnreachableError&) {
      csv << ",,,,,,unreachable\n";
      ++unreachable;
    }
  }
  write_text(c.out / "mode.csv", csv.str());
  std::cout << "mode: " << n + 1 << " samples, " << unreachable << " unreachable\n";
  return {"mode.csv"};
}

std::vector<std::string> run_sync_budget(const Context& c) {
  const SyncBlock& y = c.scenario.sync;
  const ErrorBudget b =
      error_budget(y.model, y.controller, y.trials, stage_seed(c.scenario, "sync"), y.execution, c.threads);
  std::ostringstream csv;
  write_budget_csv(csv, b, y.controller.kind);
  write_text(c.out / "budget.csv", csv.str());
  write_json(c.out / "budget.json", {{"controller", std::string(controller_name(y.controller.kind))},
                                     {"trials", y.trials},
                                     {"rms_mm", b.rms},
                                     {"worst_case_mm", b.worst_case},
                                     {"peak_mm", b.peak},
                                     {"analytic_phase_unit_mm", b.analytic_phase_unit},
                                     {"analytic_latency_unit_mm", b.analytic_latency_unit},
                                     {"analytic_total_unit_mm", b.analytic_total_unit},
                                     {"analytic_phase_physical_mm", b.analytic_phase_physical},
                                     {"analytic_latency_physical_mm", b.analytic_latency_physical},
                                     {"analytic_total_physical_mm", b.analytic_total_physical}});
  std::cout << "sync budget: rms " << b.rms << " mm, worst " << b.worst_case << " mm; unit-slope phase "
            << b.analytic_phase_unit << " mm, latency " << b.analytic_latency_unit << " mm\n";
  return {"budget.csv", "budget.json"};
}

std::vector<std::string> run_sync_trace(const Context& c) {
  const SyncBlock& y = c.scenario.sync;
  Rng rng(stage_seed(c.scenario, "sync.run"));
  Sinusoid estimate = y.model.truth;
  estimate.frequency *= 1.0 + y.model.sigma_freq_rel * rng.normal();
  estimate.phase += y.model.sigma_phase_s * rng.normal();
  const TrackingTrace tr = execute(y.controller, y.execution, y.model.truth, estimate);
  std::ostringstream csv;
  csv << "t,error_mm,progress_s,cutting\n";
  for (std::size_t i = 0; i < tr.time.size(); ++i) {
    csv << csv_double(tr.time[i]) << ',' << csv_double(tr.error[i]) << ',' << csv_double(tr.progress[i]) << ','
        << int(tr.cutting[i]) << '\n';
  }
  write_text(c.out / "trace.csv", csv.str());
  write_json(c.out / "trace.json", {{"controller", std::string(controller_name(y.controller.kind))},
                                    {"estimate", {{"amplitude_mm", estimate.amplitude},
                                                  {"frequency_hz", estimate.frequency},
                                                  {"phase_s", estimate.phase}}},
                                    {"completion_s", tr.completion_time},
                                    {"max_error_mm", tr.max_error},
                                    {"rms_error_mm", tr.rms_error}});
  std::cout << "sync run: completion " << tr.completion_time << " s, max error " << tr.max_error << " mm\n";
  return {"trace.csv", "trace.json"};
}

std::vector<std::string> run_camera_map(const Context& c, const Options& o) {
  fs::path cam_path, pts_path;
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  if (c.scenario.camera) {
    cam_path = c.scenario.camera->matrix;
    pts_path = c.scenario.camera->samples;
    t = c.scenario.camera->transform;
  }
  if (!o.camera_file.empty()) cam_path = o.camera_file;
  if (!o.samples_file.empty()) pts_path = o.samples_file;
  if (!o.transform.empty()) {
    const auto v = parse_list(o.transform, 9, "--transform");
    for (int i = 0; i < 9; ++i) t(i / 3, i % 3) = v[static_cast<std::size_t>(i)];
  }
  if (cam_path.empty() || pts_path.empty()) {
    throw ConfigError("camera map: give --camera and --samples or a camera block in the scenario");
  }
  std::ifstream cam_in(cam_path), pts_in(pts_path);
  if (!cam_in) throw ConfigError("cannot read " + cam_path.string());
  if (!pts_in) throw ConfigError("cannot read " + pts_path.string());
  const CameraMatrix cam = read_camera_csv(cam_in);
  const std::vector<Vec3> samples = read_points_csv(pts_in);
  const RigidMapResult r = rigid_inverse_map(cam, t, samples);
  const PoseCommand cmd = pose_for_camera_motion(r.transform);

  std::ostringstream rigid, res;
  rigid << "r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz\n";
  write_rigid_row(rigid, r.transform);
  rigid << '\n';
  res << "sample,residual_mm\n";
  for (std::size_t i = 0; i < r.residuals.size(); ++i) res << i << ',' << csv_double(r.residuals[i]) << '\n';
  write_text(c.out / "rigid.csv", rigid.str());
  write_text(c.out / "residuals.csv", res.str());
  auto pose_json = [](const PlatformPose& p) {
    return json{{"translation_cm", {p.translation.x(), p.translation.y(), p.translation.z()}},
                {"rotation_deg", {p.rotation.x(), p.rotation.y(), p.rotation.z()}}};
  };
  write_json(c.out / "pose.json",
             {{"in_range", cmd.in_range}, {"offset", pose_json(cmd.offset)}, {"clamped", pose_json(cmd.clamped)}});
  std::cout << rigid.str();
  if (!cmd.in_range) std::cout << "camera map: pose out of range, clamped\n";
  return {"rigid.csv", "residuals.csv", "pose.json"};
}

std::vector<std::string> run_bench(const Context& c, const Options& o) {
  const BenchReport r = bench(c.scenario, o.episodes, c.threads);
  write_json(c.out / "bench.json", {{"episodes", r.episodes},
                                    {"threads", r.threads},
                                    {"wall_s", r.wall_s},
                                    {"episodes_per_s", r.episodes_per_s},
                                    {"steps_per_s", r.steps_per_s},
                                    {"steps_per_episode", r.steps_per_episode},
                                    {"identical_scores", r.identical_scores},
                                    {"cells", r.cells}});
  std::cout << "bench: " << r.episodes << " episodes in " << r.wall_s << " s (" << r.episodes_per_s
            << " episodes/s, " << r.steps_per_s << " steps/s), identical scores: "
            << (r.identical_scores ? "yes" : "no") << "\n";
  return {"bench.json"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gauzecut: simulated pattern cutting with tensioning, platform and camera tools"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--scenario", o.scenario, "Scenario JSON file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory (default: scenario output, then $GAUZECUT_OUT/<name>)");
  auto* seed_opt = app.add_option("--seed", o.seed, "Root seed, overrides the scenario");
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--episodes", o.episodes, "Episodes for bench")->check(CLI::Range(1, 100000000));

  std::string command;
  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    s->callback([&command, name] { command = name; });
    return s;
  };
  sub("plan", "Pattern to cutting trajectory");
  sub("train", "Train a tensioning policy for the chosen grasp");
  sub("grasp", "Search grasp candidates");
  sub("execute", "Run the trained policy and score the cut");
  sub("pipeline", "plan, grasp, train and execute");
  sub("bench", "Throughput of repeated cut episodes");
  auto* stewart = app.add_subcommand("stewart", "Platform kinematics");
  stewart->require_subcommand(1);
  auto* ik = stewart->add_subcommand("ik", "Servo angles for a pose offset from home");
  ik->add_option("--pose", o.pose, "x,y,z (cm), roll,pitch,yaw (deg) from home");
  ik->callback([&] { command = "stewart-ik"; });
  auto* fk = stewart->add_subcommand("fk", "Pose from servo angles");
  fk->add_option("--angles", o.angles, "a0,...,a5 (deg)")->required();
  fk->callback([&] { command = "stewart-fk"; });
  stewart->add_subcommand("mode", "Sample the scenario's motion mode")->callback([&] { command = "stewart-mode"; });
  for (auto* s : {ik, fk}) s->fallthrough();
  auto* sync = app.add_subcommand("sync", "Motion synchronization studies");
  sync->require_subcommand(1);
  sync->add_subcommand("budget", "Monte-Carlo error budget")->callback([&] { command = "sync-budget"; });
  sync->add_subcommand("run", "Single tracking trace")->callback([&] { command = "sync-run"; });
  auto* camera = app.add_subcommand("camera", "Movable camera support");
  camera->require_subcommand(1);
  auto* cmap = camera->add_subcommand("map", "Rigid world motion for an image-space transform");
  cmap->add_option("--camera", o.camera_file, "3x4 camera matrix CSV");
  cmap->add_option("--samples", o.samples_file, "Sample points CSV");
  cmap->add_option("--transform", o.transform, "3x3 image transform, 9 numbers row-major");
  cmap->callback([&] { command = "camera-map"; });
  for (auto* s : {stewart, sync, camera}) s->fallthrough();
  for (auto* s : stewart->get_subcommands({})) s->fallthrough();
  for (auto* s : sync->get_subcommands({})) s->fallthrough();
  cmap->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  o.seed_given = seed_opt->count() > 0;

  Context c;
  c.threads = o.threads;
  fs::path out = o.out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (!o.scenario.empty()) c.scenario = load_scenario(o.scenario);
    if (o.seed_given) c.scenario.seed = o.seed;
    out = output_dir(o, c.scenario);
    c.out = out;
    fs::create_directories(c.out);
    fs::remove(c.out / "error.json");

    std::vector<std::string> artifacts;
    if (command == "plan") artifacts = run_plan(c);
    else if (command == "grasp") artifacts = run_grasp(c);
    else if (command == "train") artifacts = run_train(c);
    else if (command == "execute") artifacts = run_execute(c);
    else if (command == "pipeline") artifacts = run_pipeline(c);
    else if (command == "bench") artifacts = run_bench(c, o);
    else if (command == "stewart-ik") artifacts = run_stewart_ik(c, o);
    else if (command == "stewart-fk") artifacts = run_stewart_fk(c, o);
    else if (command == "stewart-mode") artifacts = run_stewart_mode(c);
    else if (command == "sync-budget") artifacts = run_sync_budget(c);
    else if (command == "sync-run") artifacts = run_sync_trace(c);
    else if (command == "camera-map") artifacts = run_camera_map(c, o);
    else throw ConfigError("unknown command");

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(c.out, command, c.scenario, c.threads, artifacts, wall);
    return 0;
  } catch (const std::exception& e) {
    const char* kind = dynamic_cast<const ConfigError*>(&e)     ? "config"
                       : dynamic_cast<const GeometryError*>(&e) ? "geometry"
                                                                : "runtime";
    std::cerr << "gauzecut " << command << ": " << e.what() << "\n";
    if (!out.empty()) {
      try {
        write_error(out, command, kind, e.what());
      } catch (const std::exception&) {
        // Nowhere to record it; the exit status still reports the failure.
      }
    }
    return std::string(kind) == "config" ? 2 : std::string(kind) == "geometry" ? 3 : 1;
  }
}
