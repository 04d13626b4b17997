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

#include "harness.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "gauzecut/geometry.hpp"
#include "gauzecut/parallel.hpp"
#include "gauzecut/rng.hpp"

namespace gauzecut::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  const json* find(const char* key) {
    const auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }
  bool has(const char* key) const { return j_.contains(key); }
  std::string at(const char* key) const { return path_ + "." + key; }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(at(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  void integer(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(at(key) + ": expected an integer");
      out = v->get<int>();
    }
  }
  void u64(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!non_negative_integer(*v)) throw ConfigError(at(key) + ": expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(at(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }
  void string(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(at(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  void vertices(const char* key, std::vector<VertexId>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(at(key) + ": expected an array of vertex ids");
      out.clear();
      for (const json& e : *v) {
        if (!non_negative_integer(e)) throw ConfigError(at(key) + ": expected vertex ids");
        out.push_back(e.get<VertexId>());
      }
    }
  }
  void vec3(const char* key, Vec3& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 3) throw ConfigError(at(key) + ": expected [x, y, z]");
      for (int k = 0; k < 3; ++k) {
        if (!(*v)[k].is_number()) throw ConfigError(at(key) + ": expected numbers");
        out[k] = (*v)[k].get<double>();
      }
    }
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* layout_name(PinLayout l) {
  switch (l) {
    case PinLayout::kNone: return "none";
    case PinLayout::kCorners: return "corners";
    case PinLayout::kBoundary: return "boundary";
    case PinLayout::kAll: return "all";
  }
  return "corners";
}

PinLayout parse_layout(const std::string& name) {
  for (PinLayout l : {PinLayout::kNone, PinLayout::kCorners, PinLayout::kBoundary, PinLayout::kAll}) {
    if (name == layout_name(l)) return l;
  }
  throw ConfigError("cloth.pins: unknown layout '" + name + "' (none, corners, boundary, all)");
}

const char* ordering_name(OrderMode m) { return m == OrderMode::kGreedy ? "greedy" : "exhaustive"; }

OrderMode parse_ordering(const std::string& name) {
  if (name == "exhaustive") return OrderMode::kExhaustive;
  if (name == "greedy") return OrderMode::kGreedy;
  throw ConfigError("planner.ordering: expected 'exhaustive' or 'greedy', got '" + name + "'");
}

const char* kind_name(MotionKind k) { return k == MotionKind::kBreathing ? "breathing" : "sinusoid"; }

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) throw ConfigError(what + ": file not found: " + p.string());
}

void parse_cloth(Reader r, ClothBlock& c) {
  r.integer("resolution", c.resolution);
  r.number("alpha", c.params.alpha);
  r.number("delta", c.params.delta);
  r.number("tau", c.params.tau);
  r.vec3("gravity", c.params.gravity);
  r.number("dt", c.params.dt);
  r.integer("constraint_iterations", c.params.constraint_iterations);
  r.boolean("shear_diagonals", c.params.shear_diagonals);
  std::string layout = layout_name(c.pins.layout);
  r.string("pins", layout);
  c.pins.layout = parse_layout(layout);
  r.vertices("extra_pins", c.pins.extra);
  r.vertices("released", c.released);
  r.integer("settle_steps", c.settle_steps);
  r.finish();
  if (c.resolution < 2) throw ConfigError("cloth.resolution must be >= 2");
  if (c.settle_steps < 0) throw ConfigError("cloth.settle_steps must be >= 0");
  c.params.validate();
  const auto n = static_cast<VertexId>(c.resolution * c.resolution);
  for (VertexId v : c.pins.extra) {
    if (v >= n) throw ConfigError("cloth.extra_pins: vertex " + std::to_string(v) + " out of range");
  }
  for (VertexId v : c.released) {
    if (v >= n) throw ConfigError("cloth.released: vertex " + std::to_string(v) + " out of range");
  }
}

void parse_pattern(Reader r, PatternBlock& p, const fs::path& base) {
  const int given = int(r.has("circle")) + int(r.has("file")) + int(r.has("points"));
  if (given > 1) throw ConfigError("pattern: give exactly one of circle, file, points");
  if (const json* c = r.find("circle")) {
    p.kind = PatternBlock::Kind::kCircle;
    Reader cr(*c, "pattern.circle");
    cr.number("diameter_mm", p.diameter_mm);
    cr.integer("points", p.points);
    cr.finish();
    if (!(p.diameter_mm > 0.0) || p.diameter_mm > kGauzeSideMm) {
      throw ConfigError("pattern.circle.diameter_mm must be in (0, " + std::to_string(kGauzeSideMm) + "]");
    }
    if (p.points < 3) throw ConfigError("pattern.circle.points must be >= 3");
  }
  if (r.has("file")) {
    p.kind = PatternBlock::Kind::kFile;
    std::string f;
    r.string("file", f);
    p.file = resolve(base, f);
    require_file(p.file, "pattern.file");
  }
  if (const json* pts = r.find("points")) {
    p.kind = PatternBlock::Kind::kPoints;
    if (!pts->is_array()) throw ConfigError("pattern.points: expected [[x, y], ...]");
    p.waypoints.clear();
    for (const json& e : *pts) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ConfigError("pattern.points: expected [[x, y], ...]");
      }
      p.waypoints.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
  }
  r.boolean("closed", p.closed);
  r.finish();
}

void parse_planner(Reader r, PlannerBlock& p) {
  r.number("theta_max_deg", p.theta_max_deg);
  r.number("step_mm", p.step_mm);
  std::string mode = ordering_name(p.ordering);
  r.string("ordering", mode);
  p.ordering = parse_ordering(mode);
  r.finish();
  if (!(p.theta_max_deg > 0.0 && p.theta_max_deg < 180.0)) throw ConfigError("planner.theta_max_deg must be in (0, 180)");
  if (!(p.step_mm > 0.0)) throw ConfigError("planner.step_mm must be > 0");
}

void parse_tension(Reader r, TensionBlock& t) {
  r.integer("iterations", t.cem.iterations);
  r.integer("population", t.cem.population);
  r.number("elite_fraction", t.cem.elite_fraction);
  r.number("smoothing", t.cem.smoothing);
  r.boolean("inject_baseline", t.cem.inject_baseline);
  r.integer("d_max_mm", t.d_max_mm);
  r.number("lambda", t.lambda);
  r.integer("settle_steps", t.episode.settle_steps);
  r.number("radius_mm", t.episode.radius);
  r.number("reward_tol_mm", t.episode.reward_tol_mm);
  r.integer("resolution", t.resolution);
  r.finish();
  t.cem.validate();
  if (t.d_max_mm < 0) throw ConfigError("tension.d_max_mm must be >= 0");
  if (t.episode.settle_steps < 0) throw ConfigError("tension.settle_steps must be >= 0");
  if (!(t.episode.reward_tol_mm > 0.0)) throw ConfigError("tension.reward_tol_mm must be > 0");
  if (t.resolution < 2) throw ConfigError("tension.resolution must be >= 2");
}

void parse_grasp(Reader r, GraspBlock& g) {
  r.integer("candidates", g.candidates);
  r.number("margin_mm", g.margin_mm);
  if (const json* v = r.find("vertex")) {
    if (v->is_null()) {
      g.vertex.reset();
    } else if (non_negative_integer(*v)) {
      g.vertex = v->get<VertexId>();
    } else {
      throw ConfigError("grasp.vertex: expected a vertex id or null");
    }
  }
  r.finish();
  if (g.candidates < 1) throw ConfigError("grasp.candidates must be >= 1");
  if (!(g.margin_mm >= 0.0)) throw ConfigError("grasp.margin_mm must be >= 0");
}

void parse_platform(Reader r, PlatformBlock& p) {
  r.number("l1", p.dims.l1);
  r.number("l2", p.dims.l2);
  r.number("z_home", p.dims.z_home);
  r.number("l_ob", p.dims.l_ob);
  r.number("l_op", p.dims.l_op);
  r.number("theta_b", p.dims.theta_b);
  r.number("theta_p", p.dims.theta_p);
  r.number("servo_limit", p.dims.servo_limit);
  r.boolean("quantize", p.dims.quantize);
  r.number("quantum", p.dims.quantum);
  if (const json* b = r.find("beta")) {
    if (b->is_null()) {
      p.dims.beta.reset();
    } else {
      if (!b->is_array() || b->size() != 6) throw ConfigError("platform.beta: expected 6 angles");
      std::array<double, 6> beta{};
      for (int i = 0; i < 6; ++i) {
        if (!(*b)[i].is_number()) throw ConfigError("platform.beta: expected numbers");
        beta[i] = (*b)[i].get<double>();
      }
      p.dims.beta = beta;
    }
  }
  if (const json* m = r.find("motion")) {
    Reader mr(*m, "platform.motion");
    std::string axis(axis_name(p.motion.axis)), kind = kind_name(p.motion.kind);
    mr.string("axis", axis);
    mr.string("kind", kind);
    mr.number("amplitude", p.motion.amplitude);
    mr.number("frequency", p.motion.frequency);
    mr.finish();
    p.motion.axis = parse_axis(axis);
    p.motion.kind = parse_motion_kind(kind);
  }
  r.number("duration_s", p.duration_s);
  r.number("dt", p.dt);
  r.finish();
  p.dims.validate();
  p.motion.validate();
  if (!(p.duration_s > 0.0)) throw ConfigError("platform.duration_s must be > 0");
  if (!(p.dt > 0.0)) throw ConfigError("platform.dt must be > 0");
}

void parse_sync(Reader r, SyncBlock& s) {
  r.number("amplitude_mm", s.model.truth.amplitude);
  r.number("frequency_hz", s.model.truth.frequency);
  r.number("phase_s", s.model.truth.phase);
  r.number("sigma_freq_rel", s.model.sigma_freq_rel);
  r.number("sigma_phase_s", s.model.sigma_phase_s);
  r.number("latency_mean_s", s.model.latency_mean_s);
  r.number("latency_jitter_s", s.model.latency_jitter_s);
  std::string controller(controller_name(s.controller.kind));
  r.string("controller", controller);
  s.controller.kind = parse_controller(controller);
  r.number("window_s", s.controller.window_s);
  r.integer("trials", s.trials);
  r.number("path_duration_s", s.execution.path_duration_s);
  r.number("dt", s.execution.dt);
  r.number("latency_s", s.execution.latency_s);
  r.number("start_time_s", s.execution.start_time_s);
  r.finish();
  s.model.validate();
  s.controller.validate();
  if (s.trials < 1) throw ConfigError("sync.trials must be >= 1");
  if (!(s.execution.path_duration_s > 0.0) || !(s.execution.dt > 0.0)) {
    throw ConfigError("sync.path_duration_s and sync.dt must be > 0");
  }
}

void parse_camera(Reader r, CameraBlock& c, const fs::path& base) {
  std::string matrix, samples;
  r.string("matrix", matrix);
  r.string("samples", samples);
  if (matrix.empty() || samples.empty()) throw ConfigError("camera: matrix and samples files are required");
  c.matrix = resolve(base, matrix);
  c.samples = resolve(base, samples);
  require_file(c.matrix, "camera.matrix");
  require_file(c.samples, "camera.samples");
  if (const json* t = r.find("transform")) {
    if (!t->is_array() || t->size() != 3) throw ConfigError("camera.transform: expected a 3x3 array");
    for (int i = 0; i < 3; ++i) {
      const json& row = (*t)[i];
      if (!row.is_array() || row.size() != 3) throw ConfigError("camera.transform: expected a 3x3 array");
      for (int k = 0; k < 3; ++k) {
        if (!row[k].is_number()) throw ConfigError("camera.transform: expected numbers");
        c.transform(i, k) = row[k].get<double>();
      }
    }
  }
  r.finish();
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::uint64_t fnv1a(std::uint64_t h, const std::string& data) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::vector<DirectedSegment> identity_order(std::size_t n) {
  std::vector<DirectedSegment> order;
  for (std::size_t i = 0; i < n; ++i) order.push_back({i, false});
  return order;
}

json evaluation_json(const Evaluation& e) {
  return {{"cells", e.score.cells}, {"normalized", e.score.normalized}, {"reward_total", e.reward_total},
          {"fitness", e.fitness}};
}

}  // namespace

Scenario parse_scenario(const json& doc, const fs::path& base_dir) {
  Scenario s;
  Reader r(doc, "scenario");
  r.string("name", s.name);
  r.u64("seed", s.seed);
  r.string("output", s.output);
  if (const json* j = r.find("cloth")) parse_cloth(Reader(*j, "cloth"), s.cloth);
  if (const json* j = r.find("pattern")) parse_pattern(Reader(*j, "pattern"), s.pattern, base_dir);
  if (const json* j = r.find("planner")) parse_planner(Reader(*j, "planner"), s.planner);
  if (const json* j = r.find("tension")) parse_tension(Reader(*j, "tension"), s.tension);
  if (const json* j = r.find("grasp")) parse_grasp(Reader(*j, "grasp"), s.grasp);
  if (const json* j = r.find("platform")) parse_platform(Reader(*j, "platform"), s.platform);
  if (const json* j = r.find("sync")) parse_sync(Reader(*j, "sync"), s.sync);
  if (const json* j = r.find("camera")) {
    if (!j->is_null()) {
      s.camera.emplace();
      parse_camera(Reader(*j, "camera"), *s.camera, base_dir);
    }
  }
  r.finish();
  if (s.name.empty()) throw ConfigError("scenario.name must not be empty");
  if (s.grasp.vertex && *s.grasp.vertex >= static_cast<VertexId>(s.cloth.resolution * s.cloth.resolution)) {
    throw ConfigError("grasp.vertex out of range");
  }
  return s;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario: " + path.string() + ": " + e.what());
  }
  return parse_scenario(doc, path.parent_path());
}

json to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["output"] = s.output;

  const ClothBlock& c = s.cloth;
  j["cloth"] = {{"resolution", c.resolution},
                {"alpha", c.params.alpha},
                {"delta", c.params.delta},
                {"tau", c.params.tau},
                {"gravity", vec_json(c.params.gravity)},
                {"dt", c.params.dt},
                {"constraint_iterations", c.params.constraint_iterations},
                {"shear_diagonals", c.params.shear_diagonals},
                {"pins", layout_name(c.pins.layout)},
                {"extra_pins", c.pins.extra},
                {"released", c.released},
                {"settle_steps", c.settle_steps}};

  const PatternBlock& p = s.pattern;
  switch (p.kind) {
    case PatternBlock::Kind::kCircle:
      j["pattern"] = {{"circle", {{"diameter_mm", p.diameter_mm}, {"points", p.points}}}};
      break;
    case PatternBlock::Kind::kFile:
      j["pattern"] = {{"file", p.file.string()}};
      break;
    case PatternBlock::Kind::kPoints: {
      json pts = json::array();
      for (const Vec2& w : p.waypoints) pts.push_back({w.x(), w.y()});
      j["pattern"] = {{"points", pts}};
      break;
    }
  }
  j["pattern"]["closed"] = p.closed;

  j["planner"] = {{"theta_max_deg", s.planner.theta_max_deg},
                  {"step_mm", s.planner.step_mm},
                  {"ordering", ordering_name(s.planner.ordering)}};

  const TensionBlock& t = s.tension;
  j["tension"] = {{"iterations", t.cem.iterations},
                  {"population", t.cem.population},
                  {"elite_fraction", t.cem.elite_fraction},
                  {"smoothing", t.cem.smoothing},
                  {"inject_baseline", t.cem.inject_baseline},
                  {"d_max_mm", t.d_max_mm},
                  {"lambda", t.lambda},
                  {"settle_steps", t.episode.settle_steps},
                  {"radius_mm", t.episode.radius},
                  {"reward_tol_mm", t.episode.reward_tol_mm},
                  {"resolution", t.resolution}};

  j["grasp"] = {{"candidates", s.grasp.candidates}, {"margin_mm", s.grasp.margin_mm}};
  j["grasp"]["vertex"] = s.grasp.vertex ? json(*s.grasp.vertex) : json(nullptr);

  const PlatformDims& d = s.platform.dims;
  j["platform"] = {{"l1", d.l1},
                   {"l2", d.l2},
                   {"z_home", d.z_home},
                   {"l_ob", d.l_ob},
                   {"l_op", d.l_op},
                   {"theta_b", d.theta_b},
                   {"theta_p", d.theta_p},
                   {"servo_limit", d.servo_limit},
                   {"quantize", d.quantize},
                   {"quantum", d.quantum},
                   {"motion",
                    {{"axis", std::string(axis_name(s.platform.motion.axis))},
                     {"kind", kind_name(s.platform.motion.kind)},
                     {"amplitude", s.platform.motion.amplitude},
                     {"frequency", s.platform.motion.frequency}}},
                   {"duration_s", s.platform.duration_s},
                   {"dt", s.platform.dt}};
  j["platform"]["beta"] = d.beta ? json(*d.beta) : json(nullptr);

  const SyncBlock& y = s.sync;
  j["sync"] = {{"amplitude_mm", y.model.truth.amplitude},
               {"frequency_hz", y.model.truth.frequency},
               {"phase_s", y.model.truth.phase},
               {"sigma_freq_rel", y.model.sigma_freq_rel},
               {"sigma_phase_s", y.model.sigma_phase_s},
               {"latency_mean_s", y.model.latency_mean_s},
               {"latency_jitter_s", y.model.latency_jitter_s},
               {"controller", std::string(controller_name(y.controller.kind))},
               {"window_s", y.controller.window_s},
               {"trials", y.trials},
               {"path_duration_s", y.execution.path_duration_s},
               {"dt", y.execution.dt},
               {"latency_s", y.execution.latency_s},
               {"start_time_s", y.execution.start_time_s}};

  if (s.camera) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) {
      rows.push_back({s.camera->transform(i, 0), s.camera->transform(i, 1), s.camera->transform(i, 2)});
    }
    j["camera"] = {{"matrix", s.camera->matrix.string()}, {"samples", s.camera->samples.string()},
                   {"transform", rows}};
  } else {
    j["camera"] = nullptr;
  }
  return j;
}

std::uint64_t config_hash(const Scenario& s) {
  json j = to_json(s);
  // Paths differ between checkouts; hash what they point at instead.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  if (s.pattern.kind == PatternBlock::Kind::kFile) {
    h = fnv1a(h, read_text(s.pattern.file));
    j["pattern"]["file"] = s.pattern.file.filename().string();
  }
  if (s.camera) {
    h = fnv1a(h, read_text(s.camera->matrix));
    h = fnv1a(h, read_text(s.camera->samples));
    j["camera"]["matrix"] = s.camera->matrix.filename().string();
    j["camera"]["samples"] = s.camera->samples.filename().string();
  }
  j.erase("output");
  return fnv1a(h, j.dump());
}

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

std::uint64_t stage_seed(const Scenario& s, const char* stage) { return derive_seed(s.seed, stage); }

Cloth initial_cloth(const Scenario& s) {
  Cloth c = Cloth::gauze(s.cloth.pins, s.cloth.params, s.cloth.resolution);
  for (VertexId v : s.cloth.released) c.release_pin(v);
  c.step(s.cloth.settle_steps);
  if (!c.all_finite()) throw GeometryError("cloth diverged while settling");
  return c;
}

Pattern scenario_pattern(const Scenario& s) {
  const PatternBlock& p = s.pattern;
  switch (p.kind) {
    case PatternBlock::Kind::kCircle:
      return circle_pattern(p.diameter_mm, p.points);
    case PatternBlock::Kind::kFile: {
      Pattern pat = load_pattern(p.file);
      if (p.closed && !pat.closed) pat = make_pattern(pat.waypoints, true);
      return pat;
    }
    case PatternBlock::Kind::kPoints:
      return make_pattern(p.waypoints, p.closed);
  }
  throw ConfigError("pattern: unknown kind");
}

VertexId reference_grasp(const Cloth& cloth, const Pattern& pattern, double margin_mm) {
  const std::vector<Vec2> line = pattern.scaled(cloth.width());
  for (std::size_t v = 0; v < cloth.vertex_count(); ++v) {
    const auto id = static_cast<VertexId>(v);
    if (cloth.is_pinned(id) && point_polyline_distance(cloth.material(id), line, pattern.closed) > margin_mm) {
      return id;
    }
  }
  const auto eligible = eligible_vertices(cloth, pattern, margin_mm, cloth.width());
  if (eligible.empty()) throw ConfigError("no vertex lies clear of the pattern");
  return eligible.front();
}

EpisodeEnv make_env(const Scenario& s, const Cloth& state0, const CutTrajectory& trajectory, const Pattern& pattern,
                    VertexId grasp) {
  return EpisodeEnv(state0, trajectory, pattern, grasp, s.tension.episode, s.tension.d_max_mm, s.tension.resolution,
                    s.tension.lambda);
}

PlanOutput plan_stage(const Scenario& s, unsigned threads) {
  const Cloth cloth = initial_cloth(s);
  const Pattern pattern = scenario_pattern(s);
  PlanOutput out;
  out.notches = find_notches(pattern, s.planner.theta_max_deg * kDegToRad);
  const std::vector<Segment> segments = split_segments(pattern, out.notches);
  out.segment_count = segments.size();
  out.scoring_grasp = reference_grasp(cloth, pattern, s.grasp.margin_mm);

  const double extent = cloth.width();
  const OrderScorer scorer = [&](std::span<const DirectedSegment> order) {
    const CutTrajectory t = build_trajectory(segments, order, s.planner.step_mm, extent);
    const EpisodeEnv env = make_env(s, cloth, t, pattern, out.scoring_grasp);
    return -evaluate(no_tension(env.horizon()), env).score.normalized;
  };
  out.search = order_segments(segments, scorer, s.planner.ordering, threads);
  out.trajectory = build_trajectory(segments, out.search.best, s.planner.step_mm, extent);
  return out;
}

TrainOutput train_stage(const Scenario& s, const CutTrajectory& trajectory, VertexId grasp, unsigned threads) {
  const Cloth cloth = initial_cloth(s);
  const Pattern pattern = scenario_pattern(s);
  const EpisodeEnv env = make_env(s, cloth, trajectory, pattern, grasp);
  CemConfig cfg = s.tension.cem;
  cfg.seed = derive_seed(stage_seed(s, "train"), static_cast<std::uint64_t>(grasp));
  cfg.threads = threads;
  TrainOutput out;
  out.grasp = grasp;
  out.result = cem_train(env, cfg);
  out.policy = env.policy(out.result.best);
  return out;
}

GraspOutput grasp_stage(const Scenario& s, const CutTrajectory& trajectory, unsigned threads) {
  const Cloth cloth = initial_cloth(s);
  const Pattern pattern = scenario_pattern(s);
  GraspOutput out;
  out.candidates =
      sample_candidates(cloth, pattern, s.grasp.candidates, s.grasp.margin_mm, stage_seed(s, "grasp"), cloth.width());
  CemConfig cfg = s.tension.cem;
  cfg.seed = stage_seed(s, "train");
  cfg.threads = 1;
  const EnvFactory factory = [&](VertexId g) { return make_env(s, cloth, trajectory, pattern, g); };
  out.selection = select_grasp(out.candidates, factory, cfg, threads);
  return out;
}

ExecuteOutput execute_stage(const Scenario& s, const CutTrajectory& trajectory, const TensionPolicy& policy) {
  const Cloth cloth = initial_cloth(s);
  const Pattern pattern = scenario_pattern(s);
  const EpisodeEnv env = make_env(s, cloth, trajectory, pattern, policy.grasp);
  ExecuteOutput out;
  out.grasp = policy.grasp;
  out.episode = env.run(policy);
  out.trained = env.score(out.episode);
  out.baseline = evaluate(no_tension(env.horizon(), policy.grasp), env);
  return out;
}

BenchReport bench(const Scenario& s, int episodes, unsigned threads) {
  if (episodes < 1) throw ConfigError("bench: episodes must be >= 1");
  const Cloth cloth = initial_cloth(s);
  const Pattern pattern = scenario_pattern(s);
  const auto segments = split_segments(pattern, find_notches(pattern, s.planner.theta_max_deg * kDegToRad));
  const CutTrajectory trajectory =
      build_trajectory(segments, identity_order(segments.size()), s.planner.step_mm, cloth.width());
  const VertexId grasp = reference_grasp(cloth, pattern, s.grasp.margin_mm);
  const EpisodeEnv env = make_env(s, cloth, trajectory, pattern, grasp);
  const TensionPolicy policy = no_tension(env.horizon(), grasp);

  std::vector<std::size_t> cells(static_cast<std::size_t>(episodes));
  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(cells.size(), threads, [&](std::size_t i) { cells[i] = evaluate(policy, env).score.cells; });
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  BenchReport r;
  r.episodes = episodes;
  r.threads = threads;
  r.wall_s = wall;
  r.steps_per_episode = trajectory.size() * static_cast<std::size_t>(s.tension.episode.settle_steps);
  r.episodes_per_s = episodes / std::max(wall, 1e-12);
  r.steps_per_s = r.episodes_per_s * static_cast<double>(r.steps_per_episode);
  r.cells = cells.front();
  for (std::size_t c : cells) r.identical_scores = r.identical_scores && c == cells.front();
  return r;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void save_plan(const fs::path& dir, const PlanOutput& out) {
  std::ostringstream csv;
  write_trajectory_csv(csv, out.trajectory);
  write_text(dir / "trajectory.csv", csv.str());
  json order = json::array();
  for (const DirectedSegment& d : out.search.best) order.push_back({{"segment", d.index}, {"reversed", d.reversed}});
  write_json(dir / "plan.json", {{"segments", out.segment_count},
                                 {"notches", out.notches},
                                 {"waypoints", out.trajectory.size()},
                                 {"order", order},
                                 {"orderings_evaluated", out.search.evaluated},
                                 {"best_order_score", out.search.best_score},
                                 {"worst_order_score", out.search.worst_score},
                                 {"scoring_grasp", out.scoring_grasp}});
}

CutTrajectory load_trajectory(const fs::path& dir) {
  const fs::path p = dir / "trajectory.csv";
  if (!fs::exists(p)) throw ConfigError("missing " + p.string() + " (run `plan` first)");
  std::istringstream in(read_text(p));
  return read_trajectory_csv(in);
}

void save_grasp(const fs::path& dir, const GraspOutput& out) {
  std::ostringstream csv;
  write_grasp_reports_csv(csv, out.selection.reports);
  write_text(dir / "grasp_reports.csv", csv.str());
  const GraspCandidateReport& b = out.selection.best;
  write_json(dir / "grasp.json", {{"candidates", out.candidates},
                                  {"best_vertex", b.vertex},
                                  {"best_material_mm", {b.material.x(), b.material.y()}},
                                  {"best", evaluation_json(b.evaluation)}});
}

VertexId load_grasp_choice(const fs::path& dir) {
  const fs::path p = dir / "grasp.json";
  if (!fs::exists(p)) throw ConfigError("missing " + p.string() + " (run `grasp` first or set grasp.vertex)");
  const json j = json::parse(read_text(p));
  return j.at("best_vertex").get<VertexId>();
}

void save_train(const fs::path& dir, const TrainOutput& out) {
  std::ostringstream pol, log;
  write_policy(pol, out.policy);
  write_training_log_csv(log, out.result.log);
  write_text(dir / "policy.txt", pol.str());
  write_text(dir / "training_log.csv", log.str());
}

TensionPolicy load_policy(const fs::path& dir) {
  const fs::path p = dir / "policy.txt";
  if (!fs::exists(p)) throw ConfigError("missing " + p.string() + " (run `train` first)");
  std::istringstream in(read_text(p));
  return read_policy(in);
}

void save_execute(const fs::path& dir, const ExecuteOutput& out) {
  std::ostringstream csv;
  write_episode_csv(csv, out.episode);
  write_text(dir / "episode.csv", csv.str());
  write_json(dir / "score.json", {{"grasp", out.grasp},
                                  {"trained", evaluation_json(out.trained)},
                                  {"no_tension", evaluation_json(out.baseline)},
                                  {"cuts", out.episode.events.size()}});
}

void write_manifest(const fs::path& dir, const std::string& command, const Scenario& s, unsigned threads,
                    const std::vector<std::string>& artifacts, double wall_s) {
  write_json(dir / ("manifest-" + command + ".json"), {{"command", command},
                                                       {"scenario", s.name},
                                                       {"config_hash", hex64(config_hash(s))},
                                                       {"seed", s.seed},
                                                       {"version", kVersion},
                                                       {"compiler", __VERSION__},
                                                       {"threads", threads},
                                                       {"artifacts", artifacts},
                                                       {"finished_utc", utc_now()},
                                                       {"wall_s", wall_s}});
}

void write_error(const fs::path& dir, const std::string& command, const std::string& kind,
                 const std::string& message) {
  write_json(dir / "error.json", {{"command", command}, {"error", kind}, {"message", message}, {"version", kVersion}});
}

}  // namespace gauzecut::harness
