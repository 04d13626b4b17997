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

#include "gauzecut/cloth.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

// The step kernels get an AVX2 clone picked at load time. Contraction stays
// off and sqrt/div are correctly rounded, so both clones agree bit for bit.
#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__)
#define GAUZECUT_KERNEL __attribute__((target_clones("avx2", "default")))
#else
#define GAUZECUT_KERNEL
#endif

namespace gauzecut {

void ClothParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("cloth: alpha must be in (0, 1]");
  if (!(delta >= 0.0)) throw ConfigError("cloth: delta must be >= 0");
  if (!(tau > 0.0)) throw ConfigError("cloth: tau must be > 0");
  if (!(dt > 0.0)) throw ConfigError("cloth: dt must be > 0");
  if (constraint_iterations < 1) throw ConfigError("cloth: constraint_iterations must be >= 1");
  if (!gravity.allFinite()) throw ConfigError("cloth: gravity must be finite");
}

Cloth Cloth::make(int rows, int cols, double spacing, const PinSpec& pins,
                  const ClothParams& params) {
  if (rows < 2 || cols < 2) throw ConfigError("cloth: mesh needs at least 2x2 vertices");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("cloth: spacing must be > 0");
  params.validate();

  Cloth c;
  c.rows_ = rows;
  c.cols_ = cols;
  c.n_ = static_cast<std::size_t>(rows) * cols;
  c.pad_ = static_cast<std::size_t>(cols) + 2;
  c.spacing_ = spacing;
  c.params_ = params;

  const std::size_t total = c.n_ + 2 * c.pad_;
  for (int k = 0; k < 3; ++k) {
    c.pos_[k].assign(total, 0.0);
    c.acc_[k].assign(total, 0.0);
  }
  c.free_.assign(total, 0.0);
  c.material_.resize(c.n_);
  c.pin_target_.resize(c.n_);
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < cols; ++k) {
      const VertexId v = c.vertex(r, k);
      c.material_[v] = Vec2(k * spacing, r * spacing);
      c.pos_[0][c.padded(v)] = k * spacing;
      c.pos_[1][c.padded(v)] = r * spacing;
      c.free_[c.padded(v)] = 1.0;
      c.pin_target_[v] = Vec3(k * spacing, r * spacing, 0.0);
    }
  }
  c.prev_ = c.pos_;

  const auto C = static_cast<std::ptrdiff_t>(cols);
  c.families_.resize(params.shear_diagonals ? 4 : 2);
  c.families_[0].b_off = 1;      // horizontal
  c.families_[1].b_off = C;      // vertical
  if (params.shear_diagonals) {
    c.families_[2].b_off = C + 1;  // (r, k) - (r+1, k+1)
    c.families_[3].a_off = 1;      // (r, k+1) - (r+1, k)
    c.families_[3].b_off = C;
  }
  for (auto& f : c.families_) {
    f.rest.assign(total, 0.0);
    f.active.assign(total, 0.0);
    f.constraint_index.assign(c.n_, -1);
    f.wa.assign(total, 0.0);
    f.wb.assign(total, 0.0);
    for (auto& e : f.e) e.assign(total, 0.0);
  }

  auto add = [&](std::uint8_t family, VertexId slot) {
    Family& f = c.families_[family];
    const auto a = static_cast<VertexId>(slot + f.a_off);
    const auto b = static_cast<VertexId>(slot + f.b_off);
    const double rest = (c.pin_target_[b] - c.pin_target_[a]).norm();
    f.rest[c.padded(slot)] = rest;
    f.active[c.padded(slot)] = 1.0;
    f.constraint_index[slot] = static_cast<std::int32_t>(c.constraints_.size());
    c.constraints_.push_back({a, b, rest, false});
    c.constraint_slot_.emplace_back(family, slot);
  };
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < cols; ++k) {
      const VertexId v = c.vertex(r, k);
      if (k + 1 < cols) add(0, v);
      if (r + 1 < rows) add(1, v);
      if (params.shear_diagonals && r + 1 < rows && k + 1 < cols) {
        add(2, v);
        add(3, v);
      }
    }
  }

  std::vector<std::uint32_t> degree(c.n_, 0);
  for (const auto& con : c.constraints_) {
    ++degree[con.a];
    ++degree[con.b];
  }
  c.incident_offset_.assign(c.n_ + 1, 0);
  for (std::size_t v = 0; v < c.n_; ++v) c.incident_offset_[v + 1] = c.incident_offset_[v] + degree[v];
  c.incident_.resize(c.incident_offset_[c.n_]);
  std::vector<std::uint32_t> fill(c.incident_offset_.begin(), c.incident_offset_.end() - 1);
  for (std::uint32_t i = 0; i < c.constraints_.size(); ++i) {
    c.incident_[fill[c.constraints_[i].a]++] = i;
    c.incident_[fill[c.constraints_[i].b]++] = i;
  }

  auto pin = [&](VertexId v) {
    if (v >= c.n_) throw ConfigError("cloth: pinned vertex " + std::to_string(v) + " out of range");
    c.free_[c.padded(v)] = 0.0;
  };
  switch (pins.layout) {
    case PinLayout::kNone:
      break;
    case PinLayout::kCorners:
      pin(c.vertex(0, 0));
      pin(c.vertex(0, cols - 1));
      pin(c.vertex(rows - 1, 0));
      pin(c.vertex(rows - 1, cols - 1));
      break;
    case PinLayout::kBoundary:
      for (int r = 0; r < rows; ++r) {
        for (int k = 0; k < cols; ++k) {
          if (r == 0 || k == 0 || r == rows - 1 || k == cols - 1) pin(c.vertex(r, k));
        }
      }
      break;
    case PinLayout::kAll:
      for (std::size_t v = 0; v < c.n_; ++v) pin(static_cast<VertexId>(v));
      break;
  }
  for (VertexId v : pins.extra) pin(v);
  c.weights_dirty_ = true;
  return c;
}

Cloth Cloth::gauze(const PinSpec& pins, const ClothParams& params, int resolution) {
  if (resolution < 2) throw ConfigError("cloth: resolution must be >= 2");
  return make(resolution, resolution, kGauzeSideMm / (resolution - 1), pins, params);
}

VertexId Cloth::vertex(int row, int col) const {
  return static_cast<VertexId>(row * cols_ + col);
}

std::pair<int, int> Cloth::row_col(VertexId v) const {
  return {static_cast<int>(v) / cols_, static_cast<int>(v) % cols_};
}

Vec3 Cloth::position(VertexId v) const {
  const std::size_t i = padded(v);
  if (v >= n_) throw ConfigError("cloth: vertex " + std::to_string(v) + " out of range");
  return {pos_[0][i], pos_[1][i], pos_[2][i]};
}

Vec3 Cloth::prev_position(VertexId v) const {
  const std::size_t i = padded(v);
  if (v >= n_) throw ConfigError("cloth: vertex " + std::to_string(v) + " out of range");
  return {prev_[0][i], prev_[1][i], prev_[2][i]};
}

std::vector<Vec3> Cloth::positions() const {
  std::vector<Vec3> out(n_);
  for (std::size_t v = 0; v < n_; ++v) {
    const std::size_t i = v + pad_;
    out[v] = Vec3(pos_[0][i], pos_[1][i], pos_[2][i]);
  }
  return out;
}

std::span<const std::uint32_t> Cloth::incident(VertexId v) const {
  return std::span<const std::uint32_t>(incident_).subspan(
      incident_offset_.at(v), incident_offset_[v + 1] - incident_offset_[v]);
}

bool Cloth::is_pinned(VertexId v) const {
  if (v >= n_) throw ConfigError("cloth: vertex " + std::to_string(v) + " out of range");
  return free_[padded(v)] == 0.0;
}

void Cloth::refresh_weights() {
  std::vector<double> count(n_, 0.0);
  for (const Constraint& c : constraints_) {
    if (c.cut) continue;
    count[c.a] += 1.0;
    count[c.b] += 1.0;
  }
  for (auto& f : families_) {
    std::fill(f.wa.begin(), f.wa.end(), 0.0);
    std::fill(f.wb.begin(), f.wb.end(), 0.0);
  }
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const Constraint& c = constraints_[i];
    if (c.cut) continue;
    const bool fa = !is_pinned(c.a);
    const bool fb = !is_pinned(c.b);
    const double share = (fa && fb) ? 0.5 : 1.0;
    auto [family, slot] = constraint_slot_[i];
    Family& f = families_[family];
    if (fa) f.wa[padded(slot)] = share / count[c.a];
    if (fb) f.wb[padded(slot)] = share / count[c.b];
  }
  weights_dirty_ = false;
}

namespace {

// For every slot i: e_i = factor * active_i * (|b - a| - rest_i) / |b - a| * (b - a).
GAUZECUT_KERNEL void edge_vectors(const double* __restrict xa, const double* __restrict ya,
                  const double* __restrict za, const double* __restrict xb,
                  const double* __restrict yb, const double* __restrict zb,
                  const double* __restrict rest, const double* __restrict active,
                  double* __restrict ex, double* __restrict ey, double* __restrict ez,
                  std::size_t begin, std::size_t end, double factor) {
  for (std::size_t i = begin; i < end; ++i) {
    const double dx = xb[i] - xa[i];
    const double dy = yb[i] - ya[i];
    const double dz = zb[i] - za[i];
    const double len = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double safe = len > 1e-12 ? len : 1e-12;
    const double s = factor * active[i] * (len - rest[i]) / safe;
    ex[i] = s * dx;
    ey[i] = s * dy;
    ez[i] = s * dz;
  }
}

}  // namespace

GAUZECUT_KERNEL void Cloth::compute_edges(Family& f, double factor) {
  const double* x = pos_[0].data();
  const double* y = pos_[1].data();
  const double* z = pos_[2].data();
  edge_vectors(x + f.a_off, y + f.a_off, z + f.a_off, x + f.b_off, y + f.b_off, z + f.b_off,
               f.rest.data(), f.active.data(), f.e[0].data(), f.e[1].data(), f.e[2].data(),
               pad_, pad_ + n_, factor);
}

GAUZECUT_KERNEL void Cloth::integrate() {
  const std::size_t begin = pad_;
  const std::size_t end = pad_ + n_;
  for (int k = 0; k < 3; ++k) std::fill(acc_[k].begin() + begin, acc_[k].begin() + end, params_.gravity[k]);

  const double spring = params_.tau * (1.0 - params_.delta);
  for (Family& f : families_) {
    compute_edges(f, spring);
    for (int k = 0; k < 3; ++k) {
      double* __restrict acc = acc_[k].data();
      const double* __restrict e = f.e[k].data();
      const std::ptrdiff_t ao = f.a_off;
      const std::ptrdiff_t bo = f.b_off;
      for (std::size_t i = begin; i < end; ++i) acc[i] += e[i - ao] - e[i - bo];
    }
  }

  const double alpha = params_.alpha;
  const double dt2 = params_.dt * params_.dt;
  for (int k = 0; k < 3; ++k) {
    double* __restrict p = pos_[k].data();
    double* __restrict q = prev_[k].data();
    const double* __restrict a = acc_[k].data();
    const double* __restrict fr = free_.data();
    for (std::size_t i = begin; i < end; ++i) {
      const double cur = p[i];
      p[i] = cur + fr[i] * (alpha * (cur - q[i]) + dt2 * a[i]);
      q[i] = cur;
    }
  }
  for (std::size_t v = 0; v < n_; ++v) {
    const std::size_t i = v + pad_;
    if (free_[i] == 0.0) {
      pos_[0][i] = pin_target_[v].x();
      pos_[1][i] = pin_target_[v].y();
      pos_[2][i] = pin_target_[v].z();
    }
  }
}

GAUZECUT_KERNEL void Cloth::relax() {
  if (weights_dirty_) refresh_weights();
  const std::size_t begin = pad_;
  const std::size_t end = pad_ + n_;
  for (int it = 0; it < params_.constraint_iterations; ++it) {
    for (int k = 0; k < 3; ++k) std::fill(acc_[k].begin() + begin, acc_[k].begin() + end, 0.0);
    for (Family& f : families_) {
      compute_edges(f, 1.0);
      for (int k = 0; k < 3; ++k) {
        double* __restrict corr = acc_[k].data();
        const double* __restrict e = f.e[k].data();
        const double* __restrict wa = f.wa.data();
        const double* __restrict wb = f.wb.data();
        const std::ptrdiff_t ao = f.a_off;
        const std::ptrdiff_t bo = f.b_off;
        for (std::size_t i = begin; i < end; ++i) {
          corr[i] += wa[i - ao] * e[i - ao] - wb[i - bo] * e[i - bo];
        }
      }
    }
    for (int k = 0; k < 3; ++k) {
      double* __restrict p = pos_[k].data();
      const double* __restrict corr = acc_[k].data();
      for (std::size_t i = begin; i < end; ++i) p[i] += corr[i];
    }
  }
}

void Cloth::step() {
  integrate();
  relax();
}

void Cloth::step(int count) {
  for (int i = 0; i < count; ++i) step();
}

void Cloth::set_pin(VertexId v, const Vec3& point) {
  if (v >= n_) throw ConfigError("cloth: vertex " + std::to_string(v) + " out of range");
  if (free_[padded(v)] != 0.0) {
    free_[padded(v)] = 0.0;
    weights_dirty_ = true;
  }
  pin_target_[v] = point;
}

void Cloth::release_pin(VertexId v) {
  if (v >= n_) throw ConfigError("cloth: vertex " + std::to_string(v) + " out of range");
  if (free_[padded(v)] == 0.0) {
    free_[padded(v)] = 1.0;
    weights_dirty_ = true;
  }
}

std::vector<std::pair<VertexId, Vec3>> Cloth::pins() const {
  std::vector<std::pair<VertexId, Vec3>> out;
  for (std::size_t v = 0; v < n_; ++v) {
    if (free_[v + pad_] == 0.0) out.emplace_back(static_cast<VertexId>(v), pin_target_[v]);
  }
  return out;
}

double Cloth::kinetic_energy() const {
  double sum = 0.0;
  for (std::size_t v = 0; v < n_; ++v) {
    const std::size_t i = v + pad_;
    if (free_[i] == 0.0) continue;
    for (int k = 0; k < 3; ++k) {
      const double d = pos_[k][i] - prev_[k][i];
      sum += d * d;
    }
  }
  return sum / (2.0 * params_.dt * params_.dt);
}

bool Cloth::cut_constraint(std::size_t index) {
  Constraint& c = constraints_.at(index);
  if (c.cut) return false;
  c.cut = true;
  auto [family, slot] = constraint_slot_[index];
  families_[family].active[padded(slot)] = 0.0;
  weights_dirty_ = true;
  return true;
}

int Cloth::cut_degree(VertexId v) const {
  int count = 0;
  for (std::uint32_t i : incident(v)) count += constraints_[i].cut;
  return count;
}

std::size_t Cloth::cut_count() const {
  return static_cast<std::size_t>(
      std::count_if(constraints_.begin(), constraints_.end(), [](const Constraint& c) { return c.cut; }));
}

bool Cloth::all_finite() const {
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = pad_; i < pad_ + n_; ++i) {
      if (!std::isfinite(pos_[k][i])) return false;
    }
  }
  return true;
}

void write_snapshot_csv(std::ostream& out, const Cloth& cloth) {
  out << "vertex_id,x,y,z,cut_degree\n";
  for (std::size_t v = 0; v < cloth.vertex_count(); ++v) {
    const Vec3 p = cloth.position(static_cast<VertexId>(v));
    out << v << ',' << p.x() << ',' << p.y() << ',' << p.z() << ','
        << cloth.cut_degree(static_cast<VertexId>(v)) << '\n';
  }
}

void write_frame_pgm(std::ostream& out, const Cloth& cloth, int resolution) {
  if (resolution < 2) throw ConfigError("frame: resolution must be >= 2");
  const std::vector<Vec3> pos = cloth.positions();
  double zmin = 0.0, zmax = 0.0;
  for (const Vec3& p : pos) {
    zmin = std::min(zmin, p.z());
    zmax = std::max(zmax, p.z());
  }
  const double side = std::max(cloth.width(), cloth.height());
  const double margin = 0.1 * side;
  const double extent = side + 2.0 * margin;
  const double zspan = std::max(zmax - zmin, 1e-9);

  std::vector<std::uint8_t> image(static_cast<std::size_t>(resolution) * resolution, 0);
  auto to_pixel = [&](const Vec3& p) {
    return Vec2((p.x() + margin) / extent * (resolution - 1), (p.y() + margin) / extent * (resolution - 1));
  };
  for (const Constraint& c : cloth.constraints()) {
    if (c.cut) continue;
    const Vec2 a = to_pixel(pos[c.a]);
    const Vec2 b = to_pixel(pos[c.b]);
    const double za = pos[c.a].z(), zb = pos[c.b].z();
    const int samples = static_cast<int>(std::ceil((b - a).norm())) + 1;
    for (int s = 0; s <= samples; ++s) {
      const double t = static_cast<double>(s) / samples;
      const Vec2 q = a + t * (b - a);
      const auto px = static_cast<int>(std::lround(q.x()));
      const auto py = static_cast<int>(std::lround(q.y()));
      if (px < 0 || py < 0 || px >= resolution || py >= resolution) continue;
      const double zz = za + t * (zb - za);
      const auto shade = static_cast<std::uint8_t>(55.0 + 200.0 * (zz - zmin) / zspan);
      image[static_cast<std::size_t>(py) * resolution + px] = shade;
    }
  }
  out << "P5\n" << resolution << ' ' << resolution << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
}

}  // namespace gauzecut
