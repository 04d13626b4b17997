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

// Fixed-step mass-spring cloth over a rectangular vertex grid.
//
// Each free vertex follows damped Verlet integration
//
//   p' = p + alpha * (p - p_prev) + a * dt^2
//   a  = gravity + sum over uncut neighbours q of
//        tau * (|q - p| - rest) * unit(q - p) * (1 - delta)
//
// followed by `constraint_iterations` rounds of Jacobi positional relaxation
// toward rest lengths (each free vertex moves by the mean of its constraint
// corrections; pinned endpoints take no correction). Pinned vertices are held
// exactly at their pin point. Units are millimetres and simulation steps.
//
// Storage is structure-of-arrays with constraints grouped into edge families
// (horizontal, vertical and optionally the two shear diagonals), each indexed
// by its first vertex and padded so the inner loops run branch-free.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "gauzecut/common.hpp"

namespace gauzecut {

/// Default gravity magnitude in mm/step^2.
inline constexpr double kDefaultGravity = 0.02;

struct ClothParams {
  double alpha = 0.99;   // velocity retention
  double delta = 0.008;  // spring-force damping
  double tau = 1.0;      // spring stiffness
  Vec3 gravity{0.0, 0.0, -kDefaultGravity};
  double dt = 1.0;
  int constraint_iterations = 3;
  bool shear_diagonals = false;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

enum class PinLayout { kNone, kCorners, kBoundary, kAll };

struct PinSpec {
  PinLayout layout = PinLayout::kCorners;
  std::vector<VertexId> extra;  // additional vertices pinned at rest
};

struct Constraint {
  VertexId a = 0;
  VertexId b = 0;
  double rest_length = 0.0;
  bool cut = false;
};

class Cloth {
 public:
  /// Empty cloth with no vertices; use make() or gauze().
  Cloth() = default;

  /// Flat mesh in the z = 0 plane with zero initial velocity. Vertex
  /// (row, col) has id row * cols + col, material coordinate
  /// (col * spacing, row * spacing) and starts at that point in the world.
  static Cloth make(int rows, int cols, double spacing, const PinSpec& pins,
                    const ClothParams& params = {});

  /// Gauze mesh of resolution^2 vertices spanning the 4 inch square.
  static Cloth gauze(const PinSpec& pins, const ClothParams& params = {},
                     int resolution = 25);

  void step();
  void step(int count);

  void set_pin(VertexId v, const Vec3& point);
  void release_pin(VertexId v);
  bool is_pinned(VertexId v) const;
  std::vector<std::pair<VertexId, Vec3>> pins() const;

  /// Sum of |p - p_prev|^2 / (2 dt^2) over unpinned vertices.
  double kinetic_energy() const;

  /// Marks constraint `index` cut. Returns false if it already was.
  bool cut_constraint(std::size_t index);
  int cut_degree(VertexId v) const;
  std::size_t cut_count() const;

  bool all_finite() const;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double spacing() const { return spacing_; }
  double width() const { return (cols_ - 1) * spacing_; }
  double height() const { return (rows_ - 1) * spacing_; }
  std::size_t vertex_count() const { return n_; }
  VertexId vertex(int row, int col) const;
  std::pair<int, int> row_col(VertexId v) const;

  const ClothParams& params() const { return params_; }
  Vec3 position(VertexId v) const;
  Vec3 prev_position(VertexId v) const;
  std::vector<Vec3> positions() const;
  const Vec2& material(VertexId v) const { return material_.at(v); }
  std::span<const Vec2> material_coords() const { return material_; }
  std::span<const Constraint> constraints() const { return constraints_; }

  /// Constraint indices incident to v.
  std::span<const std::uint32_t> incident(VertexId v) const;

 private:
  // Constraints of one family join vertex (e + a_off) to (e + b_off) for
  // every edge slot e in [0, n); absent slots carry zero weight.
  struct Family {
    std::ptrdiff_t a_off = 0;
    std::ptrdiff_t b_off = 0;
    std::vector<double> rest;
    std::vector<double> active;  // 1 uncut, 0 cut or absent
    std::vector<std::int32_t> constraint_index;  // -1 for absent slots
    std::vector<double> wa;  // relaxation weight on endpoint a (pre-divided)
    std::vector<double> wb;
    std::array<std::vector<double>, 3> e;  // per-slot edge vector scratch
  };

  void integrate();
  void relax();
  void refresh_weights();
  void compute_edges(Family& f, double scale_by_spring);
  std::size_t padded(VertexId v) const { return static_cast<std::size_t>(v) + pad_; }

  int rows_ = 0;
  int cols_ = 0;
  std::size_t n_ = 0;
  std::size_t pad_ = 0;
  double spacing_ = 0.0;
  ClothParams params_;

  // Padded coordinate arrays: vertex v lives at index v + pad_.
  std::array<std::vector<double>, 3> pos_;
  std::array<std::vector<double>, 3> prev_;
  std::array<std::vector<double>, 3> acc_;
  std::vector<double> free_;  // 1 free, 0 pinned
  std::vector<Vec3> pin_target_;

  std::vector<Vec2> material_;
  std::vector<Constraint> constraints_;
  std::vector<std::pair<std::uint8_t, std::uint32_t>> constraint_slot_;  // family, slot
  std::vector<Family> families_;
  bool weights_dirty_ = true;

  std::vector<std::uint32_t> incident_offset_;
  std::vector<std::uint32_t> incident_;
};

/// One row per vertex: vertex_id,x,y,z,cut_degree.
void write_snapshot_csv(std::ostream& out, const Cloth& cloth);

/// Top-down orthographic grayscale render (binary PGM). Uncut constraints are
/// drawn as segments shaded by height.
void write_frame_pgm(std::ostream& out, const Cloth& cloth, int resolution);

}  // namespace gauzecut
