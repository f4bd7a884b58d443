#pragma once

#include <optional>
#include <vector>

#include "skinrig/geometry/mesh.hpp"

namespace skinrig::geometry {

struct SurfaceHit {
  Vec3 point;
  Vec3 normal;  // outward face normal
  std::uint32_t triangle = 0;
};

/// Cylindrical (u, v) coordinates on the lateral part of a link surface.
///
/// u = angle around the axis / 2π, measured from reference_direction(axis),
/// v = normalized axial coordinate over the lateral extent. Both lie in
/// [0, 1]; u wraps.
class CylindricalChart {
 public:
  explicit CylindricalChart(const LinkSurface& surface);

  /// (u, v) of an arbitrary point (no projection onto the mesh).
  std::pair<double, double> param_of(const Vec3& p) const;

  /// Outermost lateral-surface point on the ray leaving the axis at height v
  /// in direction u. Empty if the ray misses the mesh.
  std::optional<SurfaceHit> surface_at(double u, double v) const;

  const Vec3& axis() const { return axis_; }
  const Vec3& origin() const { return origin_; }
  const Vec3& e1() const { return e1_; }
  const Vec3& e2() const { return e2_; }
  double t_min() const { return tmin_; }
  double t_max() const { return tmax_; }
  const LinkSurface& lateral() const { return lateral_; }

 private:
  std::size_t bucket(int bu, int bv) const { return static_cast<std::size_t>(bv) * nu_ + bu; }

  LinkSurface lateral_;
  Vec3 axis_, origin_, e1_, e2_;
  double tmin_ = 0.0, tmax_ = 1.0;
  int nu_ = 1, nv_ = 1;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

/// Dense grid of surface points laid out in chart coordinates. Point (i, j)
/// sits at u = (i + 0.5)/cols, v = (j + 0.5)/rows; `area` is the patch
/// area it represents. Cells whose ray misses the mesh are marked invalid.
struct SurfaceGrid {
  int cols = 0;
  int rows = 0;
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<double> area;
  std::vector<bool> valid;

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * cols + i; }
};

SurfaceGrid make_surface_grid(const CylindricalChart& chart, int cols, int rows);

/// Surface points at the centers of a perfect cols x rows lattice in chart
/// coordinates, ordered row-major (id = row * cols + col).
std::vector<Vec3> grid_cell_centers(const CylindricalChart& chart, int cols, int rows);

}  // namespace skinrig::geometry
