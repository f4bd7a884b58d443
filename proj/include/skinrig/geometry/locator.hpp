#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "skinrig/geometry/mesh.hpp"

namespace skinrig::geometry {

struct ClosestPoint {
  Vec3 point;
  std::uint32_t triangle = 0;
  double distance = 0.0;
};

/// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c);

/// Uniform-grid accelerated closest-point queries on a fixed mesh. Holds a
/// reference to the surface, which must outlive the locator.
class TriangleLocator {
 public:
  TriangleLocator(const LinkSurface& surface, double cell_size);

  /// Exact closest point over the whole mesh. Searches grid shells outward
  /// and stops once no unvisited shell can hold a closer triangle.
  ClosestPoint closest(const Vec3& p) const;

  const LinkSurface& surface() const { return surface_; }

 private:
  using Key = std::int64_t;
  Key key(long ix, long iy, long iz) const;
  std::array<long, 3> cell_of(const Vec3& p) const;

  const LinkSurface& surface_;
  double cell_;
  Vec3 lo_;
  std::array<long, 3> dims_{};
  std::unordered_map<Key, std::vector<std::uint32_t>> cells_;
};

}  // namespace skinrig::geometry
