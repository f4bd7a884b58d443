#include "skinrig/geometry/locator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skinrig::geometry {

// Ericson, Real-Time Collision Detection, 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

TriangleLocator::TriangleLocator(const LinkSurface& surface, double cell_size)
    : surface_(surface), cell_(cell_size) {
  Vec3 lo = surface.vertices.front();
  Vec3 hi = lo;
  for (const auto& v : surface.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  lo_ = lo;
  for (int i = 0; i < 3; ++i) {
    dims_[i] = static_cast<long>(std::floor((hi[i] - lo[i]) / cell_)) + 1;
  }
  for (std::uint32_t t = 0; t < surface.triangles.size(); ++t) {
    Vec3 tlo = surface.vertices[surface.triangles[t][0]];
    Vec3 thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo = tlo.cwiseMin(surface.vertices[surface.triangles[t][k]]);
      thi = thi.cwiseMax(surface.vertices[surface.triangles[t][k]]);
    }
    const auto a = cell_of(tlo);
    const auto b = cell_of(thi);
    for (long x = a[0]; x <= b[0]; ++x)
      for (long y = a[1]; y <= b[1]; ++y)
        for (long z = a[2]; z <= b[2]; ++z) cells_[key(x, y, z)].push_back(t);
  }
}

TriangleLocator::Key TriangleLocator::key(long ix, long iy, long iz) const {
  return (static_cast<Key>(ix) * (dims_[1] + 1) + iy) * (dims_[2] + 1) + iz;
}

std::array<long, 3> TriangleLocator::cell_of(const Vec3& p) const {
  std::array<long, 3> c{};
  for (int i = 0; i < 3; ++i) {
    c[i] = std::clamp(static_cast<long>(std::floor((p[i] - lo_[i]) / cell_)), 0L,
                      dims_[i] - 1);
  }
  return c;
}

ClosestPoint TriangleLocator::closest(const Vec3& p) const {
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  const auto c = cell_of(p);
  // distance from p to the clamped grid box, so points outside still work
  Vec3 box_hi = lo_ + cell_ * Vec3(dims_[0], dims_[1], dims_[2]);
  const double outside = (p - p.cwiseMax(lo_).cwiseMin(box_hi)).norm();
  const long max_ring = std::max({dims_[0], dims_[1], dims_[2]});
  for (long ring = 0; ring <= max_ring; ++ring) {
    // every triangle in an unvisited shell is at least this far away
    const double shell_min = std::max(outside, (ring - 1) * cell_);
    if (ring > 0 && shell_min > best.distance) break;
    for (long x = c[0] - ring; x <= c[0] + ring; ++x) {
      if (x < 0 || x >= dims_[0]) continue;
      for (long y = c[1] - ring; y <= c[1] + ring; ++y) {
        if (y < 0 || y >= dims_[1]) continue;
        for (long z = c[2] - ring; z <= c[2] + ring; ++z) {
          if (z < 0 || z >= dims_[2]) continue;
          const long cheb = std::max({std::abs(x - c[0]), std::abs(y - c[1]),
                                      std::abs(z - c[2])});
          if (cheb != ring) continue;
          auto it = cells_.find(key(x, y, z));
          if (it == cells_.end()) continue;
          for (auto t : it->second) {
            const auto& tri = surface_.triangles[t];
            const Vec3 q = closest_point_on_triangle(p, surface_.vertices[tri[0]],
                                                     surface_.vertices[tri[1]],
                                                     surface_.vertices[tri[2]]);
            const double d = (q - p).norm();
            if (d < best.distance || (d == best.distance && t < best.triangle)) {
              best = {q, t, d};
            }
          }
        }
      }
    }
  }
  return best;
}

}  // namespace skinrig::geometry
