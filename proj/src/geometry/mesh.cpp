#include "skinrig/geometry/mesh.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "skinrig/errors.hpp"

namespace skinrig::geometry {

void validate(const LinkSurface& surface) {
  if (surface.vertices.empty() || surface.triangles.empty()) {
    throw InvalidSurfaceError("surface has no vertices or no triangles");
  }
  const auto n = surface.vertices.size();
  for (const auto& tri : surface.triangles) {
    for (auto idx : tri) {
      if (idx >= n) throw InvalidSurfaceError("triangle index out of range");
    }
  }
  if (std::abs(surface.axis.norm() - 1.0) > 1e-9) {
    throw InvalidSurfaceError("surface axis is not unit norm");
  }
}

Vec3 face_normal(const LinkSurface& surface, std::size_t tri) {
  const auto& t = surface.triangles[tri];
  const Vec3& a = surface.vertices[t[0]];
  const Vec3 n = (surface.vertices[t[1]] - a).cross(surface.vertices[t[2]] - a);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double face_area(const LinkSurface& surface, std::size_t tri) {
  const auto& t = surface.triangles[tri];
  const Vec3& a = surface.vertices[t[0]];
  return 0.5 * (surface.vertices[t[1]] - a).cross(surface.vertices[t[2]] - a).norm();
}

double surface_area(const LinkSurface& surface) {
  double total = 0.0;
  for (std::size_t i = 0; i < surface.triangles.size(); ++i) total += face_area(surface, i);
  return total;
}

LinkSurface scaled(const LinkSurface& surface, double s) {
  LinkSurface out = surface;
  for (auto& v : out.vertices) v *= s;
  out.origin *= s;
  return out;
}

bool is_cap_face(const LinkSurface& surface, std::size_t tri, double cap_cos) {
  return std::abs(face_normal(surface, tri).dot(surface.axis)) > cap_cos;
}

LinkSurface lateral_part(const LinkSurface& surface, double cap_cos) {
  LinkSurface out;
  out.axis = surface.axis;
  out.origin = surface.origin;
  std::vector<std::int64_t> remap(surface.vertices.size(), -1);
  for (std::size_t i = 0; i < surface.triangles.size(); ++i) {
    if (is_cap_face(surface, i, cap_cos)) continue;
    Triangle t{};
    for (int k = 0; k < 3; ++k) {
      const auto src = surface.triangles[i][k];
      if (remap[src] < 0) {
        remap[src] = static_cast<std::int64_t>(out.vertices.size());
        out.vertices.push_back(surface.vertices[src]);
      }
      t[k] = static_cast<std::uint32_t>(remap[src]);
    }
    out.triangles.push_back(t);
  }
  return out;
}

Vec3 reference_direction(const Vec3& axis) {
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(axis[i]) < std::abs(axis[best])) best = i;
  }
  Vec3 basis = Vec3::Unit(best);
  Vec3 e1 = basis - basis.dot(axis) * axis;
  return e1.normalized();
}

LinkSurface make_revolved(const RadiusProfile& radius, double t0, double t1,
                          int segments, int rings, bool capped, const Vec3& axis,
                          const Vec3& origin) {
  LinkSurface s;
  s.axis = axis.normalized();
  s.origin = origin;
  const Vec3 e1 = reference_direction(s.axis);
  const Vec3 e2 = s.axis.cross(e1);
  const auto ring_count = static_cast<std::uint32_t>(rings + 1);
  const auto seg = static_cast<std::uint32_t>(segments);
  for (std::uint32_t k = 0; k < ring_count; ++k) {
    const double t = t0 + (t1 - t0) * static_cast<double>(k) / rings;
    for (std::uint32_t j = 0; j < seg; ++j) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / segments;
      const double r = radius(t, theta);
      s.vertices.push_back(origin + t * s.axis +
                           r * (std::cos(theta) * e1 + std::sin(theta) * e2));
    }
  }
  auto idx = [seg](std::uint32_t k, std::uint32_t j) { return k * seg + (j % seg); };
  for (std::uint32_t k = 0; k + 1 < ring_count; ++k) {
    for (std::uint32_t j = 0; j < seg; ++j) {
      s.triangles.push_back({idx(k, j), idx(k, j + 1), idx(k + 1, j + 1)});
      s.triangles.push_back({idx(k, j), idx(k + 1, j + 1), idx(k + 1, j)});
    }
  }
  if (capped) {
    const auto c0 = static_cast<std::uint32_t>(s.vertices.size());
    s.vertices.push_back(origin + t0 * s.axis);
    const auto c1 = static_cast<std::uint32_t>(s.vertices.size());
    s.vertices.push_back(origin + t1 * s.axis);
    const std::uint32_t top = ring_count - 1;
    for (std::uint32_t j = 0; j < seg; ++j) {
      s.triangles.push_back({c0, idx(0, j + 1), idx(0, j)});
      s.triangles.push_back({c1, idx(top, j), idx(top, j + 1)});
    }
  }
  return s;
}

LinkSurface make_cylinder(double radius, double length, int segments, int rings,
                          bool capped) {
  return make_revolved([radius](double, double) { return radius; }, 0.0, length,
                       segments, rings, capped);
}

LinkSurface make_frustum(double r0, double r1, double length, int segments,
                         int rings, bool capped) {
  return make_revolved(
      [=](double t, double) { return r0 + (r1 - r0) * t / length; }, 0.0, length,
      segments, rings, capped);
}

LinkSurface make_square(double side) {
  LinkSurface s;
  s.vertices = {Vec3(0, 0, 0), Vec3(side, 0, 0), Vec3(side, side, 0), Vec3(0, side, 0)};
  s.triangles = {{0, 1, 2}, {0, 2, 3}};
  s.axis = Vec3::UnitX();
  s.origin = Vec3::Zero();
  return s;
}

}  // namespace skinrig::geometry
