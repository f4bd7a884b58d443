#include "skinrig/geometry/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <vector>

#include "skinrig/errors.hpp"

namespace skinrig::geometry {

namespace {

constexpr int kAngularStations = 64;

using EdgeKey = std::pair<std::uint32_t, std::uint32_t>;

EdgeKey edge_key(std::uint32_t a, std::uint32_t b) {
  return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

// Crossing point on an edge, always computed from the lower vertex index so
// neighbouring triangles agree bit for bit.
Vec3 crossing(const LinkSurface& s, const std::vector<double>& side, EdgeKey e) {
  const double sa = side[e.first];
  const double sb = side[e.second];
  const double w = sa / (sa - sb);
  return s.vertices[e.first] + w * (s.vertices[e.second] - s.vertices[e.first]);
}

}  // namespace

double section_perimeter(const LinkSurface& surface, double t) {
  std::vector<double> side(surface.vertices.size());
  for (std::size_t i = 0; i < side.size(); ++i) {
    side[i] = surface.axis.dot(surface.vertices[i] - surface.origin) - t;
  }

  std::map<EdgeKey, std::vector<EdgeKey>> adjacency;
  for (const auto& tri : surface.triangles) {
    EdgeKey cut[2];
    int n = 0;
    for (int k = 0; k < 3; ++k) {
      const auto a = tri[k];
      const auto b = tri[(k + 1) % 3];
      if ((side[a] >= 0.0) != (side[b] >= 0.0)) {
        if (n < 2) cut[n] = edge_key(a, b);
        ++n;
      }
    }
    if (n == 0) continue;
    adjacency[cut[0]].push_back(cut[1]);
    adjacency[cut[1]].push_back(cut[0]);
  }

  if (adjacency.size() < 3) {
    throw DegenerateMeshError("section at t=" + std::to_string(t) + " has " +
                              std::to_string(adjacency.size()) + " intersection points");
  }
  for (const auto& [key, nbrs] : adjacency) {
    if (nbrs.size() != 2) {
      throw OpenSectionError("section at t=" + std::to_string(t) + " does not close");
    }
  }

  std::map<EdgeKey, bool> seen;
  double best = 0.0;
  for (const auto& [start, nbrs] : adjacency) {
    if (seen[start]) continue;
    double length = 0.0;
    EdgeKey prev = start;
    EdgeKey cur = nbrs[0];
    seen[start] = true;
    Vec3 p_prev = crossing(surface, side, start);
    while (true) {
      const Vec3 p_cur = crossing(surface, side, cur);
      length += (p_cur - p_prev).norm();
      if (cur == start) break;
      seen[cur] = true;
      const auto& nn = adjacency[cur];
      const EdgeKey next = (nn[0] == prev) ? nn[1] : nn[0];
      prev = cur;
      cur = next;
      p_prev = p_cur;
    }
    best = std::max(best, length);
  }
  return best;
}

double axial_extent(const LinkSurface& surface, double theta) {
  const Vec3 e1 = reference_direction(surface.axis);
  const Vec3 e2 = surface.axis.cross(e1);
  const Vec3 d = std::cos(theta) * e1 + std::sin(theta) * e2;
  const Vec3 plane_normal = surface.axis.cross(d);

  std::vector<double> side(surface.vertices.size());
  for (std::size_t i = 0; i < side.size(); ++i) {
    side[i] = plane_normal.dot(surface.vertices[i] - surface.origin);
  }
  double length = 0.0;
  for (std::size_t t = 0; t < surface.triangles.size(); ++t) {
    if (is_cap_face(surface, t)) continue;
    const auto& tri = surface.triangles[t];
    Vec3 pts[2];
    int n = 0;
    for (int k = 0; k < 3; ++k) {
      const auto a = tri[k];
      const auto b = tri[(k + 1) % 3];
      if ((side[a] >= 0.0) != (side[b] >= 0.0)) {
        if (n < 2) pts[n] = crossing(surface, side, edge_key(a, b));
        ++n;
      }
    }
    if (n != 2) continue;
    const Vec3 mid = 0.5 * (pts[0] + pts[1]);
    if (d.dot(mid - surface.origin) <= 0.0) continue;
    length += (pts[1] - pts[0]).norm();
  }
  return length;
}

SurfaceMeasurements measure_surface(const LinkSurface& surface, int n_sections) {
  validate(surface);
  if (n_sections < 2) throw InvalidSurfaceError("n_sections must be >= 2");

  double tmin = std::numeric_limits<double>::infinity();
  double tmax = -tmin;
  for (const auto& v : surface.vertices) {
    const double t = surface.axis.dot(v - surface.origin);
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }

  SurfaceMeasurements m;
  m.h_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_sections; ++k) {
    const double t = tmin + (tmax - tmin) * (k + 0.5) / n_sections;
    const double h = section_perimeter(surface, t);
    m.h_min = std::min(m.h_min, h);
    m.h_max = std::max(m.h_max, h);
  }
  m.v_min = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kAngularStations; ++j) {
    const double theta = 2.0 * std::numbers::pi * (j + 0.5) / kAngularStations;
    const double v = axial_extent(surface, theta);
    m.v_min = std::min(m.v_min, v);
    m.v_max = std::max(m.v_max, v);
  }
  if (!(m.v_min > 0.0)) throw DegenerateMeshError("surface has no axial extent");
  return m;
}

}  // namespace skinrig::geometry
