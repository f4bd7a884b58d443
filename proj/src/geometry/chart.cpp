#include "skinrig/geometry/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "skinrig/errors.hpp"

namespace skinrig::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Möller-Trumbore with a small barycentric slack so rays through shared
// edges never fall between two triangles.
std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a,
                                   const Vec3& b, const Vec3& c) {
  constexpr double slack = 1e-10;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = d.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-18) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = o - a;
  const double bu = s.dot(p) * inv;
  if (bu < -slack || bu > 1.0 + slack) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double bv = d.dot(q) * inv;
  if (bv < -slack || bu + bv > 1.0 + slack) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (t <= 0.0) return std::nullopt;
  return t;
}

}  // namespace

CylindricalChart::CylindricalChart(const LinkSurface& surface)
    : lateral_(lateral_part(surface)),
      axis_(surface.axis),
      origin_(surface.origin),
      e1_(reference_direction(surface.axis)) {
  e2_ = axis_.cross(e1_);
  if (lateral_.triangles.empty()) {
    throw InvalidSurfaceError("surface has no lateral faces");
  }
  tmin_ = std::numeric_limits<double>::infinity();
  tmax_ = -tmin_;
  for (const auto& tri : lateral_.triangles) {
    for (auto idx : tri) {
      const double t = axis_.dot(lateral_.vertices[idx] - origin_);
      tmin_ = std::min(tmin_, t);
      tmax_ = std::max(tmax_, t);
    }
  }
  if (!(tmax_ > tmin_)) throw InvalidSurfaceError("lateral surface has no axial extent");

  const auto n = static_cast<double>(lateral_.triangles.size());
  nu_ = std::clamp(static_cast<int>(std::sqrt(n)), 8, 256);
  nv_ = nu_;
  buckets_.assign(static_cast<std::size_t>(nu_) * nv_, {});
  for (std::uint32_t t = 0; t < lateral_.triangles.size(); ++t) {
    double us[3], vs[3];
    for (int k = 0; k < 3; ++k) {
      auto [u, v] = param_of(lateral_.vertices[lateral_.triangles[t][k]]);
      us[k] = u;
      vs[k] = v;
    }
    double ulo = std::min({us[0], us[1], us[2]});
    double uhi = std::max({us[0], us[1], us[2]});
    if (uhi - ulo > 0.5) {
      // straddles the seam: shift the small angles up by one turn
      for (double& u : us) {
        if (u < 0.5) u += 1.0;
      }
      ulo = std::min({us[0], us[1], us[2]});
      uhi = std::max({us[0], us[1], us[2]});
    }
    const double vlo = std::min({vs[0], vs[1], vs[2]});
    const double vhi = std::max({vs[0], vs[1], vs[2]});
    const int bu0 = static_cast<int>(std::floor(ulo * nu_)) - 1;
    const int bu1 = static_cast<int>(std::floor(uhi * nu_)) + 1;
    const int bv0 = std::max(0, static_cast<int>(std::floor(vlo * nv_)) - 1);
    const int bv1 = std::min(nv_ - 1, static_cast<int>(std::floor(vhi * nv_)) + 1);
    const bool all_u = (bu1 - bu0 + 1) >= nu_;
    for (int bv = bv0; bv <= bv1; ++bv) {
      if (all_u) {
        for (int bu = 0; bu < nu_; ++bu) buckets_[bucket(bu, bv)].push_back(t);
        continue;
      }
      for (int b = bu0; b <= bu1; ++b) {
        const int bu = ((b % nu_) + nu_) % nu_;
        buckets_[bucket(bu, bv)].push_back(t);
      }
    }
  }
}

std::pair<double, double> CylindricalChart::param_of(const Vec3& p) const {
  const Vec3 r = p - origin_;
  double theta = std::atan2(r.dot(e2_), r.dot(e1_));
  if (theta < 0.0) theta += kTwoPi;
  double u = theta / kTwoPi;
  if (u >= 1.0) u -= 1.0;
  const double v = (axis_.dot(r) - tmin_) / (tmax_ - tmin_);
  return {u, v};
}

std::optional<SurfaceHit> CylindricalChart::surface_at(double u, double v) const {
  u -= std::floor(u);
  const double theta = kTwoPi * u;
  const Vec3 dir = std::cos(theta) * e1_ + std::sin(theta) * e2_;
  const Vec3 from = origin_ + (tmin_ + v * (tmax_ - tmin_)) * axis_;
  const int bu = std::min(nu_ - 1, static_cast<int>(u * nu_));
  const int bv = std::clamp(static_cast<int>(std::floor(v * nv_)), 0, nv_ - 1);

  std::optional<SurfaceHit> best;
  double best_t = -1.0;
  for (auto t : buckets_[bucket(bu, bv)]) {
    const auto& tri = lateral_.triangles[t];
    auto hit = ray_triangle(from, dir, lateral_.vertices[tri[0]], lateral_.vertices[tri[1]],
                            lateral_.vertices[tri[2]]);
    if (!hit) continue;
    if (*hit > best_t || (*hit == best_t && best && t < best->triangle)) {
      best_t = *hit;
      best = SurfaceHit{from + *hit * dir, face_normal(lateral_, t), t};
    }
  }
  return best;
}

SurfaceGrid make_surface_grid(const CylindricalChart& chart, int cols, int rows) {
  SurfaceGrid g;
  g.cols = cols;
  g.rows = rows;
  const std::size_t n = static_cast<std::size_t>(cols) * rows;
  g.points.assign(n, Vec3::Zero());
  g.normals.assign(n, Vec3::Zero());
  g.area.assign(n, 0.0);
  g.valid.assign(n, false);

  // Corner casts for patch areas; v corners are pulled in slightly so the
  // boundary rings still hit the lateral faces.
  const double eps = 1e-9;
  std::vector<std::optional<Vec3>> corner(static_cast<std::size_t>(cols) * (rows + 1));
  for (int j = 0; j <= rows; ++j) {
    const double v = std::clamp(static_cast<double>(j) / rows, eps, 1.0 - eps);
    for (int i = 0; i < cols; ++i) {
      auto hit = chart.surface_at(static_cast<double>(i) / cols, v);
      if (hit) corner[static_cast<std::size_t>(j) * cols + i] = hit->point;
    }
  }
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const std::size_t k = g.index(i, j);
      auto hit = chart.surface_at((i + 0.5) / cols, (j + 0.5) / rows);
      if (!hit) continue;
      const int i1 = (i + 1) % cols;
      const auto& p00 = corner[static_cast<std::size_t>(j) * cols + i];
      const auto& p10 = corner[static_cast<std::size_t>(j) * cols + i1];
      const auto& p01 = corner[static_cast<std::size_t>(j + 1) * cols + i];
      const auto& p11 = corner[static_cast<std::size_t>(j + 1) * cols + i1];
      if (!p00 || !p10 || !p01 || !p11) continue;
      g.points[k] = hit->point;
      g.normals[k] = hit->normal;
      g.area[k] = 0.5 * ((*p11 - *p00).cross(*p01 - *p10)).norm();
      g.valid[k] = true;
    }
  }
  return g;
}

std::vector<Vec3> grid_cell_centers(const CylindricalChart& chart, int cols, int rows) {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(cols) * rows);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      auto hit = chart.surface_at((c + 0.5) / cols, (r + 0.5) / rows);
      out.push_back(hit ? hit->point : Vec3::Zero());
    }
  }
  return out;
}

}  // namespace skinrig::geometry
