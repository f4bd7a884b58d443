#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace skinrig {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

}  // namespace skinrig

namespace skinrig::geometry {

using Triangle = std::array<std::uint32_t, 3>;

/// Triangle mesh of one robot link, in the link frame (meters).
///
/// `axis` is the link's cylinder-like rotational axis and `origin` a point on
/// it. Triangle winding is counter-clockwise seen from outside, so face
/// normals computed from the winding point outward.
struct LinkSurface {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  Vec3 axis{0.0, 0.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};
};

/// Throws InvalidSurfaceError on out-of-range indices, an empty mesh or a
/// non-unit axis.
void validate(const LinkSurface& surface);

Vec3 face_normal(const LinkSurface& surface, std::size_t tri);
double face_area(const LinkSurface& surface, std::size_t tri);
double surface_area(const LinkSurface& surface);

/// Uniform scale about the link-frame origin.
LinkSurface scaled(const LinkSurface& surface, double s);

/// Faces whose normal is within acos(cap_cos) of the axis count as end caps.
bool is_cap_face(const LinkSurface& surface, std::size_t tri, double cap_cos = 0.95);

/// Copy of the surface without end-cap faces (the part a skin can wrap).
LinkSurface lateral_part(const LinkSurface& surface, double cap_cos = 0.95);

/// Deterministic unit vector orthogonal to `axis`; angular coordinates around
/// the axis are measured from it.
Vec3 reference_direction(const Vec3& axis);

/// Radius as a function of axial coordinate t and angle theta.
using RadiusProfile = std::function<double(double t, double theta)>;

/// Surface of revolution (optionally non-circular) around `axis` through
/// `origin`, for t in [t0, t1].
LinkSurface make_revolved(const RadiusProfile& radius, double t0, double t1,
                          int segments, int rings, bool capped,
                          const Vec3& axis = Vec3::UnitZ(),
                          const Vec3& origin = Vec3::Zero());

LinkSurface make_cylinder(double radius, double length, int segments, int rings,
                          bool capped = true);
LinkSurface make_frustum(double r0, double r1, double length, int segments,
                         int rings, bool capped = true);
/// Flat square [0,side]^2 in the z = 0 plane, two triangles.
LinkSurface make_square(double side = 1.0);

}  // namespace skinrig::geometry
