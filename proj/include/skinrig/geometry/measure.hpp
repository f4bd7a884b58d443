#pragma once

#include "skinrig/geometry/mesh.hpp"

namespace skinrig::geometry {

/// Extents of a cylinder-like link, meters. h = cross-section perimeter,
/// v = surface arc length along the axis.
struct SurfaceMeasurements {
  double h_min = 0.0;
  double h_max = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;
};

/// Perimeter of the largest closed loop cut by the plane axis·(p − origin) = t.
double section_perimeter(const LinkSurface& surface, double t);

/// Lateral surface length along the axis at angle theta from
/// reference_direction(axis).
double axial_extent(const LinkSurface& surface, double theta);

/// Section perimeters at n_sections evenly spaced planes orthogonal to the
/// axis, and axial extents at 64 angular stations.
SurfaceMeasurements measure_surface(const LinkSurface& surface, int n_sections);

}  // namespace skinrig::geometry
