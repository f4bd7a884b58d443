#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "skinrig/geometry/mesh.hpp"

namespace skinrig::geometry {

struct SurfaceSample {
  Vec3 position;
  Vec3 normal;  // unit, outward
  std::optional<int> cell_hint;
};

struct PoissonOptions {
  int candidates = 30;  // attempts per active sample
  /// Uniform darts thrown after the front stalls, per r^-2 of surface area.
  /// A dart farther than 2r from every sample reseeds the front there.
  double coverage_darts = 20.0;
  /// Restrict sampling to lateral faces (what a skin covers).
  bool lateral_only = true;
};

/// Bridson-style Poisson-disc sampling on a triangle mesh with Euclidean
/// distance as the metric. Candidates are drawn in the tangent plane of an
/// active sample and projected back onto the mesh. Every pair of returned
/// samples is at least `radius` apart.
std::vector<SurfaceSample> poisson_disc_sample(const LinkSurface& surface, double radius,
                                               std::uint64_t seed,
                                               const PoissonOptions& options = {});

}  // namespace skinrig::geometry
