#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "skinrig/geometry/measure.hpp"

namespace skinrig::design {

enum class Layer { Top, Mesh, Bottom };

std::string to_string(Layer layer);

/// Knitting parameters of one layer. Ratios are stitches per millimeter;
/// stretch factors are dimensionless elongations (1 = relaxed).
struct LayerProfile {
  Layer layer = Layer::Top;
  double ratio_x = 1.0;
  double ratio_y = 1.0;
  double stretch_min_x = 1.0;
  double stretch_max_x = 1.0;
  double stretch_min_y = 1.0;
  double stretch_max_y = 1.0;
  /// True when the stretch bounds are placeholders rather than measured.
  bool assumed = false;
};

using Profiles = std::array<LayerProfile, 3>;

/// Top and bottom: 0.889 / 0.981 st/mm, 145-177 % horizontal stretch, up to
/// 145 % vertical with no minimum. Mesh: 0.543 / 0.437 st/mm with assumed
/// 100-145 % on both axes.
Profiles default_profiles();

/// Throws std::invalid_argument if a profile breaks 1 <= min <= max or has a
/// non-positive ratio.
void validate(const LayerProfile& profile);

struct AxisVerdict {
  bool feasible = true;
  double ratio = 1.0;      // max / min measurement
  double bound = 1.0;      // tightest stretch_max / stretch_min over layers
  double margin = 0.0;     // bound - ratio
  Layer limiting = Layer::Top;
};

struct Feasibility {
  AxisVerdict x;
  AxisVerdict y;
  bool feasible() const { return x.feasible && y.feasible; }
  /// Human-readable reasons, empty when feasible.
  std::vector<std::string> reasons;
};

Feasibility check_feasibility(const geometry::SurfaceMeasurements& m, const Profiles& profiles);

struct LayerDimensions {
  Layer layer = Layer::Top;
  int n_x = 0;
  int n_y = 0;
};

struct SkinSpec {
  std::array<LayerDimensions, 3> layers{};
  int grid_cols = 16;
  int grid_rows = 16;
};

/// Smallest stitch count whose minimally stretched length reaches the
/// measurement: n = ceil(min_mm * R / S_min). One stitch of slack above the
/// lower band edge is inherent to rounding up.
int stitch_count(double min_mm, double ratio, double stretch_min);

/// Throws InfeasibleDesignError when the band check fails for any layer.
SkinSpec solve_dimensions(const geometry::SurfaceMeasurements& m, const Profiles& profiles,
                          int grid_cols = 16, int grid_rows = 16);

/// Physical length band [n * S_min / R, n * S_max / R] in millimeters.
struct Band {
  double lo = 0.0;
  double hi = 0.0;
};
Band size_band(int n, double ratio, double stretch_min, double stretch_max);

/// Spec plus every intermediate quantity (bands, slack, ratios) as JSON.
nlohmann::json design_report(const geometry::SurfaceMeasurements& m, const Profiles& profiles,
                             const Feasibility& verdict, const SkinSpec* spec);

}  // namespace skinrig::design
