#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "skinrig/geometry/chart.hpp"
#include "skinrig/rng.hpp"

namespace skinrig::sim {

struct SkinParams {
  int cols = 16;
  int rows = 16;
  /// Shear of the attached grid as a fraction of its extent (0.05 = 5 %).
  double warp = 0.0;
  double noise_sigma = 0.0;
  double saturation = 250.0;
  double gain_min = 10.0, gain_max = 30.0;      // reading per N
  double offset_min = 0.5, offset_max = 2.0;    // reading
  /// Contact patch radius in meters; <= 0 selects 0.35 of the smaller mean
  /// cell side.
  double activation_radius = 0.0;
  std::uint64_t seed = 1;
};

/// Mean perimeter (at mid height) and axial length of the chart's surface.
std::pair<double, double> surface_extent(const geometry::CylindricalChart& chart);

/// Synthetic skin wrapped on one link. Cells are the preimages of a
/// rows x cols lattice under a smooth warp of the chart coordinates, so they
/// tile the lateral surface. Readings follow an affine force model per cell
/// scaled by how much of the contact patch falls on the cell.
class GroundTruthSkin {
 public:
  GroundTruthSkin(std::shared_ptr<const geometry::CylindricalChart> chart, const SkinParams& params);

  int cols() const { return params_.cols; }
  int rows() const { return params_.rows; }
  int cell_count() const { return params_.cols * params_.rows; }
  const SkinParams& params() const { return params_; }
  double activation_radius() const { return activation_radius_; }
  double cell_side_u() const { return side_u_; }
  double cell_side_v() const { return side_v_; }
  double gain(int cell) const { return gain_[cell]; }
  double offset(int cell) const { return offset_[cell]; }
  const geometry::CylindricalChart& chart() const { return *chart_; }
  std::shared_ptr<const geometry::CylindricalChart> chart_ptr() const { return chart_; }

  /// Warped lattice coordinates (a in [0, cols), b in [0, rows]) of a chart
  /// point.
  std::pair<double, double> lattice_coords(double u, double v) const;

  /// Cell containing chart point (u, v), or -1 off the skin.
  int cell_at_uv(double u, double v) const;
  int cell_at(const Vec3& p) const;

  /// Fraction of the contact patch (disc in the tangent plane) on each cell.
  /// Sorted by cell id.
  std::vector<std::pair<int, double>> overlap(const Vec3& point, const Vec3& normal) const;

  /// Readings for a contact of `normal_force` newtons. Noise is drawn from
  /// `rng` only for cells the patch touches, in cell order.
  std::vector<double> response(const std::vector<std::pair<int, double>>& overlaps,
                               double normal_force, Rng* rng) const;
  std::vector<double> synthesize_response(const Vec3& point, const Vec3& normal,
                                          double normal_force, Rng* rng = nullptr) const;

  /// Area-weighted centroids of the true (warped) cells.
  const std::vector<Vec3>& true_centroids() const { return centroids_; }
  /// Where the cells would sit on a perfect unwarped grid.
  std::vector<Vec3> nominal_centroids() const;

 private:
  std::shared_ptr<const geometry::CylindricalChart> chart_;
  SkinParams params_;
  double phase_u_ = 0.0, phase_v_ = 0.0;
  double side_u_ = 0.0, side_v_ = 0.0;
  double activation_radius_ = 0.0;
  std::vector<double> gain_, offset_;
  std::vector<Vec3> disc_;  // unit-disc quadrature points (x, y, 0)
  std::vector<Vec3> centroids_;

  void compute_centroids();
};

}  // namespace skinrig::sim
