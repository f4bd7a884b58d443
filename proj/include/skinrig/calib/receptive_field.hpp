#pragma once

#include <utility>
#include <vector>

#include "skinrig/calib/knn.hpp"
#include "skinrig/geometry/chart.hpp"

namespace skinrig::calib {

struct CellReceptiveField {
  int cell_id = 0;
  bool calibrated = false;  // false: no surface point was assigned
  /// Closed outline of the largest assigned patch (first vertex not repeated).
  std::vector<Vec3> boundary;
  std::vector<std::pair<double, double>> boundary_uv;  // same outline in chart coordinates
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = Vec3::Zero();  // area-weighted outward normal at the field
  double area = 0.0;           // m^2
  std::size_t support_count = 0;  // positive training frames inside the field
};

struct FieldOptions {
  std::size_t k = 1000;
  /// Assignment-grid points per cell side.
  int oversample = 8;
};

struct ReceptiveFields {
  std::vector<CellReceptiveField> cells;
  /// Winning cell per assignment-grid point (-1 when no cell claims it).
  std::vector<int> owner;
  int grid_cols = 0;
  int grid_rows = 0;
};

/// Evaluates every cell's classifier on a dense surface grid and assigns
/// each grid point to the cell with the largest positive vote weight (ties:
/// lowest id). Throws CoverageError when a cell has no positive training
/// frame.
ReceptiveFields compute_receptive_fields(const KnnIndex& index,
                                         const geometry::CylindricalChart& chart, int cols,
                                         int rows, const FieldOptions& options = {});

/// Outer pixel-edge outline of the largest 4-connected region of `mask`
/// (cols x rows, u wraps). Vertices are lattice corners (x, y) in
/// counter-clockwise order with collinear points removed; x may exceed cols
/// when the region straddles the seam. Empty if the region is a full ring
/// or the mask is empty.
std::vector<std::pair<int, int>> trace_outline(const std::vector<bool>& mask, int cols, int rows);

/// Point-in-polygon (even-odd) in chart coordinates, u unwrapped near the
/// polygon.
bool inside_outline(const std::vector<std::pair<double, double>>& outline, double u, double v);

}  // namespace skinrig::calib
