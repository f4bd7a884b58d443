#pragma once

#include <vector>

#include "skinrig/sim/dataset.hpp"

namespace skinrig::calib {

/// Ordinary least squares y = slope * x + intercept.
struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double rmse = 0.0;
  double sse = 0.0;
  double se_slope = 0.0;      // standard errors (0 when n <= 2)
  double se_intercept = 0.0;
  std::size_t n = 0;
};

/// Throws DegenerateFitError when fewer than two points are given or all x
/// are equal.
AffineFit fit_affine(const std::vector<double>& x, const std::vector<double>& y);

/// Linear map from one cell's reading to newtons.
struct CellForceModel {
  int cell_id = 0;
  double slope = 0.0;      // N per reading unit
  double intercept = 0.0;  // N
  double r2 = 0.0;
  double rmse_train = 0.0;  // N
  std::size_t samples = 0;
  bool fitted = false;      // false: too few or constant readings
  bool degenerate = false;  // slope <= 0 or not fitted

  double predict(double reading) const { return slope * reading + intercept; }
};

/// Cell holding the largest reading in a frame (lowest id on ties).
int argmax_cell(const sim::CalibrationDataset& ds, std::size_t frame);

/// Per-cell OLS of F_t on C_{i,t} over the given frames in which cell i
/// holds the largest reading. Cells that cannot be fitted are returned with
/// fitted = false.
std::vector<CellForceModel> fit_force_models(const sim::CalibrationDataset& ds,
                                             const std::vector<std::size_t>& frames);

}  // namespace skinrig::calib
