#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "skinrig/calib/force_model.hpp"
#include "skinrig/calib/knn.hpp"
#include "skinrig/calib/receptive_field.hpp"

namespace skinrig::calib {

struct CalibrationOptions {
  std::size_t k = 1000;
  int oversample = 8;
  LabelOptions labels;
  std::uint64_t split_seed = 0;
  double train_fraction = 0.9;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Shuffles the in-contact frames with `seed` and cuts them train/test.
/// Both halves come back in ascending frame order.
Split split_frames(const sim::CalibrationDataset& ds, std::uint64_t seed,
                   double train_fraction = 0.9, const LabelOptions& labels = {});

struct SkinCalibration {
  std::string skin_id;
  int cols = 0;
  int rows = 0;
  std::string dataset_hash;
  std::uint64_t split_seed = 0;
  double train_fraction = 0.9;
  std::size_t k = 0;
  double dead_band = 0.0;
  double contact_threshold = 0.05;
  std::vector<CellReceptiveField> fields;
  std::vector<CellForceModel> forces;

  int cell_count() const { return cols * rows; }
};

/// Localization from the training split (kNN receptive fields) and per-cell
/// force models. Throws CoverageError if a cell never reads above the dead
/// band in the training frames.
SkinCalibration calibrate(const sim::CalibrationDataset& ds,
                          const geometry::CylindricalChart& chart, int cols, int rows,
                          const CalibrationOptions& options = {});

struct Metrics {
  double loc_rmse_m = 0.0;
  double loc_rmse_uncal_m = 0.0;
  double force_rmse_n = 0.0;
  double force_rmse_naive_n = 0.0;
  std::size_t test_frames = 0;
  /// Per cell (by arg-max cell of the test frame): localization RMSE and
  /// frame count. Cells never arg-max in the test split report 0 / 0.
  std::vector<double> cell_loc_rmse_m;
  std::vector<std::size_t> cell_test_frames;
};

/// Scores a calibration on the held-out split recorded in it. Location
/// prediction is the centroid of the arg-max cell; the uncalibrated baseline
/// uses the perfect-grid `nominal_centroids`. Force prediction is the cell's
/// model; the naive baseline scales the reading by press_max / saturation.
/// Throws SplitTooSmallError if the test split is empty.
Metrics evaluate(const SkinCalibration& cal, const sim::CalibrationDataset& ds,
                 const std::vector<Vec3>& nominal_centroids, double saturation, double press_max);

nlohmann::json calibration_to_json(const SkinCalibration& cal);
SkinCalibration calibration_from_json(const nlohmann::json& doc);
void save_calibration(const SkinCalibration& cal, const std::filesystem::path& path);
SkinCalibration load_calibration(const std::filesystem::path& path);

/// `metric,value` rows.
std::string metrics_csv(const Metrics& m);

/// Per-cell outlines, centroids and error shading for plotting.
nlohmann::json field_plot_json(const SkinCalibration& cal, const Metrics& m,
                               const std::vector<Vec3>& nominal_centroids);

}  // namespace skinrig::calib
