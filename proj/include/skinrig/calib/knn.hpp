#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "skinrig/sim/dataset.hpp"

namespace skinrig::calib {

/// Frames used for training and how a reading becomes a label.
struct LabelOptions {
  double contact_threshold = 0.05;  // N; frames at or below are not training data
  double dead_band_sigmas = 3.0;
  double min_dead_band = 0.0;
};

/// max(sigmas * stddev of readings before the first contact, min_dead_band).
double estimate_dead_band(const sim::CalibrationDataset& ds, const LabelOptions& options = {});

/// Frames with F > contact_threshold, ascending.
std::vector<std::size_t> contact_frames(const sim::CalibrationDataset& ds,
                                        const LabelOptions& options = {});

/// One neighbour group: the first `count` frames recorded at `site`, each
/// with weight `weight`.
struct SiteTake {
  std::size_t site = 0;
  std::size_t count = 0;
  double weight = 0.0;
};

/// Weighted k-nearest-neighbour index over labelled training frames.
///
/// Frames recorded at the same position share a "site". Neighbours are
/// ordered by (squared distance, site first appearance, frame order), and
/// weighted 1/d^2. A query that coincides with a site uses only the
/// coincident frames, weighted equally.
class KnnIndex {
 public:
  KnnIndex(const sim::CalibrationDataset& ds, const std::vector<std::size_t>& frames,
           double dead_band);

  int cell_count() const { return cell_count_; }
  std::size_t size() const { return frame_count_; }
  std::size_t site_count() const { return site_x_.size(); }
  Vec3 site_position(std::size_t s) const { return {site_x_[s], site_y_[s], site_z_[s]}; }
  double dead_band() const { return dead_band_; }

  /// Positive training frames for a cell.
  std::size_t positive_count(int cell) const { return positives_per_cell_[cell]; }

  /// Positive frame count per cell at one site, sorted by cell.
  std::vector<std::pair<int, std::size_t>> site_positives(std::size_t site) const;

  /// The k nearest frames to q (k clipped to the training size).
  std::vector<SiteTake> neighbors(const Vec3& q, std::size_t k) const;

  /// Positive weight for `cell` and total weight over a neighbourhood.
  std::pair<double, double> vote(const std::vector<SiteTake>& nbrs, int cell) const;

  /// Positive weight per cell, only cells with weight > 0, sorted by cell.
  std::vector<std::pair<int, double>> cell_votes(const std::vector<SiteTake>& nbrs) const;

 private:
  std::size_t positives_in_prefix(std::size_t site, int cell, std::size_t count) const;

  int cell_count_ = 0;
  double dead_band_ = 0.0;
  std::size_t frame_count_ = 0;
  std::vector<double> site_x_, site_y_, site_z_;
  std::vector<std::size_t> site_frames_;  // frames recorded at each site
  // per site: (cell, ascending ranks of positive frames within the site)
  std::vector<std::vector<std::pair<int, std::vector<std::uint32_t>>>> site_positive_;
  std::vector<std::size_t> positives_per_cell_;
};

/// One-vs-rest classifier for a single cell: positive iff the positive
/// weight exceeds the negative weight (ties are negative).
class KnnCellClassifier {
 public:
  /// Throws EmptyClassError when the cell has no positive training frame.
  KnnCellClassifier(const KnnIndex& index, int cell, std::size_t k);
  bool predict(const Vec3& q) const;
  int cell() const { return cell_; }
  std::size_t k() const { return k_; }

 private:
  const KnnIndex& index_;
  int cell_;
  std::size_t k_;
};

}  // namespace skinrig::calib
