#include "skinrig/calib/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "skinrig/errors.hpp"
#include "skinrig/simd/kernels.hpp"

namespace skinrig::calib {

double estimate_dead_band(const sim::CalibrationDataset& ds, const LabelOptions& options) {
  std::size_t first_contact = ds.frames();
  for (std::size_t k = 0; k < ds.frames(); ++k) {
    if (ds.force[k] > options.contact_threshold) {
      first_contact = k;
      break;
    }
  }
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < first_contact; ++k) {
    const double* r = ds.row(k);
    for (int c = 0; c < ds.cell_count; ++c) {
      sum += r[c];
      sum_sq += r[c] * r[c];
      ++n;
    }
  }
  double sigma = 0.0;
  if (n > 1) {
    const double mean = sum / n;
    sigma = std::sqrt(std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)));
  }
  return std::max(options.dead_band_sigmas * sigma, options.min_dead_band);
}

std::vector<std::size_t> contact_frames(const sim::CalibrationDataset& ds,
                                        const LabelOptions& options) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < ds.frames(); ++k) {
    if (ds.force[k] > options.contact_threshold) out.push_back(k);
  }
  return out;
}

namespace {

struct PositionLess {
  bool operator()(const Vec3& a, const Vec3& b) const {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  }
};

}  // namespace

KnnIndex::KnnIndex(const sim::CalibrationDataset& ds, const std::vector<std::size_t>& frames,
                   double dead_band)
    : cell_count_(ds.cell_count), dead_band_(dead_band), frame_count_(frames.size()) {
  positives_per_cell_.assign(static_cast<std::size_t>(cell_count_), 0);
  std::map<Vec3, std::size_t, PositionLess> site_of;
  // per site, per cell positive ranks, built in a dense-then-sparse pass
  std::vector<std::map<int, std::vector<std::uint32_t>>> building;
  for (auto f : frames) {
    const Vec3& p = ds.position[f];
    auto [it, inserted] = site_of.try_emplace(p, site_x_.size());
    if (inserted) {
      site_x_.push_back(p.x());
      site_y_.push_back(p.y());
      site_z_.push_back(p.z());
      site_frames_.push_back(0);
      building.emplace_back();
    }
    const std::size_t s = it->second;
    const auto rank = static_cast<std::uint32_t>(site_frames_[s]++);
    const double* r = ds.row(f);
    for (int c = 0; c < cell_count_; ++c) {
      if (r[c] > dead_band_) {
        building[s][c].push_back(rank);
        ++positives_per_cell_[c];
      }
    }
  }
  site_positive_.resize(building.size());
  for (std::size_t s = 0; s < building.size(); ++s) {
    for (auto& [cell, ranks] : building[s]) site_positive_[s].emplace_back(cell, std::move(ranks));
  }
}

std::vector<SiteTake> KnnIndex::neighbors(const Vec3& q, std::size_t k) const {
  std::vector<SiteTake> out;
  const std::size_t n = site_count();
  if (n == 0 || k == 0) return out;
  k = std::min(k, frame_count_);

  std::vector<double> d2(n);
  simd::active().squared_distances(q.x(), q.y(), q.z(), site_x_.data(), site_y_.data(),
                                   site_z_.data(), n, d2.data());
  auto less = [&d2](std::size_t a, std::size_t b) {
    return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  // Grow the sorted prefix until it holds k frames.
  std::size_t m = std::min(n, std::size_t{16});
  std::size_t frames_in_prefix = 0;
  while (true) {
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(), less);
    frames_in_prefix = 0;
    for (std::size_t i = 0; i < m; ++i) frames_in_prefix += site_frames_[order[i]];
    if (frames_in_prefix >= k || m == n) break;
    m = std::min(n, m * 2);
  }

  if (d2[order[0]] == 0.0) {
    // exact match: coincident frames only, equal weights
    out.push_back({order[0], std::min(k, site_frames_[order[0]]), 1.0});
    return out;
  }
  std::size_t remaining = k;
  for (std::size_t i = 0; i < m && remaining > 0; ++i) {
    const std::size_t s = order[i];
    const std::size_t take = std::min(remaining, site_frames_[s]);
    out.push_back({s, take, 1.0 / d2[s]});
    remaining -= take;
  }
  return out;
}

std::size_t KnnIndex::positives_in_prefix(std::size_t site, int cell, std::size_t count) const {
  const auto& lists = site_positive_[site];
  auto it = std::lower_bound(lists.begin(), lists.end(), cell,
                             [](const auto& e, int c) { return e.first < c; });
  if (it == lists.end() || it->first != cell) return 0;
  return static_cast<std::size_t>(
      std::lower_bound(it->second.begin(), it->second.end(), static_cast<std::uint32_t>(count)) -
      it->second.begin());
}

std::vector<std::pair<int, std::size_t>> KnnIndex::site_positives(std::size_t site) const {
  std::vector<std::pair<int, std::size_t>> out;
  for (const auto& [cell, ranks] : site_positive_[site]) out.emplace_back(cell, ranks.size());
  return out;
}

std::pair<double, double> KnnIndex::vote(const std::vector<SiteTake>& nbrs, int cell) const {
  double pos = 0.0, total = 0.0;
  for (const auto& t : nbrs) {
    pos += t.weight * static_cast<double>(positives_in_prefix(t.site, cell, t.count));
    total += t.weight * static_cast<double>(t.count);
  }
  return {pos, total};
}

std::vector<std::pair<int, double>> KnnIndex::cell_votes(const std::vector<SiteTake>& nbrs) const {
  std::map<int, double> acc;
  for (const auto& t : nbrs) {
    for (const auto& [cell, ranks] : site_positive_[t.site]) {
      const auto n = static_cast<std::size_t>(
          std::lower_bound(ranks.begin(), ranks.end(), static_cast<std::uint32_t>(t.count)) -
          ranks.begin());
      if (n > 0) acc[cell] += t.weight * static_cast<double>(n);
    }
  }
  return {acc.begin(), acc.end()};
}

KnnCellClassifier::KnnCellClassifier(const KnnIndex& index, int cell, std::size_t k)
    : index_(index), cell_(cell), k_(std::min(k, index.size())) {
  if (cell < 0 || cell >= index.cell_count()) throw std::out_of_range("cell id out of range");
  if (index.positive_count(cell) == 0) {
    throw EmptyClassError("cell " + std::to_string(cell) + " has no positive training frames");
  }
}

bool KnnCellClassifier::predict(const Vec3& q) const {
  const auto [pos, total] = index_.vote(index_.neighbors(q, k_), cell_);
  return pos > total - pos;
}

}  // namespace skinrig::calib
