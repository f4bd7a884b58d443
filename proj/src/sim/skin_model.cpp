#include "skinrig/sim/skin_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace skinrig::sim {

namespace {

constexpr int kDiscPoints = 256;
constexpr int kCentroidOversample = 16;

}  // namespace

std::pair<double, double> surface_extent(const geometry::CylindricalChart& chart) {
  constexpr int n = 256;
  double perimeter = 0.0;
  std::optional<Vec3> first, prev;
  for (int k = 0; k <= n; ++k) {
    auto hit = chart.surface_at(static_cast<double>(k % n) / n, 0.5);
    if (!hit) continue;
    if (prev) perimeter += (hit->point - *prev).norm();
    prev = hit->point;
  }
  return {perimeter, chart.t_max() - chart.t_min()};
}

GroundTruthSkin::GroundTruthSkin(std::shared_ptr<const geometry::CylindricalChart> chart,
                                 const SkinParams& params)
    : chart_(std::move(chart)), params_(params) {
  if (params_.cols < 1 || params_.rows < 1) throw std::invalid_argument("skin grid must be non-empty");
  if (!(params_.saturation > 0.0)) throw std::invalid_argument("saturation must be positive");
  if (!(params_.gain_min > 0.0) || params_.gain_max < params_.gain_min) {
    throw std::invalid_argument("gains must be positive");
  }
  const auto [perimeter, length] = surface_extent(*chart_);
  side_u_ = perimeter / params_.cols;
  side_v_ = length / params_.rows;
  activation_radius_ = params_.activation_radius > 0.0 ? params_.activation_radius
                                                        : 0.35 * std::min(side_u_, side_v_);

  Rng rng(Rng::mix(params_.seed, 0x5c1));
  phase_u_ = 2.0 * std::numbers::pi * rng.uniform();
  phase_v_ = 2.0 * std::numbers::pi * rng.uniform();
  for (int c = 0; c < cell_count(); ++c) {
    gain_.push_back(rng.uniform(params_.gain_min, params_.gain_max));
    offset_.push_back(rng.uniform(params_.offset_min, params_.offset_max));
  }

  // Vogel spiral: near-uniform equal-weight points on the unit disc
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < kDiscPoints; ++k) {
    const double r = std::sqrt((k + 0.5) / kDiscPoints);
    const double a = k * golden;
    disc_.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
  }
  compute_centroids();
}

std::pair<double, double> GroundTruthSkin::lattice_coords(double u, double v) const {
  const double w = params_.warp;
  const double two_pi = 2.0 * std::numbers::pi;
  const double a = params_.cols * (u + w * (v - 0.5) + 0.5 * w * std::sin(two_pi * v + phase_u_));
  const double b =
      params_.rows * (v + 0.5 * w * std::sin(two_pi * u + phase_v_) * 4.0 * v * (1.0 - v));
  return {a, b};
}

int GroundTruthSkin::cell_at_uv(double u, double v) const {
  if (v < 0.0 || v > 1.0) return -1;
  const auto [a, b] = lattice_coords(u, v);
  const int row = std::clamp(static_cast<int>(std::floor(b)), 0, params_.rows - 1);
  int col = static_cast<int>(std::floor(a)) % params_.cols;
  if (col < 0) col += params_.cols;
  return row * params_.cols + col;
}

int GroundTruthSkin::cell_at(const Vec3& p) const {
  const auto [u, v] = chart_->param_of(p);
  return cell_at_uv(u, v);
}

std::vector<std::pair<int, double>> GroundTruthSkin::overlap(const Vec3& point,
                                                             const Vec3& normal) const {
  const Vec3 n = normal.normalized();
  const Vec3 t1 = n.unitOrthogonal();
  const Vec3 t2 = n.cross(t1);
  std::map<int, int> counts;
  for (const auto& d : disc_) {
    const Vec3 q = point + activation_radius_ * (d.x() * t1 + d.y() * t2);
    const int cell = cell_at(q);
    if (cell >= 0) ++counts[cell];
  }
  std::vector<std::pair<int, double>> out;
  for (const auto& [cell, c] : counts) {
    out.emplace_back(cell, static_cast<double>(c) / kDiscPoints);
  }
  return out;
}

std::vector<double> GroundTruthSkin::response(const std::vector<std::pair<int, double>>& overlaps,
                                              double normal_force, Rng* rng) const {
  if (normal_force < 0.0) throw std::invalid_argument("normal force must be non-negative");
  std::vector<double> out(static_cast<std::size_t>(cell_count()), 0.0);
  if (normal_force == 0.0) return out;
  for (const auto& [cell, frac] : overlaps) {
    double c = gain_[cell] * normal_force * frac + offset_[cell];
    if (rng != nullptr && params_.noise_sigma > 0.0) c += rng->normal(0.0, params_.noise_sigma);
    out[static_cast<std::size_t>(cell)] = std::clamp(c, 0.0, params_.saturation);
  }
  return out;
}

std::vector<double> GroundTruthSkin::synthesize_response(const Vec3& point, const Vec3& normal,
                                                         double normal_force, Rng* rng) const {
  return response(overlap(point, normal), normal_force, rng);
}

void GroundTruthSkin::compute_centroids() {
  const auto grid = geometry::make_surface_grid(*chart_, params_.cols * kCentroidOversample,
                                                params_.rows * kCentroidOversample);
  std::vector<Vec3> sum(static_cast<std::size_t>(cell_count()), Vec3::Zero());
  std::vector<double> area(static_cast<std::size_t>(cell_count()), 0.0);
  for (int j = 0; j < grid.rows; ++j) {
    for (int i = 0; i < grid.cols; ++i) {
      const auto k = grid.index(i, j);
      if (!grid.valid[k]) continue;
      const int cell = cell_at_uv((i + 0.5) / grid.cols, (j + 0.5) / grid.rows);
      if (cell < 0) continue;
      sum[cell] += grid.area[k] * grid.points[k];
      area[cell] += grid.area[k];
    }
  }
  centroids_.resize(sum.size());
  for (std::size_t c = 0; c < sum.size(); ++c) {
    centroids_[c] = area[c] > 0.0 ? Vec3(sum[c] / area[c]) : Vec3::Zero();
  }
}

std::vector<Vec3> GroundTruthSkin::nominal_centroids() const {
  return geometry::grid_cell_centers(*chart_, params_.cols, params_.rows);
}

}  // namespace skinrig::sim
