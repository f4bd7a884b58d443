#include "skinrig/geometry/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "skinrig/errors.hpp"
#include "skinrig/geometry/locator.hpp"
#include "skinrig/rng.hpp"

namespace skinrig::geometry {

namespace {

// Hash grid over accepted samples with cell side r/sqrt(3), so each cell
// holds at most one sample and a 5x5x5 neighbourhood covers distance r.
class SampleGrid {
 public:
  explicit SampleGrid(double radius) : r_(radius), cell_(radius / std::sqrt(3.0)) {}

  bool far_enough(const Vec3& p, const std::vector<SurfaceSample>& samples) const {
    return nearest_within(p, samples, r_) >= r_;
  }

  /// Distance to the nearest sample if it is below `limit`, else `limit`.
  double nearest_within(const Vec3& p, const std::vector<SurfaceSample>& samples,
                        double limit) const {
    const auto c = cell_of(p);
    const long reach = static_cast<long>(std::ceil(limit / cell_));
    double best = limit;
    for (long x = c[0] - reach; x <= c[0] + reach; ++x)
      for (long y = c[1] - reach; y <= c[1] + reach; ++y)
        for (long z = c[2] - reach; z <= c[2] + reach; ++z) {
          auto it = cells_.find(key(x, y, z));
          if (it == cells_.end()) continue;
          for (auto idx : it->second) {
            best = std::min(best, (samples[idx].position - p).norm());
          }
        }
    return best;
  }

  void insert(const Vec3& p, std::size_t idx) {
    const auto c = cell_of(p);
    cells_[key(c[0], c[1], c[2])].push_back(idx);
  }

 private:
  std::array<long, 3> cell_of(const Vec3& p) const {
    return {static_cast<long>(std::floor(p.x() / cell_)),
            static_cast<long>(std::floor(p.y() / cell_)),
            static_cast<long>(std::floor(p.z() / cell_))};
  }
  static std::uint64_t key(long x, long y, long z) {
    const auto ux = static_cast<std::uint64_t>(x + (1L << 20)) & 0x1fffff;
    const auto uy = static_cast<std::uint64_t>(y + (1L << 20)) & 0x1fffff;
    const auto uz = static_cast<std::uint64_t>(z + (1L << 20)) & 0x1fffff;
    return (ux << 42) | (uy << 21) | uz;
  }

  double r_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

// Area-weighted uniform point on the mesh.
class AreaSampler {
 public:
  explicit AreaSampler(const LinkSurface& s) : s_(s) {
    cumulative_.reserve(s.triangles.size());
    double total = 0.0;
    for (std::size_t t = 0; t < s.triangles.size(); ++t) {
      total += face_area(s, t);
      cumulative_.push_back(total);
    }
  }
  double total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  std::pair<Vec3, std::uint32_t> draw(Rng& rng) const {
    const double x = rng.uniform() * total();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    const auto t = static_cast<std::uint32_t>(
        std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                 static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
    double a = rng.uniform();
    double b = rng.uniform();
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    const auto& tri = s_.triangles[t];
    const Vec3& p0 = s_.vertices[tri[0]];
    return {p0 + a * (s_.vertices[tri[1]] - p0) + b * (s_.vertices[tri[2]] - p0), t};
  }

 private:
  const LinkSurface& s_;
  std::vector<double> cumulative_;
};

}  // namespace

std::vector<SurfaceSample> poisson_disc_sample(const LinkSurface& surface, double radius,
                                               std::uint64_t seed,
                                               const PoissonOptions& options) {
  validate(surface);
  if (!(radius > 0.0)) throw InvalidSurfaceError("radius must be positive");
  const LinkSurface mesh = options.lateral_only ? lateral_part(surface) : surface;
  if (mesh.triangles.empty()) throw InvalidSurfaceError("no faces to sample");

  Rng rng(seed);
  const TriangleLocator locator(mesh, std::max(radius, 1e-6));
  const AreaSampler darts(mesh);
  SampleGrid grid(radius);
  std::vector<SurfaceSample> samples;
  std::vector<std::size_t> active;

  auto accept = [&](const Vec3& p, std::uint32_t tri) {
    samples.push_back({p, face_normal(mesh, tri), std::nullopt});
    grid.insert(p, samples.size() - 1);
    active.push_back(samples.size() - 1);
  };

  auto run_front = [&]() {
    while (!active.empty()) {
      const std::size_t slot = static_cast<std::size_t>(rng.below(active.size()));
      const SurfaceSample base = samples[active[slot]];
      // tangent frame at the active sample
      const Vec3& n = base.normal;
      Vec3 t1 = n.unitOrthogonal();
      Vec3 t2 = n.cross(t1);
      bool placed = false;
      for (int c = 0; c < options.candidates; ++c) {
        const double ang = 2.0 * std::numbers::pi * rng.uniform();
        // uniform by area in the annulus [r, 2r]
        const double rho = radius * std::sqrt(1.0 + 3.0 * rng.uniform());
        const Vec3 q = base.position + rho * (std::cos(ang) * t1 + std::sin(ang) * t2);
        const auto cp = locator.closest(q);
        if (!grid.far_enough(cp.point, samples)) continue;
        if ((cp.point - base.position).norm() > 2.0 * radius) continue;
        accept(cp.point, cp.triangle);
        placed = true;
        break;
      }
      if (!placed) {
        active[slot] = active.back();
        active.pop_back();
      }
    }
  };

  {
    auto [p, t] = darts.draw(rng);
    accept(p, t);
    run_front();
  }
  const auto n_darts =
      static_cast<long>(std::ceil(options.coverage_darts * darts.total() / (radius * radius)));
  for (long i = 0; i < n_darts; ++i) {
    auto [p, t] = darts.draw(rng);
    if (grid.nearest_within(p, samples, 2.0 * radius) < 2.0 * radius) continue;
    accept(p, t);
    run_front();
  }

  if (samples.size() < 4) {
    throw RadiusTooLargeError("radius " + std::to_string(radius) + " yields only " +
                              std::to_string(samples.size()) + " samples");
  }
  return samples;
}

}  // namespace skinrig::geometry
