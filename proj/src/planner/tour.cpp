#include "skinrig/planner/tour.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "skinrig/rng.hpp"

namespace skinrig::planner {

namespace {

// improvements below this are treated as float noise
constexpr double kGainEps = 1e-12;

double dist(const std::vector<Vec3>& p, std::size_t a, std::size_t b) {
  return (p[a] - p[b]).norm();
}

// Change in length from reversing order[i..j]; positions outside the path
// contribute no edge.
double reversal_gain(const std::vector<Vec3>& p, const std::vector<std::size_t>& o,
                     std::size_t i, std::size_t j) {
  const std::size_t n = o.size();
  double before = 0.0, after = 0.0;
  if (i > 0) {
    before += dist(p, o[i - 1], o[i]);
    after += dist(p, o[i - 1], o[j]);
  }
  if (j + 1 < n) {
    before += dist(p, o[j], o[j + 1]);
    after += dist(p, o[i], o[j + 1]);
  }
  return before - after;
}

}  // namespace

double path_length(const std::vector<Vec3>& points, const std::vector<std::size_t>& order) {
  double len = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) len += dist(points, order[k - 1], order[k]);
  return len;
}

std::vector<std::size_t> nearest_neighbor_path(const std::vector<Vec3>& points,
                                               std::size_t start) {
  const std::size_t n = points.size();
  std::vector<bool> used(n, false);
  std::vector<std::size_t> order;
  order.reserve(n);
  std::size_t cur = start;
  used[cur] = true;
  order.push_back(cur);
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (used[k]) continue;
      const double d = dist(points, cur, k);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[best] = true;
    order.push_back(best);
    cur = best;
  }
  return order;
}

double two_opt(const std::vector<Vec3>& points, std::vector<std::size_t>& order) {
  const std::size_t n = order.size();
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (reversal_gain(points, order, i, j) > kGainEps) {
          std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i),
                       order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
        }
      }
    }
  }
  return path_length(points, order);
}

double best_two_opt_gain(const std::vector<Vec3>& points, const std::vector<std::size_t>& order) {
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      best = std::max(best, reversal_gain(points, order, i, j));
    }
  }
  return best;
}

Tour order_tour(const std::vector<Vec3>& points, std::uint64_t seed, int restarts) {
  if (points.size() < 2) throw std::invalid_argument("a tour needs at least two points");
  Rng rng(seed);
  std::vector<std::size_t> starts{0};
  for (int r = 0; r < restarts; ++r) starts.push_back(static_cast<std::size_t>(rng.below(points.size())));

  Tour best;
  best.length = std::numeric_limits<double>::infinity();
  for (auto s : starts) {
    auto order = nearest_neighbor_path(points, s);
    const double len = two_opt(points, order);
    if (len < best.length) best = {std::move(order), len};
  }
  return best;
}

}  // namespace skinrig::planner
