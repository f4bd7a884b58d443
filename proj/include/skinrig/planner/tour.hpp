#pragma once

#include <cstdint>
#include <vector>

#include "skinrig/geometry/mesh.hpp"

namespace skinrig::planner {

/// Open path through every point (no return leg).
struct Tour {
  std::vector<std::size_t> order;
  double length = 0.0;
};

double path_length(const std::vector<Vec3>& points, const std::vector<std::size_t>& order);

/// Greedy nearest-neighbour path from `start`.
std::vector<std::size_t> nearest_neighbor_path(const std::vector<Vec3>& points,
                                               std::size_t start);

/// Applies improving 2-opt moves (segment reversals, including reversing a
/// prefix or suffix) until none is left. Returns the final length.
double two_opt(const std::vector<Vec3>& points, std::vector<std::size_t>& order);

/// Best length reduction available from a single 2-opt move (0 if the path
/// is 2-opt optimal).
double best_two_opt_gain(const std::vector<Vec3>& points, const std::vector<std::size_t>& order);

/// Nearest-neighbour construction + 2-opt from point 0 and from `restarts`
/// further seeded start points; the shortest result wins (ties: earliest).
/// Requires at least two points.
Tour order_tour(const std::vector<Vec3>& points, std::uint64_t seed, int restarts = 4);

}  // namespace skinrig::planner
