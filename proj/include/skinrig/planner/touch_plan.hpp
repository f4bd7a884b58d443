#pragma once

#include <iosfwd>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "skinrig/geometry/poisson.hpp"

namespace skinrig::planner {

/// Directions the probe may not approach from: every unit vector within
/// `half_angle` of `direction` (link frame) is blocked.
struct ObstacleCone {
  Vec3 direction;
  double half_angle = 0.0;
};

struct PlanOptions {
  double max_angle = 26.0 * std::numbers::pi / 180.0;  // rad
  double press_max = 10.0;                              // N
  double dwell = 1.5;                                   // s
  std::vector<ObstacleCone> obstacles;
};

/// (time since contact start in s, target normal force in N)
using PressProfile = std::vector<std::pair<double, double>>;

struct TouchPoint {
  geometry::SurfaceSample sample;
  Vec3 approach_dir;  // probe axis, pointing away from the surface
  PressProfile press_profile;
};

struct TouchPlan {
  std::vector<TouchPoint> touches;
  double tour_length = 0.0;
  PlanOptions options;
};

/// Trapezoid 0 -> press_max -> 0 with equal ramp, hold and release thirds.
PressProfile trapezoid(double press_max, double dwell);

/// Piecewise-linear force at time t (0 outside the profile).
double profile_force(const PressProfile& profile, double t);

/// Smallest tilt away from `normal` that leaves every obstacle cone.
/// Throws AngleInfeasibleError if that tilt exceeds max_angle.
Vec3 approach_direction(const Vec3& normal, const std::vector<ObstacleCone>& obstacles,
                        double max_angle);

/// Samples must already be in tour order.
TouchPlan plan_touches(const std::vector<geometry::SurfaceSample>& ordered,
                       const PlanOptions& options = {});

/// Half of the smaller mean cell side for a cols x rows grid on a surface
/// whose mean perimeter and length are given.
double sample_radius_for_grid(double perimeter, double length, int cols, int rows);

/// JSON lines: a header record then one record per touch.
void write_plan_jsonl(std::ostream& out, const TouchPlan& plan);
std::string plan_jsonl(const TouchPlan& plan);

}  // namespace skinrig::planner
