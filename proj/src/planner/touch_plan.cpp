#include "skinrig/planner/touch_plan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "skinrig/errors.hpp"

namespace skinrig::planner {

namespace {

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

bool blocked(const Vec3& d, const std::vector<ObstacleCone>& cones) {
  for (const auto& c : cones) {
    if (angle_between(d, c.direction.normalized()) < c.half_angle) return true;
  }
  return false;
}

Vec3 tilt(const Vec3& n, const Vec3& t1, const Vec3& t2, double alpha, double phi) {
  const Vec3 side = std::cos(phi) * t1 + std::sin(phi) * t2;
  return (std::cos(alpha) * n + std::sin(alpha) * side).normalized();
}

}  // namespace

PressProfile trapezoid(double press_max, double dwell) {
  return {{0.0, 0.0}, {dwell / 3.0, press_max}, {2.0 * dwell / 3.0, press_max}, {dwell, 0.0}};
}

double profile_force(const PressProfile& profile, double t) {
  if (profile.empty() || t <= profile.front().first || t >= profile.back().first) return 0.0;
  for (std::size_t k = 1; k < profile.size(); ++k) {
    const auto& [t0, f0] = profile[k - 1];
    const auto& [t1, f1] = profile[k];
    if (t <= t1) {
      if (t1 <= t0) return f1;
      return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
    }
  }
  return 0.0;
}

Vec3 approach_direction(const Vec3& normal, const std::vector<ObstacleCone>& obstacles,
                        double max_angle) {
  const Vec3 n = normal.normalized();
  if (!blocked(n, obstacles)) return n;

  // Candidate set: for each cone, the exact escape tilt away from its axis,
  // then a polar grid as a fallback when cones overlap.
  constexpr double kEscape = 1e-9;
  std::vector<Vec3> candidates;
  for (const auto& c : obstacles) {
    const Vec3 axis = c.direction.normalized();
    const double gamma = angle_between(n, axis);
    if (gamma >= c.half_angle) continue;
    // tangent direction at n that increases the angle to the cone axis
    Vec3 away = n.dot(axis) * n - axis;
    if (away.norm() < 1e-12) {
      away = n.unitOrthogonal();
    } else {
      away.normalize();
    }
    const double alpha = c.half_angle - gamma + kEscape;
    candidates.push_back((std::cos(alpha) * n + std::sin(alpha) * away).normalized());
  }
  const Vec3 t1 = n.unitOrthogonal();
  const Vec3 t2 = n.cross(t1);
  constexpr int kTiltSteps = 2048;
  constexpr int kAzimuthSteps = 720;
  const double reach = std::min(max_angle * 1.5, std::numbers::pi / 2);
  for (int a = 1; a <= kTiltSteps; ++a) {
    const double alpha = reach * a / kTiltSteps;
    bool any = false;
    for (int p = 0; p < kAzimuthSteps; ++p) {
      const Vec3 d = tilt(n, t1, t2, alpha, 2.0 * std::numbers::pi * p / kAzimuthSteps);
      if (!blocked(d, obstacles)) {
        candidates.push_back(d);
        any = true;
        break;
      }
    }
    if (any) break;
  }

  double best_tilt = std::numeric_limits<double>::infinity();
  Vec3 best = n;
  for (const auto& d : candidates) {
    if (blocked(d, obstacles)) continue;
    const double a = angle_between(n, d);
    if (a < best_tilt) {
      best_tilt = a;
      best = d;
    }
  }
  if (!(best_tilt <= max_angle)) {
    throw AngleInfeasibleError("no approach within " + std::to_string(max_angle * 180.0 / std::numbers::pi) +
                               " deg of the normal avoids the obstacles");
  }
  return best;
}

TouchPlan plan_touches(const std::vector<geometry::SurfaceSample>& ordered,
                       const PlanOptions& options) {
  if (!(options.press_max >= 0.0) || options.press_max > 10.0) {
    throw std::invalid_argument("press_max must lie in [0, 10] N");
  }
  if (!(options.dwell > 0.0)) throw std::invalid_argument("dwell must be positive");
  TouchPlan plan;
  plan.options = options;
  const PressProfile profile = trapezoid(options.press_max, options.dwell);
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    const auto& s = ordered[k];
    plan.touches.push_back({s, approach_direction(s.normal, options.obstacles, options.max_angle),
                            profile});
    if (k > 0) plan.tour_length += (s.position - ordered[k - 1].position).norm();
  }
  return plan;
}

double sample_radius_for_grid(double perimeter, double length, int cols, int rows) {
  return 0.5 * std::min(perimeter / cols, length / rows);
}

void write_plan_jsonl(std::ostream& out, const TouchPlan& plan) {
  using nlohmann::json;
  auto arr = [](const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); };
  json header{{"kind", "skinrig.touch_plan"},
              {"version", "1.0"},
              {"count", plan.touches.size()},
              {"tour_length", plan.tour_length},
              {"max_angle", plan.options.max_angle},
              {"press_max", plan.options.press_max},
              {"dwell", plan.options.dwell}};
  out << header.dump() << '\n';
  for (std::size_t k = 0; k < plan.touches.size(); ++k) {
    const auto& t = plan.touches[k];
    json rec{{"index", k},
             {"position", arr(t.sample.position)},
             {"normal", arr(t.sample.normal)},
             {"approach_dir", arr(t.approach_dir)},
             {"tilt", angle_between(t.sample.normal, t.approach_dir)},
             {"press_profile", t.press_profile}};
    if (t.sample.cell_hint) rec["cell_hint"] = *t.sample.cell_hint;
    out << rec.dump() << '\n';
  }
}

std::string plan_jsonl(const TouchPlan& plan) {
  std::ostringstream os;
  write_plan_jsonl(os, plan);
  return os.str();
}

}  // namespace skinrig::planner
