#pragma once

#include <cstdint>
#include <string>

#include "skinrig/kinematics/chain.hpp"
#include "skinrig/planner/touch_plan.hpp"
#include "skinrig/sim/dataset.hpp"
#include "skinrig/sim/skin_model.hpp"

namespace skinrig::sim {

struct RigOptions {
  double frame_rate = 43.0;   // Hz
  double idle_before = 1.0;   // s of untouched frames before the first touch
  double idle_after = 1.0;    // s after the last touch
  double travel_speed = 0.1;  // m/s between touches
  double min_travel = 0.2;    // s, lower bound on any move
  double standoff = 0.02;     // m, probe retreat along the approach direction
  std::string skin_id = "skin";
};

/// What the force-torque sensor reports for one tilted press: the force
/// vector along the probe axis and its projection onto the surface normal.
struct FtReading {
  Vec3 force;
  double normal_force = 0.0;
};

/// Probe pushing along -approach_dir hard enough that the normal component
/// equals `commanded_normal`.
FtReading ft_reading(const Vec3& normal, const Vec3& approach_dir, double commanded_normal);

/// Plays `plan` on the instrumented `link` and records a dataset at
/// options.frame_rate. Every touch is executed in a random arm
/// configuration; P_t is the contact tip mapped through forward kinematics
/// and back into the link frame. Throws PlanExecutionError for a touch point
/// that is not on the link surface.
CalibrationDataset run_calibration(const kinematics::RobotChain& chain, int link,
                                   const planner::TouchPlan& plan, const GroundTruthSkin& skin,
                                   std::uint64_t seed, const RigOptions& options = {});

/// CRC of the plan's JSON-lines form.
std::string plan_hash(const planner::TouchPlan& plan);

}  // namespace skinrig::sim
