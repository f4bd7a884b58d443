#include "skinrig/sim/rig.hpp"

#include <algorithm>
#include <cmath>

#include "skinrig/checksum.hpp"
#include "skinrig/errors.hpp"
#include "skinrig/geometry/locator.hpp"

namespace skinrig::sim {

namespace {

// Surface points may sit up to this far from the mesh.
constexpr double kOnSurfaceTol = 1e-6;

kinematics::VecX random_configuration(const kinematics::RobotChain& chain, Rng& rng) {
  kinematics::VecX q(chain.dof());
  for (int j = 0; j < chain.dof(); ++j) {
    q[j] = rng.uniform(chain.joints[j].lower, chain.joints[j].upper);
  }
  return q;
}

}  // namespace

FtReading ft_reading(const Vec3& normal, const Vec3& approach_dir, double commanded_normal) {
  const Vec3 n = normal.normalized();
  const Vec3 a = approach_dir.normalized();
  const double cos_tilt = a.dot(n);
  FtReading r;
  // the sensor pushes along -a; its magnitude grows as 1/cos(tilt)
  r.force = -(commanded_normal / cos_tilt) * a;
  r.normal_force = std::max(0.0, -r.force.dot(n));
  return r;
}

std::string plan_hash(const planner::TouchPlan& plan) {
  return hex32(crc32_of(planner::plan_jsonl(plan)));
}

CalibrationDataset run_calibration(const kinematics::RobotChain& chain, int link,
                                   const planner::TouchPlan& plan, const GroundTruthSkin& skin,
                                   std::uint64_t seed, const RigOptions& options) {
  if (link < 0 || link > chain.dof()) throw LinkIndexError("instrumented link out of range");
  if (!(options.frame_rate > 0.0)) throw std::invalid_argument("frame rate must be positive");

  const auto& lateral = skin.chart().lateral();
  const geometry::TriangleLocator locator(lateral, 0.01);

  Rng pose_rng(Rng::mix(seed, 1));
  Rng noise_rng(Rng::mix(seed, 2));

  CalibrationDataset ds;
  ds.skin_id = options.skin_id;
  ds.frame_rate = options.frame_rate;
  ds.cell_count = skin.cell_count();
  ds.seed = seed;
  ds.plan_hash = plan_hash(plan);

  const std::vector<double> idle(static_cast<std::size_t>(skin.cell_count()), 0.0);
  const double dt = 1.0 / options.frame_rate;
  std::size_t frame = 0;
  auto frame_time = [&]() { return static_cast<double>(frame) * dt; };

  auto standoff = [&](const planner::TouchPoint& tp) {
    return Vec3(tp.sample.position + options.standoff * tp.approach_dir);
  };

  Vec3 probe = plan.touches.empty() ? Vec3::Zero() : standoff(plan.touches.front());
  double clock = options.idle_before;
  while (frame_time() < clock) {
    ds.append(frame_time(), idle, 0.0, probe);
    ++frame;
  }

  for (std::size_t k = 0; k < plan.touches.size(); ++k) {
    const auto& tp = plan.touches[k];
    if (locator.closest(tp.sample.position).distance > kOnSurfaceTol) {
      throw PlanExecutionError("touch " + std::to_string(k) + " is not on the link surface");
    }

    // Move to the next standoff point.
    const Vec3 target = standoff(tp);
    const double travel =
        std::max(options.min_travel, (target - probe).norm() / options.travel_speed);
    const double move_start = clock;
    clock += travel;
    while (frame_time() < clock) {
      const double s = (frame_time() - move_start) / travel;
      ds.append(frame_time(), idle, 0.0, probe + s * (target - probe));
      ++frame;
    }

    // Press. The contact tip goes through forward kinematics in a random
    // arm pose and back into the link frame, as a real rig would log it.
    const auto q = random_configuration(chain, pose_rng);
    const auto pose = kinematics::link_pose(chain, q, link);
    const Vec3 world = pose * tp.sample.position;
    const Vec3 tip = pose.inverse() * world;
    if ((tip - tp.sample.position).norm() > kOnSurfaceTol) {
      throw PlanExecutionError("touch " + std::to_string(k) + " lost precision in the FK round trip");
    }
    const auto overlaps = skin.overlap(tip, tp.sample.normal);
    const double press_start = clock;
    const double press_end = clock + tp.press_profile.back().first;
    while (frame_time() < press_end) {
      const double commanded = planner::profile_force(tp.press_profile, frame_time() - press_start);
      const FtReading ft = ft_reading(tp.sample.normal, tp.approach_dir, commanded);
      ds.append(frame_time(), skin.response(overlaps, ft.normal_force, &noise_rng), ft.normal_force,
                tip);
      ++frame;
    }
    clock = press_end;
    probe = target;
  }

  clock += options.idle_after;
  while (frame_time() < clock) {
    ds.append(frame_time(), idle, 0.0, probe);
    ++frame;
  }
  return ds;
}

}  // namespace skinrig::sim
