#pragma once

#include <vector>

#include "skinrig/calib/calibration.hpp"
#include "skinrig/kinematics/chain.hpp"

namespace skinrig::control {

/// A touch localized by a calibrated skin.
struct ContactEvent {
  int link = 0;
  int cell_id = 0;
  Vec3 local_point = Vec3::Zero();  // calibrated centroid, link frame
  Vec3 position = Vec3::Zero();     // world
  Vec3 normal = Vec3::Zero();       // outward surface normal, world
  /// Unit push direction, pointing away from the toucher into the link
  /// (the negated outward normal).
  Vec3 u = Vec3::Zero();
  double force = 0.0;    // calibrated, >= 0
  double reading = 0.0;  // raw cell reading
  double t = 0.0;
};

struct FrameContacts {
  std::vector<ContactEvent> events;
  /// Cells above the dead band without a usable calibration; skipped.
  std::vector<int> skipped;
};

/// One event per cell whose reading exceeds the calibration dead band.
FrameContacts contacts_from_frame(const std::vector<double>& readings,
                                  const calib::SkinCalibration& cal,
                                  const kinematics::RobotChain& chain, const kinematics::VecX& q,
                                  int link, double t = 0.0);

/// Throws UncalibratedCellError instead of skipping.
std::vector<ContactEvent> contacts_from_frame_strict(const std::vector<double>& readings,
                                                     const calib::SkinCalibration& cal,
                                                     const kinematics::RobotChain& chain,
                                                     const kinematics::VecX& q, int link,
                                                     double t = 0.0);

}  // namespace skinrig::control
