#include "skinrig/control/contacts.hpp"

#include <algorithm>

#include "skinrig/errors.hpp"

namespace skinrig::control {

FrameContacts contacts_from_frame(const std::vector<double>& readings,
                                  const calib::SkinCalibration& cal,
                                  const kinematics::RobotChain& chain, const kinematics::VecX& q,
                                  int link, double t) {
  if (static_cast<int>(readings.size()) != cal.cell_count()) {
    throw std::invalid_argument("frame size does not match the calibration");
  }
  FrameContacts out;
  bool have_pose = false;
  kinematics::Pose pose;
  for (int c = 0; c < cal.cell_count(); ++c) {
    const double reading = readings[c];
    if (!(reading > cal.dead_band)) continue;
    const auto& field = cal.fields[c];
    const auto& model = cal.forces[c];
    if (!field.calibrated || !model.fitted) {
      out.skipped.push_back(c);
      continue;
    }
    if (!have_pose) {
      pose = kinematics::link_pose(chain, q, link);
      have_pose = true;
    }
    ContactEvent e;
    e.link = link;
    e.cell_id = c;
    e.local_point = field.centroid;
    e.position = pose * field.centroid;
    e.normal = (pose.linear() * field.normal).normalized();
    e.u = -e.normal;
    e.force = std::max(0.0, model.predict(reading));
    e.reading = reading;
    e.t = t;
    out.events.push_back(e);
  }
  return out;
}

std::vector<ContactEvent> contacts_from_frame_strict(const std::vector<double>& readings,
                                                     const calib::SkinCalibration& cal,
                                                     const kinematics::RobotChain& chain,
                                                     const kinematics::VecX& q, int link,
                                                     double t) {
  auto fc = contacts_from_frame(readings, cal, chain, q, link, t);
  if (!fc.skipped.empty()) {
    throw UncalibratedCellError("cell " + std::to_string(fc.skipped.front()) +
                                " is active but has no calibration");
  }
  return std::move(fc.events);
}

}  // namespace skinrig::control
