#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "skinrig/calib/calibration.hpp"
#include "skinrig/control/admittance.hpp"
#include "skinrig/control/contacts.hpp"
#include "skinrig/control/qp.hpp"
#include "skinrig/control/trace.hpp"
#include "skinrig/sim/skin_model.hpp"

namespace skinrig::control {

/// A skin on one link: the simulated ground truth that produces readings
/// and the calibration the controller uses to interpret them.
struct SkinUnit {
  std::string name;
  int link = 0;
  std::shared_ptr<const sim::GroundTruthSkin> truth;
  calib::SkinCalibration calibration;
  std::vector<int> watch_cells;  // logged as C_<name>_<cell>
};

enum class ControlMode {
  Qp,               // task-space tracking with contact half-space constraints
  JointAdmittance,  // per-contact admittance mapped onto one joint each
  TaskAdmittance,   // per-contact admittance along the push direction, summed
};

struct LoopConfig {
  ControlMode mode = ControlMode::Qp;
  double duration = 20.0;  // s
  double rate = 125.0;     // controller Hz
  double skin_rate = 43.0; // skin frames Hz (sample and hold)
  kinematics::VecX q0;

  // task reference: end effector moves linearly by task_delta over duration
  Vec3 task_delta = Vec3::Zero();
  double kp = 5.0;  // 1/s, position feedback on the task reference

  // joint reference: q0 + amplitude * sin(2 pi t / period)
  kinematics::VecX joint_amplitude;
  double joint_period = 10.0;

  ForcePolicy policy = ForcePolicy::zero();
  double regularization = 1e-8;
  AdmittanceParams admittance;
  /// Smallest lever arm (m) for a joint to take a contact in joint mode.
  double lever_min = 0.02;
  std::uint64_t seed = 1;
};

struct Telemetry {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;
  std::vector<double> series(const std::string& name) const;
  std::string csv() const;
};

/// Joint that takes a contact in joint mode: the most distal joint at or
/// below the contact's link whose lever (w_j x (p - o_j)) . u reaches
/// lever_min. Returns -1 if none does; `sign` receives the lever's sign.
int select_joint(const kinematics::RobotChain& chain, const kinematics::VecX& q, int link,
                 const Vec3& local_point, const Vec3& u_world, double lever_min, double& sign);

/// Fixed-rate loop: scripted touches -> simulated skin frames -> calibrated
/// contacts -> controller -> integrated joint state. Columns: t, q_i,
/// qdot_i, ee_x/y/z, e_x/y/z (reference minus actual), n_contacts, pdot_u
/// (velocity of the strongest localized contact along its push direction),
/// pdot_true (same at the true touch), qp_status (1 = safe stop),
/// qp_active (constraints held at equality), dq_i (admittance joint
/// offsets), dxt_x/y/z (admittance task offset), watched cell readings.
Telemetry run_closed_loop(const kinematics::RobotChain& chain, const std::vector<SkinUnit>& skins,
                          const LoopConfig& config, const ContactTrace& trace);

}  // namespace skinrig::control
