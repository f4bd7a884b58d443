#pragma once

#include <functional>
#include <vector>

#include "skinrig/kinematics/chain.hpp"

namespace skinrig::control {

using kinematics::Jacobian;
using kinematics::VecX;

/// Maps a contact force to the minimum velocity (m/s) the contact point must
/// move along the push direction. Must be non-negative and monotone.
class ForcePolicy {
 public:
  /// f(F) = 0: never move against the touch.
  static ForcePolicy zero() { return ForcePolicy(0.0); }
  /// f(F) = gain * F, gain >= 0: yield faster under a harder push.
  static ForcePolicy proportional(double gain);

  double operator()(double force) const { return gain_ * std::max(0.0, force); }
  double gain() const { return gain_; }

 private:
  explicit ForcePolicy(double gain) : gain_(gain) {}
  double gain_;
};

/// u^T J_i q_dot >= rhs
struct ContactConstraint {
  Vec3 u;  // push direction at the contact
  Jacobian jacobian;
  double rhs = 0.0;
};

struct QPSpec {
  Vec3 x_dot_ref = Vec3::Zero();
  Jacobian j_e;
  std::vector<ContactConstraint> contacts;
  double regularization = 1e-8;
};

struct QPResult {
  VecX q_dot;
  std::vector<int> active;        // indices of constraints held at equality
  std::vector<double> multipliers;  // same order as `active`
  int iterations = 0;
};

/// Minimizes |x_dot_ref - J_e q_dot|^2 + regularization |q_dot|^2 subject to
/// every contact half-space. Throws InfeasibleQPError when the constraints
/// cannot all be met.
QPResult qp_solve(const QPSpec& spec);
VecX qp_modify(const QPSpec& spec);

}  // namespace skinrig::control
