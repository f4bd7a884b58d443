#pragma once

// Brute-force QP oracle: try every active set, solve the full KKT system
// by LU, keep the candidate that is primal feasible with non-negative
// multipliers. The objective is strictly convex, so that point is the
// unique optimum.

#include <limits>
#include <optional>

#include <Eigen/LU>

#include "skinrig/control/qp.hpp"

namespace skinrig::oracle {

inline double qp_objective(const control::QPSpec& s, const kinematics::VecX& qd) {
  return (s.x_dot_ref - s.j_e * qd).squaredNorm() + s.regularization * qd.squaredNorm();
}

inline double qp_violation(const control::QPSpec& s, const kinematics::VecX& qd) {
  double worst = 0.0;
  for (const auto& c : s.contacts) worst = std::max(worst, c.rhs - c.u.dot(c.jacobian * qd));
  return worst;
}

inline std::optional<kinematics::VecX> qp_brute_force(const control::QPSpec& s, double tol = 1e-9) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const auto n = s.j_e.cols();
  const auto m = static_cast<int>(s.contacts.size());
  const MatrixXd h = s.j_e.transpose() * s.j_e + s.regularization * MatrixXd::Identity(n, n);
  const VectorXd g = s.j_e.transpose() * s.x_dot_ref;
  std::optional<VectorXd> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i) {
      if (mask & (1 << i)) act.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(act.size());
    MatrixXd kkt = MatrixXd::Zero(n + k, n + k);
    VectorXd rhs(n + k);
    kkt.topLeftCorner(n, n) = h;
    rhs.head(n) = g;
    for (Eigen::Index r = 0; r < k; ++r) {
      const auto& c = s.contacts[act[r]];
      const VectorXd a = (c.u.transpose() * c.jacobian).transpose();
      kkt.block(0, n + r, n, 1) = -a;
      kkt.block(n + r, 0, 1, n) = a.transpose();
      rhs[n + r] = c.rhs;
    }
    Eigen::FullPivLU<MatrixXd> lu(kkt);
    if (!lu.isInvertible()) continue;
    const VectorXd z = lu.solve(rhs);
    const VectorXd qd = z.head(n);
    if ((z.tail(k).array() < -tol).any()) continue;
    if (qp_violation(s, qd) > tol) continue;
    const double obj = qp_objective(s, qd);
    if (obj < best_obj) {
      best_obj = obj;
      best = qd;
    }
  }
  return best;
}

}  // namespace skinrig::oracle
