#include "skinrig/control/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/QR>

#include "skinrig/errors.hpp"

namespace skinrig::control {

namespace {

using MatX = Eigen::MatrixXd;

constexpr double kFeasTol = 1e-10;
constexpr double kDualTol = -1e-12;
constexpr int kMaxIterations = 100;
constexpr std::size_t kEnumerationLimit = 16;

struct Problem {
  MatX c;  // stacked [J_e; sqrt(lambda) I]
  VecX d;  // [x_dot_ref; 0]
  MatX a;  // constraint rows a_i = u_i^T J_i
  VecX b;
};

struct EqSolution {
  VecX x;
  VecX mu;
};

// min |Cx - d| s.t. A_W x = b_W by the null-space method. Empty when the
// working rows are linearly dependent.
std::optional<EqSolution> solve_equality(const Problem& p, const std::vector<int>& w) {
  const auto n = p.c.cols();
  const auto m = static_cast<Eigen::Index>(w.size());
  if (m == 0) {
    EqSolution s;
    s.x = p.c.colPivHouseholderQr().solve(p.d);
    s.mu.resize(0);
    return s;
  }
  if (m > n) return std::nullopt;
  MatX aw(m, n);
  VecX bw(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    aw.row(i) = p.a.row(w[i]);
    bw[i] = p.b[w[i]];
  }
  Eigen::HouseholderQR<MatX> qr(aw.transpose());
  const MatX q = qr.householderQ();
  const MatX r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(r(i, i)) < 1e-12 * scale) return std::nullopt;
  }
  const MatX q1 = q.leftCols(m);
  const MatX q2 = q.rightCols(n - m);
  // A x = b with x = Q1 y + Q2 z  =>  R^T y = b
  const VecX y = r.transpose().triangularView<Eigen::Lower>().solve(bw);
  VecX x = q1 * y;
  if (n - m > 0) {
    const MatX cq2 = p.c * q2;
    const VecX z = cq2.colPivHouseholderQr().solve(p.d - p.c * x);
    x += q2 * z;
  }
  // stationarity: C^T (C x - d) = A_W^T mu
  const VecX grad = p.c.transpose() * (p.c * x - p.d);
  EqSolution s;
  s.x = x;
  s.mu = r.triangularView<Eigen::Upper>().solve(q1.transpose() * grad);
  return s;
}

double most_violated(const Problem& p, const VecX& x, int& which) {
  which = -1;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p.a.rows(); ++i) {
    const double slack = p.a.row(i).dot(x) - p.b[i];
    const double tol = kFeasTol * std::max(1.0, std::abs(p.b[i]));
    if (slack < -tol && slack < worst) {
      worst = slack;
      which = static_cast<int>(i);
    }
  }
  return worst;
}

bool is_kkt(const Problem& p, const std::vector<int>& w, const EqSolution& s) {
  int which = -1;
  most_violated(p, s.x, which);
  if (which >= 0) return false;
  for (Eigen::Index i = 0; i < s.mu.size(); ++i) {
    if (s.mu[i] < kDualTol * std::max(1.0, s.mu.cwiseAbs().maxCoeff())) return false;
  }
  (void)w;
  return true;
}

QPResult make_result(const std::vector<int>& w, const EqSolution& s, int iterations) {
  QPResult r;
  r.q_dot = s.x;
  r.active = w;
  r.multipliers.assign(s.mu.data(), s.mu.data() + s.mu.size());
  r.iterations = iterations;
  return r;
}

}  // namespace

ForcePolicy ForcePolicy::proportional(double gain) {
  if (!(gain >= 0.0)) throw std::invalid_argument("force policy gain must be non-negative");
  return ForcePolicy(gain);
}

QPResult qp_solve(const QPSpec& spec) {
  const auto n = spec.j_e.cols();
  if (spec.j_e.rows() != 3 || n < 1) throw std::invalid_argument("J_e must be 3 x n");
  if (!(spec.regularization >= 0.0)) throw std::invalid_argument("regularization must be >= 0");

  Problem p;
  p.c = MatX::Zero(3 + n, n);
  p.c.topRows(3) = spec.j_e;
  p.c.bottomRows(n) = std::sqrt(spec.regularization) * MatX::Identity(n, n);
  p.d = VecX::Zero(3 + n);
  p.d.head(3) = spec.x_dot_ref;
  const auto m = static_cast<Eigen::Index>(spec.contacts.size());
  p.a.resize(m, n);
  p.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& c = spec.contacts[i];
    if (c.jacobian.cols() != n) throw std::invalid_argument("contact Jacobian width mismatch");
    if (!(c.rhs >= 0.0)) throw std::invalid_argument("constraint rhs must be non-negative");
    p.a.row(i) = c.u.transpose() * c.jacobian;
    p.b[i] = c.rhs;
  }

  // Dual-style active set: start unconstrained, add the most violated
  // constraint, drop working constraints whose multiplier turns negative.
  std::vector<int> w;
  auto sol = solve_equality(p, w);
  for (int it = 1; it <= kMaxIterations && sol; ++it) {
    // drop negative multipliers first
    if (sol->mu.size() > 0) {
      Eigen::Index neg;
      const double lowest = sol->mu.minCoeff(&neg);
      if (lowest < kDualTol * std::max(1.0, sol->mu.cwiseAbs().maxCoeff())) {
        w.erase(w.begin() + neg);
        sol = solve_equality(p, w);
        continue;
      }
    }
    int add = -1;
    most_violated(p, sol->x, add);
    if (add < 0) return make_result(w, *sol, it);
    w.push_back(add);
    auto next = solve_equality(p, w);
    if (!next) break;  // dependent row: leave it to the enumeration
    sol = next;
  }

  // Exhaustive fallback over working sets, smallest first. For a strictly
  // convex objective the first KKT point found is the optimum.
  if (static_cast<std::size_t>(m) <= kEnumerationLimit) {
    const std::uint32_t total = 1u << m;
    std::vector<std::uint32_t> masks(total);
    for (std::uint32_t k = 0; k < total; ++k) masks[k] = k;
    std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
      return __builtin_popcount(a) < __builtin_popcount(b);
    });
    int iterations = kMaxIterations;
    for (auto mask : masks) {
      ++iterations;
      std::vector<int> ws;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (mask & (1u << i)) ws.push_back(static_cast<int>(i));
      }
      auto s = solve_equality(p, ws);
      if (s && is_kkt(p, ws, *s)) return make_result(ws, *s, iterations);
    }
  }
  throw InfeasibleQPError("contact constraints cannot be satisfied together");
}

VecX qp_modify(const QPSpec& spec) { return qp_solve(spec).q_dot; }

}  // namespace skinrig::control
