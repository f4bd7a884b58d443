#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles/qp_oracle.hpp"
#include "skinrig/control/admittance.hpp"
#include "skinrig/control/closed_loop.hpp"
#include "skinrig/control/contacts.hpp"
#include "skinrig/control/qp.hpp"
#include "skinrig/control/trace.hpp"
#include "skinrig/errors.hpp"
#include "skinrig/pipeline/pipeline.hpp"
#include "support.hpp"

using namespace skinrig;
using namespace skinrig::control;
using kinematics::VecX;

namespace {

Jacobian random_jacobian(Rng& rng, int n) {
  Jacobian j(3, n);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < n; ++c) j(r, c) = rng.uniform(-1.0, 1.0);
  }
  return j;
}

Vec3 random_unit(Rng& rng) {
  Vec3 v(rng.normal(), rng.normal(), rng.normal());
  return v.normalized();
}

double row_dot(const ContactConstraint& c, const VecX& qd) { return c.u.dot(c.jacobian * qd); }

// C^T (C x - d) - sum mu_i a_i with C = [J_e; sqrt(reg) I]
double stationarity(const QPSpec& s, const QPResult& r) {
  VecX g = s.j_e.transpose() * (s.j_e * r.q_dot - s.x_dot_ref) + s.regularization * r.q_dot;
  for (std::size_t i = 0; i < r.active.size(); ++i) {
    const auto& c = s.contacts[r.active[i]];
    g -= r.multipliers[i] * (c.u.transpose() * c.jacobian).transpose();
  }
  return g.cwiseAbs().maxCoeff();
}

std::vector<double> step(double f, int samples) { return std::vector<double>(samples, f); }

const pipeline::PipelineConfig& qp_config() {
  static const auto cfg = pipeline::load_config(test::asset("configs/qp_demo.json"));
  return cfg;
}

const kinematics::RobotChain& proxy() {
  static const auto chain = pipeline::load_config_chain(qp_config());
  return chain;
}

const std::vector<SkinUnit>& forearm() {
  static const auto units = [] {
    const auto& cfg = qp_config();
    const auto& skin = cfg.skins.at(0);
    auto run = pipeline::calibrate_skin(proxy(), skin, cfg, pipeline::skin_seed(cfg.seed, skin), nullptr);
    return std::vector<SkinUnit>{{skin.name, skin.link, run.truth, run.calibration, skin.watch_cells}};
  }();
  return units;
}

LoopConfig short_loop() {
  auto loop = qp_config().control;
  loop.duration = 4.0;
  return loop;
}

ContactTrace trace_of(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in);
}

calib::SkinCalibration two_cell_calibration(double slope) {
  calib::SkinCalibration cal;
  cal.cols = 2;
  cal.rows = 1;
  cal.dead_band = 0.0;
  for (int c = 0; c < 2; ++c) {
    calib::CellReceptiveField f;
    f.cell_id = c;
    f.calibrated = true;
    f.centroid = Vec3(0.01 * (c + 1), 0.05, 0.1);
    f.normal = Vec3(0, 1, 0);
    cal.fields.push_back(f);
    calib::CellForceModel m;
    m.cell_id = c;
    m.slope = slope;
    m.fitted = true;
    cal.forces.push_back(m);
  }
  return cal;
}

}  // namespace

TEST_CASE("QP without contacts is regularized least squares") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    QPSpec s;
    s.j_e = random_jacobian(rng, 6);
    s.x_dot_ref = Vec3(rng.normal(), rng.normal(), rng.normal());
    // (J^T J + l I)^-1 J^T = J^T (J J^T + l I)^-1, and the right side is well conditioned
    const Eigen::Matrix3d g = s.j_e * s.j_e.transpose() + s.regularization * Eigen::Matrix3d::Identity();
    const VecX want = s.j_e.transpose() * g.ldlt().solve(s.x_dot_ref);
    const VecX got = qp_modify(s);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, want.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("an inactive contact leaves the unconstrained answer unchanged") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    QPSpec s;
    s.j_e = random_jacobian(rng, 6);
    s.x_dot_ref = Vec3(rng.normal(), rng.normal(), rng.normal());
    const VecX free = qp_modify(s);
    ContactConstraint c{random_unit(rng), random_jacobian(rng, 6), 0.0};
    if (row_dot(c, free) < 0.0) c.u = -c.u;
    s.contacts.push_back(c);
    const auto r = qp_solve(s);
    CHECK(r.active.empty());
    CHECK((r.q_dot - free).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("one violated contact with f = 0 is held at equality and matches the KKT oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    QPSpec s;
    s.j_e = random_jacobian(rng, 6);
    s.x_dot_ref = Vec3(rng.normal(), rng.normal(), rng.normal());
    const VecX free = qp_modify(s);
    ContactConstraint c{random_unit(rng), random_jacobian(rng, 6), 0.0};
    if (row_dot(c, free) > 0.0) c.u = -c.u;
    s.contacts.push_back(c);
    const auto r = qp_solve(s);
    const auto oracle = oracle::qp_brute_force(s);
    REQUIRE(oracle);
    CHECK(r.active == std::vector<int>{0});
    CHECK(std::abs(row_dot(c, r.q_dot)) <= 1e-6);
    CHECK((r.q_dot - *oracle).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(stationarity(s, r) <= 1e-6);
    CHECK(r.multipliers.at(0) >= 0.0);
  }
}

TEST_CASE("random multi-contact QPs: feasible, stationary, oracle-optimal") {
  Rng rng(4);
  int infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    QPSpec s;
    s.j_e = random_jacobian(rng, 6);
    s.x_dot_ref = Vec3(rng.normal(), rng.normal(), rng.normal());
    const bool zero_policy = trial % 2 == 0;
    const int m = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < m; ++i) {
      s.contacts.push_back({random_unit(rng), random_jacobian(rng, 6), zero_policy ? 0.0 : rng.uniform(0.0, 0.5)});
    }
    const auto oracle = oracle::qp_brute_force(s);
    if (!oracle) {
      CHECK_FALSE(zero_policy);
      CHECK_THROWS_AS(qp_solve(s), InfeasibleQPError);
      ++infeasible;
      continue;
    }
    const auto r = qp_solve(s);
    for (const auto& c : s.contacts) CHECK(row_dot(c, r.q_dot) >= c.rhs - 1e-6);
    CHECK(stationarity(s, r) <= 1e-6);
    for (double mu : r.multipliers) CHECK(mu >= -1e-9);
    CHECK((r.q_dot - *oracle).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("QP optimum beats 1000 random feasible perturbations") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    QPSpec s;
    s.j_e = random_jacobian(rng, 6);
    s.x_dot_ref = Vec3(rng.normal(), rng.normal(), rng.normal());
    for (int i = 0; i < 3; ++i) s.contacts.push_back({random_unit(rng), random_jacobian(rng, 6), 0.0});
    const auto r = qp_solve(s);
    const double best = oracle::qp_objective(s, r.q_dot);
    int tried = 0;
    while (tried < 1000) {
      VecX d(6);
      for (int j = 0; j < 6; ++j) d[j] = rng.normal(0.0, 0.05);
      const VecX q = r.q_dot + d;
      if (oracle::qp_violation(s, q) > 0.0) continue;
      ++tried;
      CHECK(oracle::qp_objective(s, q) >= best - 1e-12);
    }
  }
}

TEST_CASE("conflicting positive constraints are infeasible") {
  Rng rng(6);
  QPSpec s;
  s.j_e = random_jacobian(rng, 6);
  const Jacobian j = random_jacobian(rng, 6);
  const Vec3 u = random_unit(rng);
  s.contacts = {{u, j, 0.1}, {-u, j, 0.1}};
  CHECK_THROWS_AS(qp_solve(s), InfeasibleQPError);
  s.contacts = {{u, j, 0.0}, {-u, j, 0.0}};
  CHECK(std::abs(u.dot(j * qp_modify(s))) <= 1e-9);
}

TEST_CASE("force policies") {
  CHECK(ForcePolicy::zero()(7.0) == 0.0);
  CHECK(ForcePolicy::proportional(0.01)(5.0) == doctest::Approx(0.05));
  CHECK(ForcePolicy::proportional(0.01)(-5.0) == 0.0);
  CHECK_THROWS_AS(ForcePolicy::proportional(-1.0), std::invalid_argument);
}

TEST_CASE("admittance: zero input stays at rest") {
  for (double x : admittance_response(AdmittanceParams{}, step(0.0, 500))) CHECK(x == 0.0);
}

TEST_CASE("admittance: 5 N step settles at F/K within 1e-6 by 2 s") {
  const AdmittanceParams p;  // K 500, B 2 sqrt(K), M 0, 125 Hz
  const int n = static_cast<int>(std::lround(2.0 / p.ts));
  const auto x = admittance_response(p, step(5.0, n + 1));
  CHECK(std::abs(x[n] - 0.01) <= 1e-6);
  CHECK(std::abs(x.back() - 5.0 / p.k) <= 1e-6);
}

TEST_CASE("admittance: critically damped trace follows the continuous solution") {
  AdmittanceParams p;
  p.m = 1.0;
  p.b = 2.0;
  p.k = 1.0;
  const double f = 1.0;
  const int n = static_cast<int>(std::lround(5.0 / p.ts));
  auto exact = [&](double t) { return t < 0.0 ? 0.0 : f * (1.0 - std::exp(-t) * (1.0 + t)) / p.k; };
  auto sup = [&](const std::vector<double>& x, double shift) {
    double worst = 0.0;
    for (int k = 0; k <= n; ++k) worst = std::max(worst, std::abs(x[k] - exact(k * p.ts + shift)));
    return worst;
  };
  // A step sampled at its jump takes the midpoint value, F(0) = F/2.
  auto sampled = step(f, n + 1);
  sampled[0] = 0.5 * f;
  const double err = sup(admittance_response(p, sampled), 0.0);
  INFO("sup-norm error " << err);
  CHECK(err <= 1e-3);
  // Starting at full force instead puts the edge half a sample early.
  const auto raw = admittance_response(p, step(f, n + 1));
  CHECK(sup(raw, 0.5 * p.ts) <= 1e-3);
  CHECK(sup(raw, 0.0) > 1e-3);
}

TEST_CASE("admittance is linear in the force") {
  Rng rng(7);
  std::vector<double> f(300);
  for (auto& v : f) v = rng.uniform(0.0, 10.0);
  for (AdmittanceForm form : {AdmittanceForm::Tustin, AdmittanceForm::Printed}) {
    AdmittanceParams p;
    p.form = form;
    const auto base = admittance_response(p, f);
    for (double alpha : {0.5, 2.0, -3.0}) {
      std::vector<double> g(f);
      for (auto& v : g) v *= alpha;
      const auto scaled = admittance_response(p, g);
      double peak = 0.0, worst = 0.0;
      for (std::size_t k = 0; k < f.size(); ++k) {
        peak = std::max(peak, std::abs(alpha * base[k]));
        worst = std::max(worst, std::abs(scaled[k] - alpha * base[k]));
      }
      CHECK(worst <= 1e-12 * peak);
    }
  }
}

TEST_CASE("admittance recursion is stable for positive mass and damping") {
  Rng rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    AdmittanceParams p;
    p.m = std::exp(rng.uniform(-6.0, 3.0));
    p.b = std::exp(rng.uniform(-6.0, 5.0));
    p.k = std::exp(rng.uniform(-3.0, 8.0));
    p.ts = std::exp(rng.uniform(-7.0, -2.0));
    INFO("M " << p.m << " B " << p.b << " K " << p.k << " Ts " << p.ts);
    CHECK(spectral_radius(p) < 1.0);
  }
}

TEST_CASE("admittance edge cases: M = 0 and B = 0 put a pole on the unit circle") {
  // M = 0: z = -1 is a root, cancelled by the (1 + z^-1)^2 input zeros.
  AdmittanceParams first_order;
  CHECK(spectral_radius(first_order) == doctest::Approx(1.0).epsilon(1e-12));
  const auto c = coefficients(first_order);
  CHECK(std::abs(c.a0 - c.a1 + c.a2) <= 1e-15);
  // the forced response is still bounded and settles
  const auto x = admittance_response(first_order, step(5.0, 1000));
  CHECK(std::abs(x.back() - 0.01) <= 1e-9);
  // B = 0: undamped spring-mass maps onto the unit circle
  AdmittanceParams undamped;
  undamped.m = 1.0;
  undamped.b = 0.0;
  CHECK(spectral_radius(undamped) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("admittance coefficients and the printed variant") {
  AdmittanceParams p;
  p.m = 2.0;
  p.b = 3.0;
  p.k = 5.0;
  p.ts = 0.01;
  const auto t = coefficients(p);
  CHECK(t.a0 == doctest::Approx(4 * 2.0 + 2 * 3.0 * 0.01 + 5.0 * 1e-4));
  CHECK(t.a1 == doctest::Approx(2 * 5.0 * 1e-4 - 8 * 2.0));
  CHECK(t.a2 == doctest::Approx(4 * 2.0 - 2 * 3.0 * 0.01 + 5.0 * 1e-4));
  CHECK(t.f == doctest::Approx(1e-4));
  p.form = AdmittanceForm::Printed;
  const auto q = coefficients(p);
  CHECK(q.a0 == doctest::Approx(4 * 2.0 + 2 * 3.0 * 1e-4 + 5.0 * 1e-4));
  CHECK(q.a2 == doctest::Approx(4 * 2.0 - 2 * 3.0 * 1e-4 + 5.0 * 1e-4));
  // both forms share the equilibrium K x = F
  for (const auto& c : {t, q}) CHECK(c.a0 + c.a1 + c.a2 == doctest::Approx(4.0 * c.f * p.k));
}

TEST_CASE("admittance parameters are validated") {
  AdmittanceParams p;
  p.k = 0.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = {};
  p.b = -1.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = {};
  p.ts = 0.0;
  CHECK_THROWS_AS(admittance_response(p, {1.0}), std::invalid_argument);
}

TEST_CASE("multi-contact composition is a plain sum in one frame") {
  const FramedVector ref{Vec3(0.1, 0.2, 0.3), "world"};
  CHECK(compose_multi_contact(ref, {}).value == ref.value);
  const FramedVector a{Vec3(0.01, -0.02, 0.03), "world"};
  const FramedVector b{-a.value, "world"};
  CHECK((compose_multi_contact(ref, {a, b}).value - ref.value).norm() <= 1e-15);
  const FramedVector c{Vec3(0.5, 0.5, 0.5), "world"};
  const Vec3 want(0.1 + 0.01 - 0.01 + 0.5, 0.2 - 0.02 + 0.02 + 0.5, 0.3 + 0.03 - 0.03 + 0.5);
  CHECK((compose_multi_contact(ref, {a, b, c}).value - want).norm() <= 1e-15);
  CHECK_THROWS_AS(compose_multi_contact(ref, {a, {Vec3::Ones(), "link4"}}), FrameMismatchError);
}

TEST_CASE("contacts from a skin frame") {
  const auto& chain = proxy();
  const VecX q = qp_config().control.q0;
  const auto cal = two_cell_calibration(0.1);

  CHECK(contacts_from_frame({0.0, 0.0}, cal, chain, q, 2).events.empty());

  const auto one = contacts_from_frame({0.0, 40.0}, cal, chain, q, 2).events;
  REQUIRE(one.size() == 1);
  CHECK(one[0].cell_id == 1);
  CHECK(one[0].force == doctest::Approx(4.0));
  CHECK((one[0].position - kinematics::forward_kinematics(chain, q, 2, cal.fields[1].centroid)).norm() <= 1e-12);
  const Vec3 n_world = kinematics::link_pose(chain, q, 2).linear() * Vec3(0, 1, 0);
  CHECK((one[0].normal - n_world).norm() <= 1e-12);
  CHECK((one[0].u + n_world).norm() <= 1e-12);

  // The same cell on two different links resolves through each link's pose.
  const auto on4 = contacts_from_frame({0.0, 40.0}, cal, chain, q, 4).events;
  REQUIRE(on4.size() == 1);
  CHECK((on4[0].position - kinematics::forward_kinematics(chain, q, 4, cal.fields[1].centroid)).norm() <= 1e-12);
  CHECK((on4[0].position - one[0].position).norm() > 1e-3);

  auto uncal = cal;
  uncal.fields[0].calibrated = false;
  const auto fc = contacts_from_frame({5.0, 5.0}, uncal, chain, q, 2);
  CHECK(fc.events.size() == 1);
  CHECK(fc.skipped == std::vector<int>{0});
  CHECK_THROWS_AS(contacts_from_frame_strict({5.0, 5.0}, uncal, chain, q, 2), UncalibratedCellError);
}

TEST_CASE("contacts from simulated touches land on the touched link") {
  const auto& unit = forearm().at(0);
  const auto& truth = *unit.truth;
  const VecX q = qp_config().control.q0;
  const int cell = 68;
  const auto c = truth.true_centroids()[cell];
  const auto [u, v] = truth.chart().param_of(c);
  const auto hit = truth.chart().surface_at(u, v);
  const auto frame = truth.synthesize_response(hit->point, hit->normal, 6.0);
  const auto events = contacts_from_frame(frame, unit.calibration, proxy(), q, unit.link).events;
  REQUIRE_FALSE(events.empty());
  const Vec3 touch = kinematics::forward_kinematics(proxy(), q, unit.link, hit->point);
  double nearest = 1e9;
  for (const auto& e : events) nearest = std::min(nearest, (e.position - touch).norm());
  CHECK(nearest <= std::hypot(truth.cell_side_u(), truth.cell_side_v()));
}

TEST_CASE("trace parsing") {
  const auto t = trace_of(
      "{\"kind\": \"skinrig.trace\", \"version\": \"1.0\"}\n"
      "{\"t\": 1.0, \"link\": 4, \"cell_id\": 3, \"force\": 0}\n"
      "{\"t\": 2.0, \"link\": 4, \"cell_id\": 3, \"force\": 4}\n"
      "{\"t\": 1.5, \"link\": 2, \"local_point\": [0.05, 0, 0.1], \"force\": 2}\n");
  REQUIRE(t.contacts.size() == 2);
  CHECK(t.contacts[0].force_at(0.5) == 0.0);
  CHECK(t.contacts[0].force_at(1.5) == doctest::Approx(2.0));
  CHECK(t.contacts[0].force_at(2.5) == 0.0);
  CHECK(t.contacts[1].local_point.has_value());

  CHECK_THROWS_AS(trace_of("{\"t\": 1.0, \"link\": 4, \"force\": 1}\n"), TraceFormatError);
  CHECK_THROWS_AS(trace_of("{\"t\": 1.0, \"link\": 4, \"cell_id\": 1, \"force\": -1}\n"), TraceFormatError);
  CHECK_THROWS_AS(trace_of("{\"t\": 1.0, \"link\": 4, \"cell_id\": 1, \"force\": 1}\n"
                           "{\"t\": 1.0, \"link\": 4, \"cell_id\": 1, \"force\": 2}\n"),
                  TraceFormatError);
  CHECK_THROWS_AS(trace_of("{not json\n"), TraceFormatError);
  CHECK_THROWS_AS(load_trace("/nonexistent/trace.jsonl"), TraceFormatError);
}

TEST_CASE("closed loop with an empty trace is pure reference tracking") {
  const auto loop = short_loop();
  const auto with_skin = run_closed_loop(proxy(), forearm(), loop, ContactTrace{});
  const auto bare = run_closed_loop(proxy(), {}, loop, ContactTrace{});
  for (const std::string col : {"q_1", "q_2", "q_3", "q_4", "q_5", "q_6", "ee_x", "ee_y", "ee_z"}) {
    CHECK(with_skin.series(col) == bare.series(col));
  }
  for (double n : with_skin.series("n_contacts")) CHECK(n == 0.0);
  for (double s : with_skin.series("qp_status")) CHECK(s == 0.0);
  for (double c : with_skin.series("C_forearm_68")) CHECK(c == 0.0);
  // Feedback keeps the end effector on the reference.
  const auto ex = with_skin.series("e_x"), ey = with_skin.series("e_y"), ez = with_skin.series("e_z");
  for (std::size_t k = 0; k < ex.size(); ++k) CHECK(std::hypot(ex[k], ey[k], ez[k]) <= 1e-3);
  // the end effector actually moved
  const auto x = with_skin.series("ee_x");
  CHECK(std::abs(x.back() - x.front()) > 0.01);
}

TEST_CASE("closed loop is deterministic and stops the contact point under a push") {
  auto loop = short_loop();
  const auto trace = trace_of(
      "{\"t\": 1.0, \"link\": 4, \"cell_id\": 68, \"force\": 0}\n"
      "{\"t\": 1.2, \"link\": 4, \"cell_id\": 68, \"force\": 8}\n"
      "{\"t\": 3.0, \"link\": 4, \"cell_id\": 68, \"force\": 8}\n"
      "{\"t\": 3.2, \"link\": 4, \"cell_id\": 68, \"force\": 0}\n");
  const auto a = run_closed_loop(proxy(), forearm(), loop, trace);
  const auto b = run_closed_loop(proxy(), forearm(), loop, trace);
  CHECK(a.csv() == b.csv());
  CHECK(a.columns.front() == "t");
  CHECK(a.rows.size() == static_cast<std::size_t>(std::lround(loop.duration * loop.rate)) + 1);

  const auto t = a.series("t"), n = a.series("n_contacts"), pu = a.series("pdot_u");
  int touched = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < 1.4 || t[k] > 2.9) continue;
    CHECK(n[k] >= 1.0);
    CHECK(pu[k] >= -1e-6);  // never moves against the push
    ++touched;
  }
  CHECK(touched > 100);
}

TEST_CASE("joint selection picks the most distal joint with leverage") {
  const auto& chain = proxy();
  const VecX q = qp_config().control.q0;
  const Vec3 local(0.0, 0.05, 0.1);
  const Vec3 p = kinematics::forward_kinematics(chain, q, 4, local);
  const auto frames = kinematics::joint_frames(chain, q);
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 u = random_unit(rng);
    double sign = 0.0;
    const int j = select_joint(chain, q, 4, local, u, 0.02, sign);
    // oracle: scan joints below link 4 from the top down
    int want = -1;
    double want_sign = 0.0;
    for (int i = 3; i >= 0; --i) {
      const double lever = frames.axis[i].cross(p - frames.origin[i]).dot(u);
      if (std::abs(lever) >= 0.02) {
        want = i;
        want_sign = lever > 0 ? 1.0 : -1.0;
        break;
      }
    }
    CHECK(j == want);
    if (j >= 0) CHECK(sign == want_sign);
  }
}
