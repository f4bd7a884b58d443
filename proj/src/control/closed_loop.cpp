#include "skinrig/control/closed_loop.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "skinrig/errors.hpp"
#include "skinrig/format.hpp"
#include "skinrig/rng.hpp"

namespace skinrig::control {

namespace {

struct TrueTouch {
  std::size_t skin = 0;
  const ScriptedContact* script = nullptr;
  Vec3 point;   // on the surface, link frame
  Vec3 normal;  // outward, link frame
  std::vector<std::pair<int, double>> overlaps;
};

std::vector<TrueTouch> resolve_touches(const std::vector<SkinUnit>& skins, const ContactTrace& trace) {
  std::vector<TrueTouch> out;
  for (const auto& c : trace.contacts) {
    std::size_t s = 0;
    while (s < skins.size() && skins[s].link != c.link) ++s;
    if (s == skins.size()) {
      throw TraceFormatError("trace touches link " + std::to_string(c.link) + " which has no skin");
    }
    const auto& truth = *skins[s].truth;
    Vec3 target;
    if (c.cell_id) {
      if (*c.cell_id < 0 || *c.cell_id >= truth.cell_count()) {
        throw TraceFormatError("trace cell " + std::to_string(*c.cell_id) + " out of range");
      }
      target = truth.true_centroids()[*c.cell_id];
    } else {
      target = *c.local_point;
    }
    // snap onto the surface along the chart ray
    const auto [u, v] = truth.chart().param_of(target);
    const auto hit = truth.chart().surface_at(u, v);
    if (!hit) throw TraceFormatError("trace contact is not over the skin");
    out.push_back({s, &c, hit->point, hit->normal, truth.overlap(hit->point, hit->normal)});
  }
  return out;
}

struct ContactKey {
  std::size_t skin;
  int cell;
  bool operator<(const ContactKey& o) const {
    return skin != o.skin ? skin < o.skin : cell < o.cell;
  }
};

struct AdmittanceTrack {
  AdmittanceState state;
  int joint = -1;
  double sign = 1.0;
  Vec3 u = Vec3::Zero();  // task-mode direction, fixed at first detection
};

}  // namespace

int select_joint(const kinematics::RobotChain& chain, const kinematics::VecX& q, int link,
                 const Vec3& local_point, const Vec3& u_world, double lever_min, double& sign) {
  const auto jac = kinematics::point_jacobian(chain, q, link, local_point);
  for (int j = link - 1; j >= 0; --j) {
    const double lever = jac.col(j).dot(u_world);
    if (std::abs(lever) >= lever_min) {
      sign = lever > 0.0 ? 1.0 : -1.0;
      return j;
    }
  }
  sign = 0.0;
  return -1;
}

int Telemetry::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return -1;
  return static_cast<int>(it - columns.begin());
}

std::vector<double> Telemetry::series(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw std::out_of_range("no telemetry column " + name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string Telemetry::csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += fmt_double(r[i]);
    }
    out += '\n';
  }
  return out;
}

Telemetry run_closed_loop(const kinematics::RobotChain& chain, const std::vector<SkinUnit>& skins,
                          const LoopConfig& config, const ContactTrace& trace) {
  const int n = chain.dof();
  if (config.q0.size() != n) throw std::invalid_argument("q0 does not match the chain");
  if (!(config.rate > 0.0) || !(config.skin_rate > 0.0) || !(config.duration >= 0.0)) {
    throw std::invalid_argument("rates must be positive and duration non-negative");
  }
  validate(config.admittance);
  kinematics::VecX amplitude = config.joint_amplitude.size() == n ? config.joint_amplitude
                                                                  : kinematics::VecX::Zero(n);
  AdmittanceParams adm = config.admittance;
  adm.ts = 1.0 / config.rate;

  const auto touches = resolve_touches(skins, trace);

  Telemetry tel;
  tel.columns.push_back("t");
  for (int j = 0; j < n; ++j) tel.columns.push_back("q_" + std::to_string(j + 1));
  for (int j = 0; j < n; ++j) tel.columns.push_back("qdot_" + std::to_string(j + 1));
  for (const char* c : {"ee_x", "ee_y", "ee_z", "e_x", "e_y", "e_z", "n_contacts", "pdot_u",
                        "pdot_true", "qp_status", "qp_active"}) {
    tel.columns.push_back(c);
  }
  for (int j = 0; j < n; ++j) tel.columns.push_back("dq_" + std::to_string(j + 1));
  for (const char* c : {"dxt_x", "dxt_y", "dxt_z"}) tel.columns.push_back(c);
  for (const auto& s : skins) {
    for (int c : s.watch_cells) tel.columns.push_back("C_" + s.name + "_" + std::to_string(c));
  }

  Rng noise(Rng::mix(config.seed, 7));
  const double ts = 1.0 / config.rate;
  const auto steps = static_cast<long>(std::llround(config.duration * config.rate));
  const Vec3 x_start = kinematics::end_effector(chain, config.q0);
  const Vec3 x_dot_ref = config.duration > 0.0 ? Vec3(config.task_delta / config.duration) : Vec3::Zero();

  kinematics::VecX q = config.q0;
  std::vector<std::vector<double>> frames(skins.size());
  for (std::size_t s = 0; s < skins.size(); ++s) {
    frames[s].assign(static_cast<std::size_t>(skins[s].truth->cell_count()), 0.0);
  }
  long held_frame = -1;
  std::map<ContactKey, AdmittanceTrack> tracks;

  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * ts;

    // skin frames refresh at their own clock and are held in between
    const auto frame_idx = static_cast<long>(std::floor(t * config.skin_rate + 1e-9));
    if (frame_idx != held_frame) {
      held_frame = frame_idx;
      const double tf = static_cast<double>(frame_idx) / config.skin_rate;
      for (std::size_t s = 0; s < skins.size(); ++s) {
        auto& fr = frames[s];
        std::fill(fr.begin(), fr.end(), 0.0);
        for (const auto& touch : touches) {
          if (touch.skin != s) continue;
          const double f = touch.script->force_at(tf);
          if (f <= 0.0) continue;
          const auto r = skins[s].truth->response(touch.overlaps, f, &noise);
          for (std::size_t c = 0; c < fr.size(); ++c) fr[c] += r[c];
        }
        const double sat = skins[s].truth->params().saturation;
        for (auto& v : fr) v = std::min(v, sat);
      }
    }

    std::vector<std::pair<std::size_t, ContactEvent>> events;
    for (std::size_t s = 0; s < skins.size(); ++s) {
      auto fc = contacts_from_frame(frames[s], skins[s].calibration, chain, q, skins[s].link, t);
      for (auto& e : fc.events) events.emplace_back(s, e);
    }

    const Vec3 x = kinematics::end_effector(chain, q);
    const double progress = config.duration > 0.0 ? std::min(1.0, t / config.duration) : 0.0;
    const Vec3 x_ref = x_start + progress * config.task_delta;
    kinematics::VecX q_ref = config.q0;
    for (int j = 0; j < n; ++j) {
      q_ref[j] += amplitude[j] * std::sin(2.0 * std::numbers::pi * t / config.joint_period);
    }

    kinematics::VecX q_dot = kinematics::VecX::Zero(n);
    kinematics::VecX dq = kinematics::VecX::Zero(n);
    Vec3 dxt = Vec3::Zero();
    Vec3 err = Vec3::Zero();
    double qp_status = 0.0;
    double qp_active = 0.0;

    if (config.mode == ControlMode::Qp) {
      QPSpec spec;
      spec.x_dot_ref = x_dot_ref + config.kp * (x_ref - x);
      spec.j_e = kinematics::end_effector_jacobian(chain, q);
      spec.regularization = config.regularization;
      for (const auto& [s, e] : events) {
        spec.contacts.push_back(
            {e.u, kinematics::point_jacobian(chain, q, e.link, e.local_point), config.policy(e.force)});
      }
      try {
        const auto res = qp_solve(spec);
        q_dot = res.q_dot;
        qp_active = static_cast<double>(res.active.size());
      } catch (const InfeasibleQPError&) {
        q_dot.setZero();  // safe stop
        qp_status = 1.0;
      }
      err = x_ref - x;
    } else {
      // step every tracked contact; contacts that vanished see zero force
      std::map<ContactKey, double> force_now;
      for (const auto& [s, e] : events) {
        const ContactKey key{s, e.cell_id};
        force_now[key] = e.force;
        if (!tracks.count(key)) {
          AdmittanceTrack tr;
          tr.u = e.u;
          if (config.mode == ControlMode::JointAdmittance) {
            tr.joint = select_joint(chain, q, e.link, e.local_point, e.u, config.lever_min, tr.sign);
          }
          tracks.emplace(key, tr);
        }
      }
      std::vector<FramedVector> task_steps;
      for (auto& [key, tr] : tracks) {
        const auto it = force_now.find(key);
        const double f = it == force_now.end() ? 0.0 : it->second;
        const double d = admittance_step(adm, tr.state, f);
        if (config.mode == ControlMode::JointAdmittance) {
          if (tr.joint >= 0) dq[tr.joint] += tr.sign * d;
        } else {
          task_steps.push_back({d * tr.u, "world"});
        }
      }
      if (config.mode == ControlMode::JointAdmittance) {
        const kinematics::VecX q_des = q_ref + dq;
        q_dot = (q_des - q) / ts;
        err = kinematics::end_effector(chain, q_ref) - x;
      } else {
        const auto x_des = compose_multi_contact({x_ref, "world"}, task_steps);
        dxt = x_des.value - x_ref;
        QPSpec spec;
        spec.x_dot_ref = x_dot_ref + config.kp * (x_des.value - x);
        spec.j_e = kinematics::end_effector_jacobian(chain, q);
        spec.regularization = config.regularization;
        q_dot = qp_modify(spec);
        err = x_ref - x;
      }
    }

    // strongest localized contact and the true touch velocity
    double pdot_u = 0.0;
    const ContactEvent* strongest = nullptr;
    for (const auto& [s, e] : events) {
      if (!strongest || e.reading > strongest->reading) strongest = &e;
    }
    if (strongest) {
      pdot_u = strongest->u.dot(
          kinematics::point_jacobian(chain, q, strongest->link, strongest->local_point) * q_dot);
    }
    double pdot_true = 0.0;
    double best_force = 0.0;
    for (const auto& touch : touches) {
      const double f = touch.script->force_at(t);
      if (f <= best_force) continue;
      best_force = f;
      const int link = skins[touch.skin].link;
      const Vec3 u = -(kinematics::link_pose(chain, q, link).linear() * touch.normal);
      pdot_true = u.dot(kinematics::point_jacobian(chain, q, link, touch.point) * q_dot);
    }

    std::vector<double> row;
    row.reserve(tel.columns.size());
    row.push_back(t);
    for (int j = 0; j < n; ++j) row.push_back(q[j]);
    for (int j = 0; j < n; ++j) row.push_back(q_dot[j]);
    for (int i = 0; i < 3; ++i) row.push_back(x[i]);
    for (int i = 0; i < 3; ++i) row.push_back(err[i]);
    row.push_back(static_cast<double>(events.size()));
    row.push_back(pdot_u);
    row.push_back(pdot_true);
    row.push_back(qp_status);
    row.push_back(qp_active);
    for (int j = 0; j < n; ++j) row.push_back(dq[j]);
    for (int i = 0; i < 3; ++i) row.push_back(dxt[i]);
    for (std::size_t s = 0; s < skins.size(); ++s) {
      for (int c : skins[s].watch_cells) row.push_back(frames[s][static_cast<std::size_t>(c)]);
    }
    tel.rows.push_back(std::move(row));

    q += q_dot * ts;
  }
  return tel;
}

}  // namespace skinrig::control
