#include "skinrig/kinematics/chain.hpp"

#include <cmath>
#include <fstream>

#include "skinrig/errors.hpp"
#include "skinrig/geometry/mesh_io.hpp"

namespace skinrig::kinematics {

namespace {

constexpr const char* kChainKind = "skinrig.chain.v1";

void check_link(const RobotChain& chain, int link) {
  if (link < 0 || link > chain.dof()) {
    throw LinkIndexError("link " + std::to_string(link) + " out of range [0, " +
                         std::to_string(chain.dof()) + "]");
  }
}

void check_q(const RobotChain& chain, const VecX& q) {
  if (q.size() != chain.dof()) {
    throw std::invalid_argument("joint vector has " + std::to_string(q.size()) +
                                " entries, chain has " + std::to_string(chain.dof()));
  }
}

Vec3 vec3_from(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw ChainFormatError(std::string(what) + " must be a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Fixed-axis roll, pitch, yaw: R = Rz(yaw) Ry(pitch) Rx(roll).
Mat3 rpy_matrix(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

}  // namespace

void validate(const RobotChain& chain) {
  if (chain.joints.empty()) throw ChainFormatError("chain has no joints");
  for (const auto& j : chain.joints) {
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
      throw ChainFormatError("joint " + j.name + ": axis is not unit length");
    }
    const Mat3 r = j.origin.linear();
    if (!(r.transpose() * r).isApprox(Mat3::Identity(), 1e-9) || r.determinant() < 0.0) {
      throw ChainFormatError("joint " + j.name + ": origin rotation is not orthonormal");
    }
    if (!(j.lower <= j.upper)) throw ChainFormatError("joint " + j.name + ": lower > upper");
  }
  if (!chain.link_surfaces.empty() &&
      static_cast<int>(chain.link_surfaces.size()) != chain.link_count()) {
    throw ChainFormatError("link_surfaces must have one entry per link");
  }
  if (chain.ee_link < 0 || chain.ee_link > chain.dof()) {
    throw ChainFormatError("end-effector link out of range");
  }
}

bool within_limits(const RobotChain& chain, const VecX& q) {
  check_q(chain, q);
  for (int j = 0; j < chain.dof(); ++j) {
    if (q[j] < chain.joints[j].lower || q[j] > chain.joints[j].upper) return false;
  }
  return true;
}

std::vector<Pose> link_poses(const RobotChain& chain, const VecX& q) {
  check_q(chain, q);
  std::vector<Pose> poses;
  poses.reserve(chain.joints.size() + 1);
  poses.push_back(Pose::Identity());
  for (int j = 0; j < chain.dof(); ++j) {
    const auto& joint = chain.joints[j];
    Pose rot = Pose::Identity();
    rot.linear() = Eigen::AngleAxisd(q[j], joint.axis).toRotationMatrix();
    poses.push_back(poses.back() * joint.origin * rot);
  }
  return poses;
}

Pose link_pose(const RobotChain& chain, const VecX& q, int link) {
  check_link(chain, link);
  return link_poses(chain, q)[link];
}

Vec3 forward_kinematics(const RobotChain& chain, const VecX& q, int link,
                        const Vec3& local_point) {
  return link_pose(chain, q, link) * local_point;
}

JointFrames joint_frames(const RobotChain& chain, const VecX& q) {
  const auto poses = link_poses(chain, q);
  JointFrames f;
  for (int j = 0; j < chain.dof(); ++j) {
    const Pose frame = poses[j] * chain.joints[j].origin;
    f.axis.push_back(frame.linear() * chain.joints[j].axis);
    f.origin.push_back(frame.translation());
  }
  return f;
}

Jacobian point_jacobian(const RobotChain& chain, const VecX& q, int link,
                        const Vec3& local_point) {
  check_link(chain, link);
  const auto poses = link_poses(chain, q);
  const Vec3 p = poses[link] * local_point;
  Jacobian jac = Jacobian::Zero(3, chain.dof());
  for (int j = 0; j < link; ++j) {
    const Pose frame = poses[j] * chain.joints[j].origin;
    const Vec3 w = frame.linear() * chain.joints[j].axis;
    jac.col(j) = w.cross(p - frame.translation());
  }
  return jac;
}

Vec3 end_effector(const RobotChain& chain, const VecX& q) {
  return forward_kinematics(chain, q, chain.ee_link, chain.ee_point);
}

Jacobian end_effector_jacobian(const RobotChain& chain, const VecX& q) {
  return point_jacobian(chain, q, chain.ee_link, chain.ee_point);
}

RobotChain chain_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  try {
    if (doc.value("kind", std::string()) != kChainKind) {
      throw ChainFormatError(std::string("expected kind \"") + kChainKind + "\"");
    }
    RobotChain chain;
    for (const auto& jj : doc.at("joints")) {
      Joint j;
      j.name = jj.value("name", "j" + std::to_string(chain.joints.size() + 1));
      j.axis = vec3_from(jj.at("axis"), "axis");
      const auto& o = jj.at("origin");
      j.origin = Pose::Identity();
      j.origin.translation() = vec3_from(o.at("xyz"), "origin.xyz");
      if (o.contains("rpy")) j.origin.linear() = rpy_matrix(vec3_from(o.at("rpy"), "origin.rpy"));
      if (jj.contains("limits")) {
        j.lower = jj.at("limits").at(0).get<double>();
        j.upper = jj.at("limits").at(1).get<double>();
      }
      chain.joints.push_back(j);
    }
    chain.ee_link = chain.dof();
    if (doc.contains("end_effector")) {
      const auto& ee = doc.at("end_effector");
      chain.ee_link = ee.value("link", chain.dof());
      if (ee.contains("point")) chain.ee_point = vec3_from(ee.at("point"), "end_effector.point");
    }
    chain.link_surfaces.assign(static_cast<std::size_t>(chain.link_count()), std::nullopt);
    if (doc.contains("link_surfaces")) {
      for (const auto& ls : doc.at("link_surfaces")) {
        const int link = ls.at("link").get<int>();
        if (link < 0 || link > chain.dof()) throw ChainFormatError("surface link out of range");
        auto path = std::filesystem::path(ls.at("mesh").get<std::string>());
        if (path.is_relative()) path = base_dir / path;
        auto surface = geometry::load_mesh(path);
        if (ls.contains("axis")) surface.axis = vec3_from(ls.at("axis"), "surface axis").normalized();
        if (ls.contains("origin")) surface.origin = vec3_from(ls.at("origin"), "surface origin");
        geometry::validate(surface);
        chain.link_surfaces[static_cast<std::size_t>(link)] = std::move(surface);
      }
    }
    validate(chain);
    return chain;
  } catch (const nlohmann::json::exception& e) {
    throw ChainFormatError(std::string("malformed chain document: ") + e.what());
  }
}

RobotChain load_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ChainFormatError("cannot open chain file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ChainFormatError(path.string() + ": " + e.what());
  }
  return chain_from_json(doc, path.parent_path());
}

nlohmann::json chain_to_json(const RobotChain& chain) {
  nlohmann::json doc;
  doc["kind"] = kChainKind;
  auto arr = [](const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); };
  for (const auto& j : chain.joints) {
    const Vec3 rpy = Mat3(j.origin.linear()).eulerAngles(2, 1, 0).reverse();
    doc["joints"].push_back({{"name", j.name},
                             {"axis", arr(j.axis)},
                             {"origin", {{"xyz", arr(j.origin.translation())}, {"rpy", arr(rpy)}}},
                             {"limits", {j.lower, j.upper}}});
  }
  doc["end_effector"] = {{"link", chain.ee_link}, {"point", arr(chain.ee_point)}};
  return doc;
}

}  // namespace skinrig::kinematics
