#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Geometry>
#include <json.hpp>

#include "skinrig/geometry/mesh.hpp"

namespace skinrig::kinematics {

using Pose = Eigen::Isometry3d;
using VecX = Eigen::VectorXd;
using Jacobian = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Revolute joint. `origin` places the joint frame in the parent link frame;
/// the joint rotates about `axis` expressed in its own frame.
struct Joint {
  std::string name;
  Vec3 axis{0.0, 0.0, 1.0};
  Pose origin = Pose::Identity();
  double lower = -3.14159265358979;
  double upper = 3.14159265358979;
};

/// Serial chain of revolute joints. Link 0 is the base; link j is the body
/// carried by joint j, so a chain with n joints has links 0..n.
struct RobotChain {
  std::vector<Joint> joints;
  /// Indexed by link; absent entries are bare links.
  std::vector<std::optional<geometry::LinkSurface>> link_surfaces;
  int ee_link = 0;
  Vec3 ee_point = Vec3::Zero();

  int dof() const { return static_cast<int>(joints.size()); }
  int link_count() const { return dof() + 1; }
};

struct JointState {
  VecX q;
  VecX q_dot;
  double t = 0.0;
};

/// Throws ChainFormatError for an empty chain, non-unit axes, non-rigid
/// origins or inverted limits.
void validate(const RobotChain& chain);

bool within_limits(const RobotChain& chain, const VecX& q);

/// World poses of links 0..n.
std::vector<Pose> link_poses(const RobotChain& chain, const VecX& q);

Pose link_pose(const RobotChain& chain, const VecX& q, int link);

/// World position of a point fixed in `link`. Throws LinkIndexError.
Vec3 forward_kinematics(const RobotChain& chain, const VecX& q, int link,
                        const Vec3& local_point);

/// 3 x n point Jacobian: column j is w_j x (p - o_j) for joints carried
/// below `link`, zero for distal joints.
Jacobian point_jacobian(const RobotChain& chain, const VecX& q, int link,
                        const Vec3& local_point);

Vec3 end_effector(const RobotChain& chain, const VecX& q);
Jacobian end_effector_jacobian(const RobotChain& chain, const VecX& q);

/// World axis and origin of every joint.
struct JointFrames {
  std::vector<Vec3> axis;
  std::vector<Vec3> origin;
};
JointFrames joint_frames(const RobotChain& chain, const VecX& q);

/// Chain description, kind "skinrig.chain.v1". Mesh paths in the document
/// are resolved against `base_dir`.
RobotChain chain_from_json(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir = {});
RobotChain load_chain(const std::filesystem::path& path);
/// Surfaces are not serialized (they live in their own mesh files).
nlohmann::json chain_to_json(const RobotChain& chain);

}  // namespace skinrig::kinematics
