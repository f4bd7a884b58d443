#pragma once

// Shared fixtures for the unit tests.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "skinrig/kinematics/chain.hpp"

namespace skinrig::test {

inline std::filesystem::path asset(const std::string& rel) {
  return std::filesystem::path(SKINRIG_ASSET_DIR) / rel;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Planar chain in the xy plane: n joints about z, unit links along x.
inline kinematics::RobotChain planar_chain(int n, double link = 1.0) {
  kinematics::RobotChain c;
  for (int i = 0; i < n; ++i) {
    kinematics::Joint j;
    j.name = "p" + std::to_string(i + 1);
    j.axis = Vec3::UnitZ();
    j.origin = kinematics::Pose::Identity();
    if (i > 0) j.origin.translation() = Vec3(link, 0, 0);
    c.joints.push_back(j);
  }
  c.link_surfaces.resize(static_cast<std::size_t>(n + 1));
  c.ee_link = n;
  c.ee_point = Vec3(link, 0, 0);
  return c;
}

}  // namespace skinrig::test
