#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "skinrig/geometry/mesh.hpp"

namespace skinrig::control {

/// One scripted touch: where, and a piecewise-linear force profile
/// (time s, force N). Force is zero outside the first and last knot.
struct ScriptedContact {
  int link = 0;
  std::optional<int> cell_id;
  std::optional<Vec3> local_point;
  std::vector<std::pair<double, double>> knots;

  double force_at(double t) const;
};

struct ContactTrace {
  std::vector<ScriptedContact> contacts;
};

/// JSON lines, one knot per line: {"t", "link", "cell_id" | "local_point",
/// "force"}. Records with the same link and location form one contact.
/// Lines that only carry a "kind" key are headers and skipped. Throws
/// TraceFormatError.
ContactTrace parse_trace(std::istream& in);
ContactTrace load_trace(const std::filesystem::path& path);

}  // namespace skinrig::control
