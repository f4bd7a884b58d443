#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "skinrig/geometry/mesh.hpp"

namespace skinrig::geometry {

struct SurfaceSample;

/// Reads `v` and `f` lines; other records are ignored. Face entries may use
/// the `v/vt/vn` form and negative (relative) indices. Polygons are fanned.
LinkSurface read_obj(std::istream& in);
/// ASCII STL. Coincident vertices are welded by exact coordinate match.
LinkSurface read_stl(std::istream& in);
/// Dispatches on the file extension (.obj / .stl).
LinkSurface load_mesh(const std::filesystem::path& path);

void write_obj(std::ostream& out, const LinkSurface& surface);
void write_stl(std::ostream& out, const LinkSurface& surface,
               std::string_view name = "link");

/// CSV with header `x,y,z,nx,ny,nz`.
void write_samples_csv(std::ostream& out, const std::vector<SurfaceSample>& samples);

}  // namespace skinrig::geometry
