#include "skinrig/geometry/mesh_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "skinrig/errors.hpp"
#include "skinrig/format.hpp"
#include "skinrig/geometry/poisson.hpp"

namespace skinrig::geometry {

namespace {

double parse_double(std::string_view tok, std::string_view what) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw MeshFormatError("bad number in " + std::string(what) + ": '" +
                          std::string(tok) + "'");
  }
  return v;
}

}  // namespace

LinkSurface read_obj(std::istream& in) {
  LinkSurface s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      std::array<std::string, 3> tok;
      if (!(ls >> tok[0] >> tok[1] >> tok[2])) {
        throw MeshFormatError("OBJ line " + std::to_string(line_no) + ": short vertex");
      }
      s.vertices.emplace_back(parse_double(tok[0], "OBJ vertex"),
                              parse_double(tok[1], "OBJ vertex"),
                              parse_double(tok[2], "OBJ vertex"));
    } else if (tag == "f") {
      std::vector<std::uint32_t> poly;
      std::string entry;
      while (ls >> entry) {
        const auto slash = entry.find('/');
        const std::string head = entry.substr(0, slash);
        long idx = 0;
        auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
        if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0) {
          throw MeshFormatError("OBJ line " + std::to_string(line_no) + ": bad face index");
        }
        const long resolved =
            idx > 0 ? idx - 1 : static_cast<long>(s.vertices.size()) + idx;
        if (resolved < 0 || resolved >= static_cast<long>(s.vertices.size())) {
          throw MeshFormatError("OBJ line " + std::to_string(line_no) +
                                ": face index out of range");
        }
        poly.push_back(static_cast<std::uint32_t>(resolved));
      }
      if (poly.size() < 3) {
        throw MeshFormatError("OBJ line " + std::to_string(line_no) + ": face with < 3 vertices");
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        s.triangles.push_back({poly[0], poly[k], poly[k + 1]});
      }
    }
  }
  if (s.triangles.empty()) throw MeshFormatError("OBJ contains no faces");
  return s;
}

LinkSurface read_stl(std::istream& in) {
  LinkSurface s;
  std::map<std::array<double, 3>, std::uint32_t> welded;
  std::string tok;
  std::vector<std::uint32_t> facet;
  bool saw_solid = false;
  while (in >> tok) {
    if (tok == "solid") {
      saw_solid = true;
      std::string rest;
      std::getline(in, rest);
    } else if (tok == "vertex") {
      std::array<std::string, 3> c;
      if (!(in >> c[0] >> c[1] >> c[2])) throw MeshFormatError("STL: short vertex");
      const std::array<double, 3> key{parse_double(c[0], "STL vertex"),
                                      parse_double(c[1], "STL vertex"),
                                      parse_double(c[2], "STL vertex")};
      auto [it, inserted] =
          welded.try_emplace(key, static_cast<std::uint32_t>(s.vertices.size()));
      if (inserted) s.vertices.emplace_back(key[0], key[1], key[2]);
      facet.push_back(it->second);
    } else if (tok == "endfacet") {
      if (facet.size() != 3) throw MeshFormatError("STL: facet without 3 vertices");
      s.triangles.push_back({facet[0], facet[1], facet[2]});
      facet.clear();
    }
  }
  if (!saw_solid) throw MeshFormatError("STL: missing 'solid' header (binary STL is not supported)");
  if (s.triangles.empty()) throw MeshFormatError("STL contains no facets");
  return s;
}

LinkSurface load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshFormatError("cannot open mesh file " + path.string());
  const auto ext = path.extension().string();
  if (ext == ".obj" || ext == ".OBJ") return read_obj(in);
  if (ext == ".stl" || ext == ".STL") return read_stl(in);
  throw MeshFormatError("unsupported mesh extension '" + ext + "'");
}

void write_obj(std::ostream& out, const LinkSurface& surface) {
  for (const auto& v : surface.vertices) {
    out << "v " << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << ' '
        << fmt_double(v.z()) << '\n';
  }
  for (const auto& t : surface.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

void write_stl(std::ostream& out, const LinkSurface& surface, std::string_view name) {
  out << "solid " << name << '\n';
  for (std::size_t i = 0; i < surface.triangles.size(); ++i) {
    const Vec3 n = face_normal(surface, i);
    out << "  facet normal " << fmt_double(n.x()) << ' ' << fmt_double(n.y()) << ' '
        << fmt_double(n.z()) << "\n    outer loop\n";
    for (auto idx : surface.triangles[i]) {
      const Vec3& v = surface.vertices[idx];
      out << "      vertex " << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << ' '
          << fmt_double(v.z()) << '\n';
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid " << name << '\n';
}

void write_samples_csv(std::ostream& out, const std::vector<SurfaceSample>& samples) {
  out << "x,y,z,nx,ny,nz\n";
  for (const auto& s : samples) {
    out << fmt_double(s.position.x()) << ',' << fmt_double(s.position.y()) << ','
        << fmt_double(s.position.z()) << ',' << fmt_double(s.normal.x()) << ','
        << fmt_double(s.normal.y()) << ',' << fmt_double(s.normal.z()) << '\n';
  }
}

}  // namespace skinrig::geometry
