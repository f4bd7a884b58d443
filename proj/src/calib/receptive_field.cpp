#include "skinrig/calib/receptive_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "skinrig/errors.hpp"

namespace skinrig::calib {

namespace {

// Largest 4-connected component of a wrapped mask, as a mask.
std::vector<bool> largest_component(const std::vector<bool>& mask, int cols, int rows) {
  std::vector<int> label(mask.size(), -1);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || label[start] >= 0) continue;
    const int id = static_cast<int>(sizes.size());
    sizes.push_back(0);
    stack.push_back(start);
    label[start] = id;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++sizes[id];
      const int x = static_cast<int>(p % cols);
      const int y = static_cast<int>(p / cols);
      const std::array<std::pair<int, int>, 4> nb{{{(x + 1) % cols, y},
                                                   {(x + cols - 1) % cols, y},
                                                   {x, y + 1},
                                                   {x, y - 1}}};
      for (auto [nx, ny] : nb) {
        if (ny < 0 || ny >= rows) continue;
        const auto q = static_cast<std::size_t>(ny) * cols + nx;
        if (mask[q] && label[q] < 0) {
          label[q] = id;
          stack.push_back(q);
        }
      }
    }
  }
  std::vector<bool> out(mask.size(), false);
  if (sizes.empty()) return out;
  // first label wins ties, i.e. the component seen first in scan order
  const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (std::size_t p = 0; p < mask.size(); ++p) out[p] = label[p] == best;
  return out;
}

}  // namespace

std::vector<std::pair<int, int>> trace_outline(const std::vector<bool>& mask, int cols, int rows) {
  const auto comp = largest_component(mask, cols, rows);
  // Rotate the columns so the region does not cross the seam.
  int free_col = -1;
  for (int x = 0; x < cols && free_col < 0; ++x) {
    bool used = false;
    for (int y = 0; y < rows && !used; ++y) used = comp[static_cast<std::size_t>(y) * cols + x];
    if (!used) free_col = x;
  }
  if (free_col < 0) return {};
  const int shift = free_col + 1;
  auto in = [&](int x, int y) {
    if (x < 0 || x >= cols || y < 0 || y >= rows) return false;
    return static_cast<bool>(comp[static_cast<std::size_t>(y) * cols + (x + shift) % cols]);
  };

  // Directed pixel edges with the region on the left.
  using Pt = std::pair<int, int>;
  std::map<Pt, std::vector<Pt>> out_edges;
  Pt start{-1, -1};
  bool have_start = false;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      if (!in(x, y)) continue;
      if (!in(x, y - 1)) {
        out_edges[{x, y}].push_back({x + 1, y});
        if (!have_start) {
          start = {x, y};
          have_start = true;
        }
      }
      if (!in(x + 1, y)) out_edges[{x + 1, y}].push_back({x + 1, y + 1});
      if (!in(x, y + 1)) out_edges[{x + 1, y + 1}].push_back({x, y + 1});
      if (!in(x - 1, y)) out_edges[{x, y + 1}].push_back({x, y});
    }
  }
  if (!have_start) return {};

  // The bottom edge of the first pixel in scan order lies on the outer
  // boundary. Walk it, turning left first at pinch corners so diagonal
  // pixels stay apart.
  std::vector<Pt> loop{start};
  Pt prev = start;
  Pt cur = {start.first + 1, start.second};
  const std::size_t limit = 4 * mask.size() + 4;
  while (cur != start && loop.size() <= limit) {
    loop.push_back(cur);
    const int dx = cur.first - prev.first;
    const int dy = cur.second - prev.second;
    const std::array<Pt, 3> prefs{{{-dy, dx}, {dx, dy}, {dy, -dx}}};  // left, straight, right
    const auto& options = out_edges[cur];
    Pt next = cur;
    for (const auto& d : prefs) {
      const Pt cand{cur.first + d.first, cur.second + d.second};
      if (std::find(options.begin(), options.end(), cand) != options.end()) {
        next = cand;
        break;
      }
    }
    if (next == cur) break;  // cannot happen for a closed edge set
    prev = cur;
    cur = next;
  }

  // drop collinear vertices
  std::vector<Pt> simple;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& a = loop[(i + n - 1) % n];
    const Pt& b = loop[i];
    const Pt& c = loop[(i + 1) % n];
    const long cross = static_cast<long>(b.first - a.first) * (c.second - b.second) -
                       static_cast<long>(b.second - a.second) * (c.first - b.first);
    if (cross != 0) simple.push_back({b.first + shift, b.second});
  }
  return simple;
}

bool inside_outline(const std::vector<std::pair<double, double>>& outline, double u, double v) {
  if (outline.size() < 3) return false;
  double mean_u = 0.0;
  for (const auto& p : outline) mean_u += p.first;
  mean_u /= static_cast<double>(outline.size());
  u += std::round(mean_u - u);
  bool inside = false;
  for (std::size_t i = 0, j = outline.size() - 1; i < outline.size(); j = i++) {
    const auto [ui, vi] = outline[i];
    const auto [uj, vj] = outline[j];
    if ((vi > v) != (vj > v) && u < (uj - ui) * (v - vi) / (vj - vi) + ui) inside = !inside;
  }
  return inside;
}

ReceptiveFields compute_receptive_fields(const KnnIndex& index,
                                         const geometry::CylindricalChart& chart, int cols,
                                         int rows, const FieldOptions& options) {
  const int cells = index.cell_count();
  std::vector<int> uncovered;
  for (int c = 0; c < cells; ++c) {
    if (index.positive_count(c) == 0) uncovered.push_back(c);
  }
  if (!uncovered.empty()) {
    std::string list;
    for (std::size_t i = 0; i < uncovered.size() && i < 20; ++i) {
      list += (i ? "," : "") + std::to_string(uncovered[i]);
    }
    throw CoverageError(std::to_string(uncovered.size()) +
                            " cell(s) have no positive training frames: " + list +
                            (uncovered.size() > 20 ? ",..." : ""),
                        uncovered);
  }

  ReceptiveFields rf;
  rf.grid_cols = cols * options.oversample;
  rf.grid_rows = rows * options.oversample;
  const auto grid = geometry::make_surface_grid(chart, rf.grid_cols, rf.grid_rows);
  rf.owner.assign(grid.points.size(), -1);
  const std::size_t k = std::min(options.k, index.size());
  for (std::size_t p = 0; p < grid.points.size(); ++p) {
    if (!grid.valid[p]) continue;
    const auto votes = index.cell_votes(index.neighbors(grid.points[p], k));
    int best = -1;
    double best_w = 0.0;
    for (const auto& [cell, w] : votes) {  // sorted by cell: strict > keeps lowest id
      if (w > best_w) {
        best_w = w;
        best = cell;
      }
    }
    rf.owner[p] = best;
  }

  rf.cells.resize(static_cast<std::size_t>(cells));
  std::vector<Vec3> sum(cells, Vec3::Zero()), nsum(cells, Vec3::Zero());
  for (std::size_t p = 0; p < grid.points.size(); ++p) {
    const int c = rf.owner[p];
    if (c < 0) continue;
    sum[c] += grid.area[p] * grid.points[p];
    nsum[c] += grid.area[p] * grid.normals[p];
    rf.cells[c].area += grid.area[p];
  }
  for (int c = 0; c < cells; ++c) {
    auto& f = rf.cells[c];
    f.cell_id = c;
    if (!(f.area > 0.0)) continue;
    f.calibrated = true;
    f.centroid = sum[c] / f.area;
    f.normal = nsum[c].normalized();

    std::vector<bool> mask(rf.owner.size());
    for (std::size_t p = 0; p < mask.size(); ++p) mask[p] = rf.owner[p] == c;
    for (const auto& [x, y] : trace_outline(mask, rf.grid_cols, rf.grid_rows)) {
      const double u = static_cast<double>(x) / rf.grid_cols;
      const double v = static_cast<double>(y) / rf.grid_rows;
      f.boundary_uv.emplace_back(u, v);
      auto hit = chart.surface_at(u, std::clamp(v, 1e-9, 1.0 - 1e-9));
      f.boundary.push_back(hit ? hit->point : Vec3::Zero());
    }
  }

  // support: positive training frames recorded inside each field
  for (std::size_t s = 0; s < index.site_count(); ++s) {
    const auto [u, v] = chart.param_of(index.site_position(s));
    const int i = std::clamp(static_cast<int>(u * rf.grid_cols), 0, rf.grid_cols - 1);
    const int j = std::clamp(static_cast<int>(v * rf.grid_rows), 0, rf.grid_rows - 1);
    const int owner = rf.owner[grid.index(i, j)];
    if (owner < 0) continue;
    for (const auto& [cell, n] : index.site_positives(s)) {
      if (cell == owner) rf.cells[cell].support_count += n;
    }
  }
  return rf;
}

}  // namespace skinrig::calib
