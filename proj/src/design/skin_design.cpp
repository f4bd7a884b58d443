#include "skinrig/design/skin_design.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "skinrig/errors.hpp"

namespace skinrig::design {

namespace {

constexpr double kMmPerM = 1000.0;
// Guards ceil against products that land a few ulps above an integer.
constexpr double kRoundSlack = 1e-9;

}  // namespace

std::string to_string(Layer layer) {
  switch (layer) {
    case Layer::Top: return "top";
    case Layer::Mesh: return "mesh";
    case Layer::Bottom: return "bottom";
  }
  return "?";
}

Profiles default_profiles() {
  LayerProfile top{Layer::Top, 0.889, 0.981, 1.45, 1.77, 1.00, 1.45, false};
  LayerProfile mesh{Layer::Mesh, 0.543, 0.437, 1.00, 1.45, 1.00, 1.45, true};
  LayerProfile bottom = top;
  bottom.layer = Layer::Bottom;
  return {top, mesh, bottom};
}

void validate(const LayerProfile& p) {
  const std::string name = to_string(p.layer);
  if (!(p.ratio_x > 0.0) || !(p.ratio_y > 0.0)) {
    throw std::invalid_argument(name + ": stitch ratios must be positive");
  }
  if (!(1.0 <= p.stretch_min_x && p.stretch_min_x <= p.stretch_max_x)) {
    throw std::invalid_argument(name + ": need 1 <= stretch_min_x <= stretch_max_x");
  }
  if (!(1.0 <= p.stretch_min_y && p.stretch_min_y <= p.stretch_max_y)) {
    throw std::invalid_argument(name + ": need 1 <= stretch_min_y <= stretch_max_y");
  }
}

Feasibility check_feasibility(const geometry::SurfaceMeasurements& m, const Profiles& profiles) {
  Feasibility f;
  f.x.ratio = m.h_max / m.h_min;
  f.y.ratio = m.v_max / m.v_min;
  f.x.bound = std::numeric_limits<double>::infinity();
  f.y.bound = std::numeric_limits<double>::infinity();
  for (const auto& p : profiles) {
    validate(p);
    const double bx = p.stretch_max_x / p.stretch_min_x;
    const double by = p.stretch_max_y / p.stretch_min_y;
    if (bx < f.x.bound) {
      f.x.bound = bx;
      f.x.limiting = p.layer;
    }
    if (by < f.y.bound) {
      f.y.bound = by;
      f.y.limiting = p.layer;
    }
  }
  f.x.margin = f.x.bound - f.x.ratio;
  f.y.margin = f.y.bound - f.y.ratio;
  f.x.feasible = f.x.ratio <= f.x.bound;
  f.y.feasible = f.y.ratio <= f.y.bound;
  if (!f.x.feasible) {
    f.reasons.push_back("x: h_max/h_min = " + std::to_string(f.x.ratio) + " exceeds " +
                        to_string(f.x.limiting) + " layer stretch range " +
                        std::to_string(f.x.bound));
  }
  if (!f.y.feasible) {
    f.reasons.push_back("y: v_max/v_min = " + std::to_string(f.y.ratio) + " exceeds " +
                        to_string(f.y.limiting) + " layer stretch range " +
                        std::to_string(f.y.bound));
  }
  return f;
}

int stitch_count(double min_mm, double ratio, double stretch_min) {
  const double x = min_mm * ratio / stretch_min;
  return std::max(1, static_cast<int>(std::ceil(x * (1.0 - kRoundSlack))));
}

Band size_band(int n, double ratio, double stretch_min, double stretch_max) {
  return {n * stretch_min / ratio, n * stretch_max / ratio};
}

SkinSpec solve_dimensions(const geometry::SurfaceMeasurements& m, const Profiles& profiles,
                          int grid_cols, int grid_rows) {
  const Feasibility f = check_feasibility(m, profiles);
  if (!f.x.feasible) {
    throw InfeasibleDesignError(f.reasons.front(), to_string(f.x.limiting), DesignAxis::X);
  }
  if (!f.y.feasible) {
    throw InfeasibleDesignError(f.reasons.back(), to_string(f.y.limiting), DesignAxis::Y);
  }
  SkinSpec spec;
  spec.grid_cols = grid_cols;
  spec.grid_rows = grid_rows;
  const double h_min = m.h_min * kMmPerM, h_max = m.h_max * kMmPerM;
  const double v_min = m.v_min * kMmPerM, v_max = m.v_max * kMmPerM;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    LayerDimensions d{p.layer, stitch_count(h_min, p.ratio_x, p.stretch_min_x),
                      stitch_count(v_min, p.ratio_y, p.stretch_min_y)};
    // Post-hoc band check. The fully stretched skin must reach the largest
    // measurement; rounding up can only help here, so a failure means the
    // ratio check and the rounding disagree.
    const Band bx = size_band(d.n_x, p.ratio_x, p.stretch_min_x, p.stretch_max_x);
    const Band by = size_band(d.n_y, p.ratio_y, p.stretch_min_y, p.stretch_max_y);
    if (bx.hi < h_max * (1.0 - kRoundSlack)) {
      throw InfeasibleDesignError(to_string(p.layer) + " x: n = " + std::to_string(d.n_x) +
                                      " cannot stretch to h_max",
                                  to_string(p.layer), DesignAxis::X);
    }
    if (by.hi < v_max * (1.0 - kRoundSlack)) {
      throw InfeasibleDesignError(to_string(p.layer) + " y: n = " + std::to_string(d.n_y) +
                                      " cannot stretch to v_max",
                                  to_string(p.layer), DesignAxis::Y);
    }
    spec.layers[i] = d;
  }
  return spec;
}

nlohmann::json design_report(const geometry::SurfaceMeasurements& m, const Profiles& profiles,
                             const Feasibility& verdict, const SkinSpec* spec) {
  using nlohmann::json;
  json out;
  out["kind"] = "skinrig.skin_spec";
  out["version"] = "1.0";
  out["measurements_mm"] = {{"h_min", m.h_min * kMmPerM},
                            {"h_max", m.h_max * kMmPerM},
                            {"v_min", m.v_min * kMmPerM},
                            {"v_max", m.v_max * kMmPerM}};
  auto axis_json = [](const AxisVerdict& a) {
    return json{{"feasible", a.feasible},
                {"ratio", a.ratio},
                {"bound", a.bound},
                {"margin", a.margin},
                {"limiting_layer", to_string(a.limiting)}};
  };
  out["feasibility"] = {{"feasible", verdict.feasible()},
                        {"x", axis_json(verdict.x)},
                        {"y", axis_json(verdict.y)},
                        {"reasons", verdict.reasons}};
  if (spec == nullptr) return out;

  out["grid"] = {{"cols", spec->grid_cols}, {"rows", spec->grid_rows}};
  json layers = json::array();
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    const auto& d = spec->layers[i];
    const Band bx = size_band(d.n_x, p.ratio_x, p.stretch_min_x, p.stretch_max_x);
    const Band by = size_band(d.n_y, p.ratio_y, p.stretch_min_y, p.stretch_max_y);
    layers.push_back({
        {"layer", to_string(p.layer)},
        {"n_x", d.n_x},
        {"n_y", d.n_y},
        {"profile",
         {{"ratio_x", p.ratio_x},
          {"ratio_y", p.ratio_y},
          {"stretch_x", {p.stretch_min_x, p.stretch_max_x}},
          {"stretch_y", {p.stretch_min_y, p.stretch_max_y}},
          {"assumed", p.assumed}}},
        {"relaxed_mm", {d.n_x / p.ratio_x, d.n_y / p.ratio_y}},
        {"band_x_mm", {bx.lo, bx.hi}},
        {"band_y_mm", {by.lo, by.hi}},
        // how far the minimally stretched size overshoots the smallest
        // measurement (below one stitch) and the headroom above the largest
        {"lower_slack_mm", {bx.lo - m.h_min * kMmPerM, by.lo - m.v_min * kMmPerM}},
        {"upper_slack_mm", {bx.hi - m.h_max * kMmPerM, by.hi - m.v_max * kMmPerM}},
    });
  }
  out["layers"] = layers;
  return out;
}

}  // namespace skinrig::design
