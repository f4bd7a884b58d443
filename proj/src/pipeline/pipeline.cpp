#include "skinrig/pipeline/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "skinrig/errors.hpp"
#include "skinrig/geometry/chart.hpp"
#include "skinrig/geometry/mesh_io.hpp"
#include "skinrig/geometry/poisson.hpp"
#include "skinrig/planner/tour.hpp"
#include "skinrig/rng.hpp"

namespace skinrig::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kConfigKind = "skinrig.config";
constexpr int kConfigMajor = 1;

double deg(double d) { return d * std::numbers::pi / 180.0; }

fs::path existing(const fs::path& base, const std::string& rel, const char* what) {
  fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : base / rel;
  if (!fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
  return p;
}

Vec3 vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " must be a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

kinematics::VecX vecx(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  kinematics::VecX v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

control::ControlMode parse_mode(const std::string& s) {
  if (s == "qp") return control::ControlMode::Qp;
  if (s == "joint_admittance") return control::ControlMode::JointAdmittance;
  if (s == "task_admittance") return control::ControlMode::TaskAdmittance;
  throw ConfigError("unknown control mode '" + s + "'");
}

SkinConfig parse_skin(const json& j) {
  SkinConfig s;
  read(j, "name", s.name);
  if (!j.contains("link")) throw ConfigError("skin entry needs a link");
  s.link = j.at("link").get<int>();
  auto& p = s.params;
  read(j, "cols", p.cols);
  read(j, "rows", p.rows);
  read(j, "warp", p.warp);
  read(j, "noise_sigma", p.noise_sigma);
  read(j, "saturation", p.saturation);
  read(j, "gain_min", p.gain_min);
  read(j, "gain_max", p.gain_max);
  read(j, "offset_min", p.offset_min);
  read(j, "offset_max", p.offset_max);
  read(j, "activation_radius", p.activation_radius);
  read(j, "watch_cells", s.watch_cells);
  if (p.cols < 1 || p.rows < 1) throw ConfigError("skin grid must be at least 1 x 1");
  if (p.noise_sigma < 0.0 || p.warp < 0.0) throw ConfigError("noise and warp must be non-negative");
  for (int c : s.watch_cells) {
    if (c < 0 || c >= p.cols * p.rows) throw ConfigError("watched cell out of range");
  }
  return s;
}

design::LayerProfile parse_profile(const json& j, design::LayerProfile p) {
  read(j, "ratio_x", p.ratio_x);
  read(j, "ratio_y", p.ratio_y);
  read(j, "stretch_min_x", p.stretch_min_x);
  read(j, "stretch_max_x", p.stretch_max_x);
  read(j, "stretch_min_y", p.stretch_min_y);
  read(j, "stretch_max_y", p.stretch_max_y);
  read(j, "assumed", p.assumed);
  return p;
}

void parse_control(const json& j, control::LoopConfig& c) {
  if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
  read(j, "duration", c.duration);
  read(j, "rate", c.rate);
  read(j, "skin_rate", c.skin_rate);
  if (j.contains("q0")) c.q0 = vecx(j.at("q0"), "control.q0");
  if (j.contains("task_delta")) c.task_delta = vec3(j.at("task_delta"), "control.task_delta");
  read(j, "kp", c.kp);
  if (j.contains("joint_amplitude")) c.joint_amplitude = vecx(j.at("joint_amplitude"), "control.joint_amplitude");
  read(j, "joint_period", c.joint_period);
  read(j, "regularization", c.regularization);
  read(j, "lever_min", c.lever_min);
  if (j.contains("policy")) {
    const auto& pj = j.at("policy");
    const auto kind = pj.value("kind", std::string("zero"));
    if (kind == "zero") {
      c.policy = control::ForcePolicy::zero();
    } else if (kind == "proportional") {
      const double gain = pj.value("gain", 0.0);
      if (!(gain >= 0.0)) throw ConfigError("force policy gain must be non-negative");
      c.policy = control::ForcePolicy::proportional(gain);
    } else {
      throw ConfigError("unknown force policy '" + kind + "'");
    }
  }
  if (j.contains("admittance")) {
    const auto& aj = j.at("admittance");
    auto& a = c.admittance;
    read(aj, "m", a.m);
    read(aj, "k", a.k);
    a.b = 2.0 * std::sqrt(a.k);
    read(aj, "b", a.b);
    read(aj, "ts", a.ts);
    const auto form = aj.value("form", std::string("tustin"));
    if (form == "tustin") {
      a.form = control::AdmittanceForm::Tustin;
    } else if (form == "printed") {
      a.form = control::AdmittanceForm::Printed;
    } else {
      throw ConfigError("unknown admittance form '" + form + "'");
    }
    try {
      control::validate(a);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (!(c.rate > 0.0) || !(c.skin_rate > 0.0) || !(c.duration >= 0.0)) {
    throw ConfigError("control rates must be positive and duration non-negative");
  }
}

}  // namespace

PipelineConfig config_from_json(const json& doc, const fs::path& base_dir) {
  try {
    if (doc.value("kind", std::string()) != kConfigKind) throw ConfigError("not a skinrig.config document");
    const auto version = doc.value("version", std::string("1.0"));
    if (std::stoi(version.substr(0, version.find('.'))) != kConfigMajor) {
      throw FormatVersionError("unsupported config version " + version);
    }
    PipelineConfig c;
    c.base_dir = base_dir;
    if (!doc.contains("seed")) throw ConfigError("config must set an explicit seed");
    c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("chain")) c.chain_path = existing(base_dir, doc.at("chain").get<std::string>(), "chain");

    if (doc.contains("surface")) {
      const auto& sj = doc.at("surface");
      SurfaceSource src;
      if (sj.contains("mesh")) src.mesh = existing(base_dir, sj.at("mesh").get<std::string>(), "mesh");
      if (sj.contains("axis")) src.axis = vec3(sj.at("axis"), "surface.axis").normalized();
      if (sj.contains("origin")) src.origin = vec3(sj.at("origin"), "surface.origin");
      if (sj.contains("link")) src.link = sj.at("link").get<int>();
      if (!src.mesh && !src.link) throw ConfigError("surface needs a mesh or a link");
      if (src.link && !c.chain_path) throw ConfigError("surface.link needs a chain");
      c.surface = src;
    }
    if (doc.contains("design")) {
      const auto& dj = doc.at("design");
      read(dj, "sections", c.sections);
      if (dj.contains("grid")) {
        c.grid_cols = dj.at("grid").at(0).get<int>();
        c.grid_rows = dj.at("grid").at(1).get<int>();
      }
      if (dj.contains("profiles")) {
        for (auto& p : c.profiles) {
          const auto name = design::to_string(p.layer);
          if (dj.at("profiles").contains(name)) p = parse_profile(dj.at("profiles").at(name), p);
        }
      }
      try {
        for (const auto& p : c.profiles) design::validate(p);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (doc.contains("plan")) {
      const auto& pj = doc.at("plan");
      if (pj.contains("max_angle_deg")) c.plan.max_angle = deg(pj.at("max_angle_deg").get<double>());
      read(pj, "press_max_n", c.plan.press_max);
      read(pj, "dwell_s", c.plan.dwell);
      read(pj, "tour_restarts", c.tour_restarts);
      if (pj.contains("obstacles")) {
        for (const auto& oj : pj.at("obstacles")) {
          c.plan.obstacles.push_back({vec3(oj.at("direction"), "obstacle direction").normalized(),
                                      deg(oj.at("half_angle_deg").get<double>())});
        }
      }
    }
    if (doc.contains("rig")) {
      const auto& rj = doc.at("rig");
      read(rj, "frame_rate", c.rig.frame_rate);
      read(rj, "idle_before", c.rig.idle_before);
      read(rj, "idle_after", c.rig.idle_after);
      read(rj, "travel_speed", c.rig.travel_speed);
    }
    if (doc.contains("calibration")) {
      const auto& cj = doc.at("calibration");
      read(cj, "k", c.calibration.k);
      read(cj, "oversample", c.calibration.oversample);
      read(cj, "train_fraction", c.calibration.train_fraction);
      read(cj, "contact_threshold", c.calibration.labels.contact_threshold);
    }
    if (doc.contains("skins")) {
      for (const auto& sj : doc.at("skins")) c.skins.push_back(parse_skin(sj));
    }
    if (doc.contains("control")) parse_control(doc.at("control"), c.control);
    if (doc.contains("trace")) c.trace_path = existing(base_dir, doc.at("trace").get<std::string>(), "trace");
    if (!c.skins.empty() && !c.chain_path) throw ConfigError("skins need a chain");
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(doc, fs::absolute(path).parent_path());
}

kinematics::RobotChain load_config_chain(const PipelineConfig& config) {
  if (!config.chain_path) throw ConfigError("config has no chain");
  try {
    return kinematics::load_chain(*config.chain_path);
  } catch (const ChainFormatError& e) {
    throw ConfigError(e.what());
  } catch (const MeshFormatError& e) {
    throw ConfigError(e.what());
  }
}

geometry::LinkSurface design_surface(const PipelineConfig& config) {
  if (!config.surface) throw ConfigError("config has no surface to design for");
  const auto& src = *config.surface;
  if (src.mesh) {
    geometry::LinkSurface s;
    try {
      s = geometry::load_mesh(*src.mesh);
    } catch (const MeshFormatError& e) {
      throw ConfigError(e.what());
    }
    s.axis = src.axis;
    s.origin = src.origin;
    return s;
  }
  const auto chain = load_config_chain(config);
  if (*src.link < 0 || *src.link >= chain.link_count() || !chain.link_surfaces[*src.link]) {
    throw ConfigError("link " + std::to_string(*src.link) + " has no surface");
  }
  return *chain.link_surfaces[*src.link];
}

DesignResult run_design(const PipelineConfig& config) {
  DesignResult r;
  const auto surface = design_surface(config);
  r.measurements = geometry::measure_surface(surface, config.sections);
  r.feasibility = design::check_feasibility(r.measurements, config.profiles);
  if (r.feasibility.feasible()) {
    r.spec = design::solve_dimensions(r.measurements, config.profiles, config.grid_cols, config.grid_rows);
  }
  r.report = design::design_report(r.measurements, config.profiles, r.feasibility, r.spec ? &*r.spec : nullptr);
  return r;
}

std::uint64_t skin_seed(std::uint64_t seed, const SkinConfig& skin) {
  return Rng::mix(seed, 0x5000u + static_cast<std::uint64_t>(skin.link));
}

std::shared_ptr<const sim::GroundTruthSkin> make_truth(const kinematics::RobotChain& chain,
                                                       const SkinConfig& skin, std::uint64_t seed) {
  if (skin.link < 0 || skin.link >= chain.link_count() || !chain.link_surfaces[skin.link]) {
    throw ConfigError("skin '" + skin.name + "' is on link " + std::to_string(skin.link) +
                      " which has no surface");
  }
  auto chart = std::make_shared<const geometry::CylindricalChart>(*chain.link_surfaces[skin.link]);
  auto params = skin.params;
  params.seed = seed;
  return std::make_shared<const sim::GroundTruthSkin>(chart, params);
}

planner::TouchPlan make_plan(const kinematics::RobotChain& chain, const SkinConfig& skin,
                             const PipelineConfig& config, std::uint64_t seed) {
  const auto& surface = *chain.link_surfaces[skin.link];
  const auto m = geometry::measure_surface(surface, 50);
  const double radius = planner::sample_radius_for_grid(0.5 * (m.h_min + m.h_max), 0.5 * (m.v_min + m.v_max),
                                                        skin.params.cols, skin.params.rows);
  const auto samples = geometry::poisson_disc_sample(surface, radius, Rng::mix(seed, 11));
  std::vector<Vec3> points;
  points.reserve(samples.size());
  for (const auto& s : samples) points.push_back(s.position);
  const auto tour = planner::order_tour(points, Rng::mix(seed, 12), config.tour_restarts);
  std::vector<geometry::SurfaceSample> ordered;
  ordered.reserve(samples.size());
  for (auto i : tour.order) ordered.push_back(samples[i]);
  return planner::plan_touches(ordered, config.plan);
}

CalibrationRun calibrate_skin(const kinematics::RobotChain& chain, const SkinConfig& skin,
                              const PipelineConfig& config, std::uint64_t seed,
                              const sim::CalibrationDataset* recorded) {
  CalibrationRun run;
  run.truth = make_truth(chain, skin, seed);
  run.chart = run.truth->chart_ptr();
  if (recorded != nullptr) {
    if (recorded->cell_count != run.truth->cell_count()) {
      throw ConfigError("recorded dataset has " + std::to_string(recorded->cell_count) +
                        " cells, skin has " + std::to_string(run.truth->cell_count()));
    }
    run.dataset = *recorded;
  } else {
    run.plan = make_plan(chain, skin, config, seed);
    auto rig = config.rig;
    rig.skin_id = skin.name;
    run.dataset = sim::run_calibration(chain, skin.link, run.plan, *run.truth, Rng::mix(seed, 13), rig);
  }
  auto options = config.calibration;
  options.split_seed = Rng::mix(seed, 14);
  run.calibration = calib::calibrate(run.dataset, *run.chart, skin.params.cols, skin.params.rows, options);
  run.metrics = calib::evaluate(run.calibration, run.dataset, run.truth->nominal_centroids(),
                                skin.params.saturation, config.plan.press_max);
  return run;
}

DemoResult run_demo(const PipelineConfig& config, control::ControlMode mode) {
  if (config.skins.empty()) throw ConfigError("demo needs at least one skin");
  if (!config.trace_path) throw ConfigError("demo needs a trace");
  const auto chain = load_config_chain(config);
  if (config.control.q0.size() != chain.dof()) throw ConfigError("control.q0 must have one entry per joint");

  DemoResult out;
  std::vector<control::SkinUnit> units;
  for (const auto& skin : config.skins) {
    out.runs.push_back(calibrate_skin(chain, skin, config, skin_seed(config.seed, skin)));
    units.push_back({skin.name, skin.link, out.runs.back().truth, out.runs.back().calibration, skin.watch_cells});
  }
  auto loop = config.control;
  loop.mode = mode;
  loop.seed = Rng::mix(config.seed, 15);
  control::ContactTrace trace;
  try {
    trace = control::load_trace(*config.trace_path);
  } catch (const TraceFormatError& e) {
    throw ConfigError(e.what());
  }
  out.telemetry = control::run_closed_loop(chain, units, loop, trace);
  return out;
}

}  // namespace skinrig::pipeline
