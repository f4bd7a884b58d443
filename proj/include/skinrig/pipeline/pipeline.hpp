#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skinrig/calib/calibration.hpp"
#include "skinrig/control/closed_loop.hpp"
#include "skinrig/design/skin_design.hpp"
#include "skinrig/geometry/measure.hpp"
#include "skinrig/kinematics/chain.hpp"
#include "skinrig/planner/touch_plan.hpp"
#include "skinrig/sim/rig.hpp"

namespace skinrig::pipeline {

struct SkinConfig {
  std::string name = "skin";
  int link = 0;
  sim::SkinParams params;  // params.seed is replaced per run
  std::vector<int> watch_cells;
};

/// Where the design command gets its surface: a mesh file with an axis, or
/// a link surface of the chain.
struct SurfaceSource {
  std::optional<std::filesystem::path> mesh;
  Vec3 axis = Vec3::UnitZ();
  Vec3 origin = Vec3::Zero();
  std::optional<int> link;
};

struct PipelineConfig {
  std::filesystem::path base_dir;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> chain_path;
  std::optional<SurfaceSource> surface;
  int sections = 200;
  int grid_cols = 16;
  int grid_rows = 16;
  design::Profiles profiles = design::default_profiles();
  planner::PlanOptions plan;
  int tour_restarts = 4;
  sim::RigOptions rig;
  calib::CalibrationOptions calibration;
  std::vector<SkinConfig> skins;
  control::LoopConfig control;
  std::optional<std::filesystem::path> trace_path;
};

/// Parses a "skinrig.config" document. Relative paths resolve against
/// base_dir and must exist. Throws ConfigError.
PipelineConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

kinematics::RobotChain load_config_chain(const PipelineConfig& config);

/// Surface named by config.surface, in its own frame.
geometry::LinkSurface design_surface(const PipelineConfig& config);

struct DesignResult {
  geometry::SurfaceMeasurements measurements;
  design::Feasibility feasibility;
  std::optional<design::SkinSpec> spec;
  nlohmann::json report;
};

/// Measures the surface and solves the stitch counts. An infeasible design
/// is returned with an empty spec rather than thrown.
DesignResult run_design(const PipelineConfig& config);

struct CalibrationRun {
  std::shared_ptr<const geometry::CylindricalChart> chart;
  std::shared_ptr<const sim::GroundTruthSkin> truth;
  planner::TouchPlan plan;
  sim::CalibrationDataset dataset;
  calib::SkinCalibration calibration;
  calib::Metrics metrics;
};

/// Seed of one skin's run, derived from the pipeline seed and the link.
std::uint64_t skin_seed(std::uint64_t seed, const SkinConfig& skin);

/// Ground-truth skin for `skin` under `seed`.
std::shared_ptr<const sim::GroundTruthSkin> make_truth(const kinematics::RobotChain& chain,
                                                       const SkinConfig& skin, std::uint64_t seed);

/// Poisson touch points in tour order with approach directions.
planner::TouchPlan make_plan(const kinematics::RobotChain& chain, const SkinConfig& skin,
                             const PipelineConfig& config, std::uint64_t seed);

/// Plan, simulate (or use `recorded`), calibrate and evaluate one skin.
CalibrationRun calibrate_skin(const kinematics::RobotChain& chain, const SkinConfig& skin,
                              const PipelineConfig& config, std::uint64_t seed,
                              const sim::CalibrationDataset* recorded = nullptr);

/// Calibrates every skin, then replays the configured trace in closed loop.
struct DemoResult {
  std::vector<CalibrationRun> runs;
  control::Telemetry telemetry;
};
DemoResult run_demo(const PipelineConfig& config, control::ControlMode mode);

}  // namespace skinrig::pipeline
