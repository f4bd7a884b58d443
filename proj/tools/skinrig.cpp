// Command-line front end: design, calibrate, evaluate and the two control demos.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "skinrig/errors.hpp"
#include "skinrig/pipeline/pipeline.hpp"

namespace fs = std::filesystem;
using namespace skinrig;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kInfeasible = 3, kCoverage = 4, kSolver = 5 };

struct Args {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string dataset;
  std::string calibration;
  std::string out = ".";
  std::optional<double> max_angle_deg;
  std::optional<double> press_max_n;
  std::optional<double> dwell_s;
};

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

pipeline::PipelineConfig load(const Args& a) {
  auto c = pipeline::load_config(a.config);
  if (a.seed) c.seed = *a.seed;
  if (a.max_angle_deg) c.plan.max_angle = *a.max_angle_deg * std::numbers::pi / 180.0;
  if (a.press_max_n) c.plan.press_max = *a.press_max_n;
  if (a.dwell_s) c.plan.dwell = *a.dwell_s;
  return c;
}

int cmd_design(const Args& a) {
  const auto c = load(a);
  const auto r = pipeline::run_design(c);
  write_text(fs::path(a.out) / "skin_spec.json", r.report.dump(2) + "\n");
  if (!r.spec) {
    for (const auto& why : r.feasibility.reasons) std::cerr << "infeasible: " << why << "\n";
    return kInfeasible;
  }
  for (const auto& l : r.spec->layers) {
    std::cout << design::to_string(l.layer) << ": " << l.n_x << " x " << l.n_y << " stitches\n";
  }
  return kOk;
}

void write_run(const fs::path& dir, const pipeline::CalibrationRun& run, bool with_dataset) {
  if (with_dataset) {
    write_text(dir / "plan.jsonl", planner::plan_jsonl(run.plan));
    write_text(dir / "dataset.csv", sim::serialize_dataset(run.dataset));
  }
  write_text(dir / "calibration.json", calib::calibration_to_json(run.calibration).dump(2) + "\n");
  write_text(dir / "metrics.csv", calib::metrics_csv(run.metrics));
  write_text(dir / "fields.json",
             calib::field_plot_json(run.calibration, run.metrics, run.truth->nominal_centroids()).dump(2) + "\n");
}

int cmd_calibrate(const Args& a) {
  const auto c = load(a);
  if (c.skins.empty()) throw ConfigError("config has no skins to calibrate");
  const auto chain = pipeline::load_config_chain(c);
  std::optional<sim::CalibrationDataset> recorded;
  if (!a.dataset.empty()) {
    if (c.skins.size() != 1) throw ConfigError("--dataset needs a config with exactly one skin");
    recorded = sim::load_dataset(a.dataset);
  }
  for (const auto& skin : c.skins) {
    const auto run = pipeline::calibrate_skin(chain, skin, c, pipeline::skin_seed(c.seed, skin),
                                              recorded ? &*recorded : nullptr);
    write_run(fs::path(a.out) / skin.name, run, !recorded);
    std::cout << skin.name << ": localization " << run.metrics.loc_rmse_m << " m (uncalibrated "
              << run.metrics.loc_rmse_uncal_m << "), force " << run.metrics.force_rmse_n << " N (naive "
              << run.metrics.force_rmse_naive_n << ")\n";
  }
  return kOk;
}

int cmd_evaluate(const Args& a) {
  const auto c = load(a);
  if (c.skins.size() != 1) throw ConfigError("evaluate needs a config with exactly one skin");
  if (a.calibration.empty()) throw ConfigError("evaluate needs --calibration");
  const auto& skin = c.skins.front();
  const auto chain = pipeline::load_config_chain(c);
  const auto seed = pipeline::skin_seed(c.seed, skin);
  const auto cal = calib::load_calibration(a.calibration);
  const auto truth = pipeline::make_truth(chain, skin, seed);
  sim::CalibrationDataset ds;
  if (!a.dataset.empty()) {
    ds = sim::load_dataset(a.dataset);
  } else {
    ds = sim::run_calibration(chain, skin.link, pipeline::make_plan(chain, skin, c, seed), *truth,
                              Rng::mix(seed, 13), c.rig);
  }
  const auto m = calib::evaluate(cal, ds, truth->nominal_centroids(), skin.params.saturation, c.plan.press_max);
  write_text(fs::path(a.out) / "metrics.csv", calib::metrics_csv(m));
  std::cout << calib::metrics_csv(m);
  return kOk;
}

int cmd_demo(const Args& a, bool admittance) {
  const auto c = load(a);
  auto mode = control::ControlMode::Qp;
  if (admittance) {
    mode = c.control.mode == control::ControlMode::TaskAdmittance ? control::ControlMode::TaskAdmittance
                                                                  : control::ControlMode::JointAdmittance;
  }
  const auto r = pipeline::run_demo(c, mode);
  const fs::path out(a.out);
  write_text(out / "telemetry.csv", r.telemetry.csv());
  json summary = {{"kind", "skinrig.demo_summary"}, {"version", "1.0"}, {"seed", c.seed},
                  {"mode", admittance ? "admittance" : "qp"}, {"steps", r.telemetry.rows.size()}};
  const auto n = r.telemetry.series("n_contacts");
  const auto pdot = r.telemetry.series("pdot_u");
  const auto status = r.telemetry.series("qp_status");
  double max_pdot = 0.0;
  std::size_t contact_steps = 0, safe_stops = 0;
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (n[k] > 0) {
      ++contact_steps;
      max_pdot = std::max(max_pdot, std::abs(pdot[k]));
    }
    safe_stops += status[k] != 0.0;
  }
  summary["contact_steps"] = contact_steps;
  summary["max_abs_pdot_u_in_contact"] = max_pdot;
  summary["safe_stops"] = safe_stops;
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const auto& name = c.skins[i].name;
    write_run(out / name, r.runs[i], false);
    summary["skins"][name] = {{"loc_rmse_m", r.runs[i].metrics.loc_rmse_m},
                              {"force_rmse_n", r.runs[i].metrics.force_rmse_n}};
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  std::cout << "telemetry: " << r.telemetry.rows.size() << " steps, " << contact_steps << " with contact\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactile skin design, calibration and control harness"};
  app.require_subcommand(1);
  Args a;

  auto common = [&a](CLI::App* sub) {
    sub->add_option("--config", a.config, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", a.out, "output directory");
    sub->add_option("--seed", a.seed, "override the config seed");
  };
  auto plan_flags = [&a](CLI::App* sub) {
    sub->add_option("--max-angle-deg", a.max_angle_deg, "largest probe tilt from the normal");
    sub->add_option("--press-max-n", a.press_max_n, "peak press force");
    sub->add_option("--dwell-s", a.dwell_s, "press duration");
  };

  auto* design = app.add_subcommand("design", "measure a link and size the skin layers");
  common(design);
  auto* calibrate = app.add_subcommand("calibrate", "plan, simulate and calibrate each skin");
  common(calibrate);
  plan_flags(calibrate);
  calibrate->add_option("--dataset", a.dataset, "replay a recorded dataset instead of simulating")
      ->check(CLI::ExistingFile);
  auto* evaluate = app.add_subcommand("evaluate", "score a saved calibration");
  common(evaluate);
  plan_flags(evaluate);
  evaluate->add_option("--calibration", a.calibration, "calibration JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--dataset", a.dataset, "dataset to score against")->check(CLI::ExistingFile);
  auto* qp = app.add_subcommand("run-qp-demo", "closed-loop QP trajectory modification");
  common(qp);
  plan_flags(qp);
  auto* adm = app.add_subcommand("run-admittance-demo", "closed-loop admittance control");
  common(adm);
  plan_flags(adm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*design) return cmd_design(a);
    if (*calibrate) return cmd_calibrate(a);
    if (*evaluate) return cmd_evaluate(a);
    if (*qp) return cmd_demo(a, false);
    if (*adm) return cmd_demo(a, true);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const FormatVersionError& e) {
    std::cerr << "version error: " << e.what() << "\n";
    return kConfig;
  } catch (const InfeasibleDesignError& e) {
    std::cerr << "infeasible design: " << e.what() << "\n";
    return kInfeasible;
  } catch (const AngleInfeasibleError& e) {
    std::cerr << "infeasible plan: " << e.what() << "\n";
    return kInfeasible;
  } catch (const CoverageError& e) {
    std::cerr << "coverage error: " << e.what() << "\n";
    return kCoverage;
  } catch (const InfeasibleQPError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  } catch (const DegenerateFitError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kConfig;
}
