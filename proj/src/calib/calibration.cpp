#include "skinrig/calib/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "skinrig/errors.hpp"
#include "skinrig/format.hpp"
#include "skinrig/rng.hpp"

namespace skinrig::calib {

namespace {

constexpr const char* kCalibrationKind = "skinrig.calibration";
constexpr int kCalibrationMajor = 1;

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

Split split_frames(const sim::CalibrationDataset& ds, std::uint64_t seed, double train_fraction,
                   const LabelOptions& labels) {
  auto frames = contact_frames(ds, labels);
  Rng rng(seed);
  shuffle(frames, rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(frames.size())));
  Split s;
  s.train.assign(frames.begin(), frames.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(frames.begin() + static_cast<std::ptrdiff_t>(n_train), frames.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

SkinCalibration calibrate(const sim::CalibrationDataset& ds,
                          const geometry::CylindricalChart& chart, int cols, int rows,
                          const CalibrationOptions& options) {
  if (cols * rows != ds.cell_count) {
    throw std::invalid_argument("grid " + std::to_string(cols) + "x" + std::to_string(rows) +
                                " does not match the dataset's " + std::to_string(ds.cell_count) +
                                " cells");
  }
  SkinCalibration cal;
  cal.skin_id = ds.skin_id;
  cal.cols = cols;
  cal.rows = rows;
  cal.dataset_hash = sim::dataset_hash(ds);
  cal.split_seed = options.split_seed;
  cal.train_fraction = options.train_fraction;
  cal.contact_threshold = options.labels.contact_threshold;
  cal.dead_band = estimate_dead_band(ds, options.labels);

  const Split split = split_frames(ds, options.split_seed, options.train_fraction, options.labels);
  const KnnIndex index(ds, split.train, cal.dead_band);
  cal.k = std::min(options.k, index.size());
  auto fields = compute_receptive_fields(index, chart, cols, rows, {options.k, options.oversample});
  cal.fields = std::move(fields.cells);
  cal.forces = fit_force_models(ds, split.train);
  return cal;
}

Metrics evaluate(const SkinCalibration& cal, const sim::CalibrationDataset& ds,
                 const std::vector<Vec3>& nominal_centroids, double saturation, double press_max) {
  if (static_cast<int>(nominal_centroids.size()) != cal.cell_count() ||
      ds.cell_count != cal.cell_count()) {
    throw std::invalid_argument("calibration, dataset and nominal grid disagree on cell count");
  }
  LabelOptions labels;
  labels.contact_threshold = cal.contact_threshold;
  const Split split = split_frames(ds, cal.split_seed, cal.train_fraction, labels);
  if (split.test.empty()) throw SplitTooSmallError("test split has no in-contact frames");

  Metrics m;
  m.test_frames = split.test.size();
  m.cell_loc_rmse_m.assign(static_cast<std::size_t>(cal.cell_count()), 0.0);
  m.cell_test_frames.assign(static_cast<std::size_t>(cal.cell_count()), 0);
  double loc = 0.0, loc_u = 0.0, force = 0.0, force_n = 0.0;
  for (auto f : split.test) {
    const int c = argmax_cell(ds, f);
    const double reading = ds.reading(f, c);
    const auto& field = cal.fields[c];
    const Vec3 guess = field.calibrated ? field.centroid : nominal_centroids[c];
    const double e = (guess - ds.position[f]).squaredNorm();
    loc += e;
    loc_u += (nominal_centroids[c] - ds.position[f]).squaredNorm();
    m.cell_loc_rmse_m[c] += e;
    ++m.cell_test_frames[c];

    const double naive = press_max * reading / saturation;
    const auto& fm = cal.forces[c];
    const double predicted = fm.fitted ? fm.predict(reading) : naive;
    force += (predicted - ds.force[f]) * (predicted - ds.force[f]);
    force_n += (naive - ds.force[f]) * (naive - ds.force[f]);
  }
  const double n = static_cast<double>(split.test.size());
  m.loc_rmse_m = std::sqrt(loc / n);
  m.loc_rmse_uncal_m = std::sqrt(loc_u / n);
  m.force_rmse_n = std::sqrt(force / n);
  m.force_rmse_naive_n = std::sqrt(force_n / n);
  for (std::size_t c = 0; c < m.cell_loc_rmse_m.size(); ++c) {
    if (m.cell_test_frames[c] > 0) {
      m.cell_loc_rmse_m[c] = std::sqrt(m.cell_loc_rmse_m[c] / static_cast<double>(m.cell_test_frames[c]));
    }
  }
  return m;
}

nlohmann::json calibration_to_json(const SkinCalibration& cal) {
  using nlohmann::json;
  json doc{{"kind", kCalibrationKind},
           {"version", "1.0"},
           {"skin_id", cal.skin_id},
           {"cols", cal.cols},
           {"rows", cal.rows},
           {"dataset_hash", cal.dataset_hash},
           {"split_seed", cal.split_seed},
           {"train_fraction", cal.train_fraction},
           {"k", cal.k},
           {"dead_band", cal.dead_band},
           {"contact_threshold", cal.contact_threshold}};
  json cells = json::array();
  for (int c = 0; c < cal.cell_count(); ++c) {
    const auto& f = cal.fields[c];
    const auto& m = cal.forces[c];
    json boundary = json::array();
    for (const auto& p : f.boundary) boundary.push_back(vec_json(p));
    json boundary_uv = json::array();
    for (const auto& [u, v] : f.boundary_uv) boundary_uv.push_back({u, v});
    cells.push_back({{"cell_id", c},
                     {"calibrated", f.calibrated},
                     {"centroid", vec_json(f.centroid)},
                     {"normal", vec_json(f.normal)},
                     {"area", f.area},
                     {"support_count", f.support_count},
                     {"boundary", boundary},
                     {"boundary_uv", boundary_uv},
                     {"force",
                      {{"slope", m.slope},
                       {"intercept", m.intercept},
                       {"r2", m.r2},
                       {"rmse_train", m.rmse_train},
                       {"samples", m.samples},
                       {"fitted", m.fitted},
                       {"degenerate", m.degenerate}}}});
  }
  doc["cells"] = cells;
  return doc;
}

SkinCalibration calibration_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("kind", std::string()) != kCalibrationKind) {
      throw ConfigError("not a skinrig calibration document");
    }
    const std::string version = doc.value("version", std::string());
    if (version.empty() || std::stoi(version) != kCalibrationMajor) {
      throw FormatVersionError("calibration version " + version + " is not supported");
    }
    SkinCalibration cal;
    cal.skin_id = doc.at("skin_id").get<std::string>();
    cal.cols = doc.at("cols").get<int>();
    cal.rows = doc.at("rows").get<int>();
    cal.dataset_hash = doc.at("dataset_hash").get<std::string>();
    cal.split_seed = doc.at("split_seed").get<std::uint64_t>();
    cal.train_fraction = doc.at("train_fraction").get<double>();
    cal.k = doc.at("k").get<std::size_t>();
    cal.dead_band = doc.at("dead_band").get<double>();
    cal.contact_threshold = doc.at("contact_threshold").get<double>();
    const auto& cells = doc.at("cells");
    if (static_cast<int>(cells.size()) != cal.cell_count()) {
      throw ConfigError("calibration lists " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(cal.cell_count()));
    }
    for (const auto& j : cells) {
      CellReceptiveField f;
      f.cell_id = j.at("cell_id").get<int>();
      f.calibrated = j.at("calibrated").get<bool>();
      f.centroid = vec_from(j.at("centroid"));
      f.normal = vec_from(j.at("normal"));
      f.area = j.at("area").get<double>();
      f.support_count = j.at("support_count").get<std::size_t>();
      for (const auto& p : j.at("boundary")) f.boundary.push_back(vec_from(p));
      for (const auto& p : j.at("boundary_uv")) {
        f.boundary_uv.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      }
      const auto& fj = j.at("force");
      CellForceModel m;
      m.cell_id = f.cell_id;
      m.slope = fj.at("slope").get<double>();
      m.intercept = fj.at("intercept").get<double>();
      m.r2 = fj.at("r2").get<double>();
      m.rmse_train = fj.at("rmse_train").get<double>();
      m.samples = fj.at("samples").get<std::size_t>();
      m.fitted = fj.at("fitted").get<bool>();
      m.degenerate = fj.at("degenerate").get<bool>();
      cal.fields.push_back(std::move(f));
      cal.forces.push_back(m);
    }
    return cal;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed calibration: ") + e.what());
  }
}

void save_calibration(const SkinCalibration& cal, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << calibration_to_json(cal).dump(1) << '\n';
}

SkinCalibration load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open calibration " + path.string());
  try {
    return calibration_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string metrics_csv(const Metrics& m) {
  std::ostringstream os;
  os << "metric,value\n";
  os << "loc_rmse_m," << fmt_double(m.loc_rmse_m) << '\n';
  os << "loc_rmse_uncal_m," << fmt_double(m.loc_rmse_uncal_m) << '\n';
  os << "force_rmse_n," << fmt_double(m.force_rmse_n) << '\n';
  os << "force_rmse_naive_n," << fmt_double(m.force_rmse_naive_n) << '\n';
  os << "test_frames," << m.test_frames << '\n';
  return os.str();
}

nlohmann::json field_plot_json(const SkinCalibration& cal, const Metrics& m,
                               const std::vector<Vec3>& nominal_centroids) {
  using nlohmann::json;
  json doc{{"kind", "skinrig.field_plot"}, {"version", "1.0"}, {"skin_id", cal.skin_id},
           {"cols", cal.cols}, {"rows", cal.rows}};
  json cells = json::array();
  for (int c = 0; c < cal.cell_count(); ++c) {
    const auto& f = cal.fields[c];
    json uv = json::array();
    for (const auto& [u, v] : f.boundary_uv) uv.push_back({u, v});
    cells.push_back({{"cell_id", c},
                     {"boundary_uv", uv},
                     {"centroid", vec_json(f.centroid)},
                     {"nominal_centroid", vec_json(nominal_centroids[c])},
                     {"loc_rmse_m", m.cell_loc_rmse_m[c]},
                     {"test_frames", m.cell_test_frames[c]}});
  }
  doc["cells"] = cells;
  return doc;
}

}  // namespace skinrig::calib
