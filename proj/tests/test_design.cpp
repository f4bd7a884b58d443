#include <doctest.h>

#include <cmath>

#include "skinrig/design/skin_design.hpp"
#include "skinrig/errors.hpp"
#include "skinrig/rng.hpp"

using namespace skinrig;
using namespace skinrig::design;

namespace {

geometry::SurfaceMeasurements mm(double h_min, double h_max, double v_min, double v_max) {
  return {h_min / 1000.0, h_max / 1000.0, v_min / 1000.0, v_max / 1000.0};
}

const LayerProfile& profile(const Profiles& p, Layer l) {
  for (const auto& x : p) {
    if (x.layer == l) return x;
  }
  throw std::logic_error("missing layer");
}

}  // namespace

TEST_CASE("hand-evaluated stitch counts") {
  CHECK(stitch_count(300.0, 0.889, 1.45) == 184);
  CHECK(stitch_count(363.0, 0.981, 1.00) == 357);
  CHECK(stitch_count(300.0, 0.543, 1.00) == 163);

  const auto spec = solve_dimensions(mm(300, 330, 363, 363), default_profiles());
  const auto p = default_profiles();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].layer == Layer::Mesh) {
      CHECK(spec.layers[i].n_x == 163);
    } else {
      CHECK(spec.layers[i].n_x == 184);
      CHECK(spec.layers[i].n_y == 357);
    }
  }
  CHECK(spec.grid_cols == 16);
  CHECK(spec.grid_rows == 16);
}

TEST_CASE("exact multiples do not round up an extra stitch") {
  // 145 mm * 1 st/mm / 1.45 = 100 exactly in real arithmetic
  CHECK(stitch_count(145.0, 1.0, 1.45) == 100);
  CHECK(stitch_count(100.0, 1.0, 1.0) == 100);
}

TEST_CASE("feasibility verdicts") {
  const auto p = default_profiles();
  SUBCASE("cylinder") {
    const auto f = check_feasibility(mm(314, 314, 300, 300), p);
    CHECK(f.feasible());
    CHECK(f.reasons.empty());
  }
  SUBCASE("x ratio 1.3 breaks the top-layer band") {
    const auto f = check_feasibility(mm(300, 390, 300, 300), p);
    CHECK_FALSE(f.x.feasible);
    CHECK(f.x.bound == doctest::Approx(1.77 / 1.45));
    CHECK(f.x.margin < 0.0);
    CHECK(f.y.feasible);
    CHECK_THROWS_AS(solve_dimensions(mm(300, 390, 300, 300), p), InfeasibleDesignError);
    try {
      solve_dimensions(mm(300, 390, 300, 300), p);
    } catch (const InfeasibleDesignError& e) {
      CHECK(e.axis() == DesignAxis::X);
    }
  }
  SUBCASE("y ratio 1.4 fits the 1.00-1.45 vertical band") {
    const auto f = check_feasibility(mm(300, 300, 300, 420), p);
    CHECK(f.y.feasible);
    CHECK(f.y.bound == doctest::Approx(1.45));
    CHECK(f.y.margin == doctest::Approx(0.05));
  }
}

TEST_CASE("profile validation") {
  LayerProfile bad;
  bad.stretch_min_x = 1.5;
  bad.stretch_max_x = 1.2;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  LayerProfile zero;
  zero.ratio_y = 0.0;
  CHECK_THROWS_AS(validate(zero), std::invalid_argument);
  for (const auto& p : default_profiles()) CHECK_NOTHROW(validate(p));
  CHECK(profile(default_profiles(), Layer::Mesh).assumed);
  CHECK_FALSE(profile(default_profiles(), Layer::Top).assumed);
}

TEST_CASE("minimality, band containment and scale covariance on random feasible sets") {
  const auto p = default_profiles();
  const auto f0 = check_feasibility(mm(1, 1, 1, 1), p);
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const double h_min = rng.uniform(50.0, 1000.0), v_min = rng.uniform(50.0, 1000.0);
    const auto m = mm(h_min, h_min * rng.uniform(1.0, f0.x.bound), v_min, v_min * rng.uniform(1.0, f0.y.bound));
    REQUIRE(check_feasibility(m, p).feasible());
    const auto spec = solve_dimensions(m, p);
    const auto doubled = solve_dimensions(mm(2 * h_min, 2000 * m.h_max, 2 * v_min, 2000 * m.v_max), p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto& l = p[i];
      const auto& d = spec.layers[i];
      // decrementing leaves the minimally stretched layer short of the measurement
      CHECK((d.n_x - 1) * l.stretch_min_x / l.ratio_x < h_min);
      CHECK((d.n_y - 1) * l.stretch_min_y / l.ratio_y < v_min);
      const auto bx = size_band(d.n_x, l.ratio_x, l.stretch_min_x, l.stretch_max_x);
      const auto by = size_band(d.n_y, l.ratio_y, l.stretch_min_y, l.stretch_max_y);
      CHECK(bx.lo >= h_min * (1 - 1e-9));
      CHECK(bx.hi >= m.h_max * 1000.0 * (1 - 1e-9));
      CHECK(bx.lo - h_min < l.stretch_min_x / l.ratio_x);  // under one stitch of overshoot
      CHECK(by.lo >= v_min * (1 - 1e-9));
      CHECK(by.hi >= m.v_max * 1000.0 * (1 - 1e-9));
      CHECK(doubled.layers[i].n_x >= 2 * d.n_x - 1);
      CHECK(doubled.layers[i].n_y >= 2 * d.n_y - 1);
    }
  }
}

TEST_CASE("design report carries every intermediate quantity") {
  const auto m = mm(300, 330, 363, 363);
  const auto p = default_profiles();
  const auto f = check_feasibility(m, p);
  const auto spec = solve_dimensions(m, p);
  const auto r = design_report(m, p, f, &spec);
  CHECK(r.at("kind") == "skinrig.skin_spec");
  CHECK(r.at("feasibility").at("feasible") == true);
  REQUIRE(r.at("layers").size() == 3);
  CHECK(r.at("layers")[0].contains("band_x_mm"));
  CHECK(r.at("layers")[0].contains("lower_slack_mm"));
  const auto bad = design_report(mm(300, 400, 300, 300), p, check_feasibility(mm(300, 400, 300, 300), p), nullptr);
  CHECK_FALSE(bad.contains("layers"));
  CHECK(bad.at("feasibility").at("reasons").size() == 1);
}
