#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "skinrig/errors.hpp"
#include "skinrig/geometry/chart.hpp"
#include "skinrig/geometry/locator.hpp"
#include "skinrig/geometry/measure.hpp"
#include "skinrig/geometry/mesh_io.hpp"
#include "skinrig/geometry/poisson.hpp"
#include "skinrig/rng.hpp"
#include "support.hpp"

using namespace skinrig;
using namespace skinrig::geometry;
using std::numbers::pi;

namespace {

double polygon_perimeter(int n, double r) { return 2.0 * n * r * std::sin(pi / n); }

double min_pair_distance(const std::vector<SurfaceSample>& s) {
  double best = 1e300;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) best = std::min(best, (s[i].position - s[j].position).norm());
  }
  return best;
}

// Dart throwing on the exact cylinder: uniform area samples, accept when no
// earlier sample is closer than r, stop after `patience` straight rejections.
std::size_t rejection_count(double R, double L, double r, std::uint64_t seed, int patience) {
  Rng rng(seed);
  std::vector<Vec3> pts;
  int fails = 0;
  while (fails < patience) {
    const double th = rng.uniform(0.0, 2.0 * pi);
    const Vec3 p(R * std::cos(th), R * std::sin(th), rng.uniform(0.0, L));
    bool ok = true;
    for (const auto& q : pts) {
      if ((q - p).squaredNorm() < r * r) {
        ok = false;
        break;
      }
    }
    if (ok) {
      pts.push_back(p);
      fails = 0;
    } else {
      ++fails;
    }
  }
  return pts.size();
}

}  // namespace

TEST_CASE("cylinder sections and axial extents") {
  const int seg = 96;
  const auto cyl = make_cylinder(0.05, 0.3, seg, 10);
  const auto m = measure_surface(cyl, 50);
  CHECK(m.h_min == doctest::Approx(polygon_perimeter(seg, 0.05)).epsilon(1e-12));
  CHECK(m.h_max == doctest::Approx(polygon_perimeter(seg, 0.05)).epsilon(1e-12));
  CHECK(m.h_min == doctest::Approx(2.0 * pi * 0.05).epsilon(1e-3));
  CHECK(m.v_min == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(m.v_max == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("frustum sections approach the end circles") {
  const int seg = 256, n = 400;
  const auto cone = make_frustum(0.04, 0.06, 0.3, seg, 8);
  const auto m = measure_surface(cone, n);
  // planes sit at (k + 0.5) / n of the length
  const double r_lo = 0.04 + 0.02 * 0.5 / n, r_hi = 0.06 - 0.02 * 0.5 / n;
  CHECK(m.h_min == doctest::Approx(polygon_perimeter(seg, r_lo)).epsilon(1e-9));
  CHECK(m.h_max == doctest::Approx(polygon_perimeter(seg, r_hi)).epsilon(1e-9));
  CHECK(m.h_min == doctest::Approx(2.0 * pi * 0.04).epsilon(2e-3));
  CHECK(m.h_max == doctest::Approx(2.0 * pi * 0.06).epsilon(2e-3));
  const double slant = std::hypot(0.3, 0.02);
  CHECK(m.v_min == doctest::Approx(slant).epsilon(1e-9));
}

TEST_CASE("link-2 proxy measurements match the independent perimeter oracle") {
  const auto golden = nlohmann::json::parse(test::slurp(test::asset("golden/link2_measurements.json")));
  auto surface = load_mesh(test::asset("meshes/link2_proxy.obj"));
  surface.axis = Vec3::UnitZ();
  const auto m = measure_surface(surface, golden.at("n_sections").get<int>());
  CHECK(m.h_min == doctest::Approx(golden.at("h_min").get<double>()).epsilon(1e-9));
  CHECK(m.h_max == doctest::Approx(golden.at("h_max").get<double>()).epsilon(1e-9));
  CHECK(m.h_max / m.h_min <= 1.77 / 1.45);
}

TEST_CASE("measurements scale with the mesh") {
  auto surface = load_mesh(test::asset("meshes/link2_proxy.obj"));
  surface.axis = Vec3::UnitZ();
  const auto a = measure_surface(surface, 40);
  for (double s : {0.5, 2.0, 7.3}) {
    const auto b = measure_surface(scaled(surface, s), 40);
    CHECK(b.h_min == doctest::Approx(s * a.h_min).epsilon(1e-9));
    CHECK(b.h_max == doctest::Approx(s * a.h_max).epsilon(1e-9));
    CHECK(b.v_min == doctest::Approx(s * a.v_min).epsilon(1e-9));
    CHECK(b.v_max == doctest::Approx(s * a.v_max).epsilon(1e-9));
  }
}

TEST_CASE("measurement errors") {
  SUBCASE("open section") {
    auto open = make_cylinder(0.05, 0.3, 32, 4, false);
    // drop one quad of the first ring: sections through it end in loose ends
    open.triangles.erase(open.triangles.begin(), open.triangles.begin() + 2);
    CHECK_THROWS_AS(measure_surface(open, 8), OpenSectionError);
  }
  SUBCASE("section with too few points") {
    const auto sq = make_square(1.0);  // axis x, the plane cuts a single segment
    CHECK_THROWS_AS(measure_surface(sq, 4), Error);
  }
  SUBCASE("non-unit axis") {
    auto cyl = make_cylinder(0.05, 0.3, 16, 2);
    cyl.axis = Vec3(0, 0, 2);
    CHECK_THROWS_AS(validate(cyl), InvalidSurfaceError);
  }
}

TEST_CASE("mesh io round trip") {
  const auto cyl = make_cylinder(0.05, 0.3, 12, 3);
  std::stringstream obj;
  write_obj(obj, cyl);
  const auto back = read_obj(obj);
  REQUIRE(back.vertices.size() == cyl.vertices.size());
  REQUIRE(back.triangles == cyl.triangles);
  for (std::size_t i = 0; i < cyl.vertices.size(); ++i) CHECK(back.vertices[i] == cyl.vertices[i]);

  std::stringstream stl;
  write_stl(stl, cyl);
  const auto s = read_stl(stl);
  CHECK(s.triangles.size() == cyl.triangles.size());
  CHECK(surface_area(s) == doctest::Approx(surface_area(cyl)).epsilon(1e-12));

  std::stringstream bad("v 0 0 0\nf 1 2 3\n");
  CHECK_THROWS_AS(read_obj(bad), MeshFormatError);
}

TEST_CASE("closest point on triangle agrees with dense barycentric search") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 a(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec3 b(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec3 c(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec3 p(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const double d = (closest_point_on_triangle(p, a, b, c) - p).norm();
    double brute = 1e300;
    const int n = 300;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; i + j <= n; ++j) {
        const double u = double(i) / n, v = double(j) / n;
        brute = std::min(brute, (a + u * (b - a) + v * (c - a) - p).norm());
      }
    }
    CHECK(d <= brute + 1e-12);
    CHECK(d >= brute - 0.01);
  }
}

TEST_CASE("locator matches exhaustive closest point") {
  const auto surface = make_revolved([](double t, double th) { return 0.05 + 0.01 * std::sin(3 * th) + 0.02 * t; },
                                     0.0, 0.3, 40, 12, true);
  const TriangleLocator loc(surface, 0.02);
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const Vec3 p(rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15), rng.uniform(-0.1, 0.4));
    double best = 1e300;
    for (const auto& t : surface.triangles) {
      best = std::min(best, (closest_point_on_triangle(p, surface.vertices[t[0]], surface.vertices[t[1]],
                                                       surface.vertices[t[2]]) - p).norm());
    }
    CHECK(loc.closest(p).distance == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("chart round trip and surface grid area") {
  const auto cyl = make_cylinder(0.05, 0.3, 64, 6);
  const CylindricalChart chart(cyl);
  for (double u : {0.03, 0.25, 0.61, 0.97}) {
    for (double v : {0.1, 0.5, 0.9}) {
      const auto hit = chart.surface_at(u, v);
      REQUIRE(hit);
      const auto [pu, pv] = chart.param_of(hit->point);
      CHECK(pu == doctest::Approx(u).epsilon(1e-9));
      CHECK(pv == doctest::Approx(v).epsilon(1e-9));
      CHECK(hit->normal.norm() == doctest::Approx(1.0));
    }
  }
  const auto grid = make_surface_grid(chart, 64, 30);
  double area = 0.0;
  for (std::size_t i = 0; i < grid.area.size(); ++i) area += grid.valid[i] ? grid.area[i] : 0.0;
  CHECK(area == doctest::Approx(surface_area(lateral_part(cyl))).epsilon(1e-2));
  const auto centers = grid_cell_centers(chart, 4, 3);
  CHECK(centers.size() == 12);
  CHECK(chart.param_of(centers[1 * 4 + 2]).first == doctest::Approx(2.5 / 4));
}

TEST_CASE("poisson samples on the unit square keep their distance") {
  const auto sq = make_square(1.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = poisson_disc_sample(sq, 0.4, seed);
    REQUIRE(s.size() >= 4);
    CHECK(min_pair_distance(s) >= 0.4);
  }
}

TEST_CASE("poisson minimum distance, projection and determinism over 100 seeds") {
  const auto cyl = make_cylinder(0.05, 0.3, 64, 8);
  const TriangleLocator loc(cyl, 0.02);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = poisson_disc_sample(cyl, 0.02, seed);
    REQUIRE(s.size() >= 4);
    CHECK(min_pair_distance(s) >= 0.02);
    for (const auto& x : s) {
      CHECK(loc.closest(x.position).distance < 1e-6);
      CHECK(std::abs(x.normal.norm() - 1.0) < 1e-9);
    }
    if (seed <= 3) {
      const auto again = poisson_disc_sample(cyl, 0.02, seed);
      REQUIRE(again.size() == s.size());
      for (std::size_t i = 0; i < s.size(); ++i) CHECK(again[i].position == s[i].position);
    }
  }
}

TEST_CASE("poisson samples are maximal: no lateral point farther than 2r") {
  const auto cyl = make_cylinder(0.05, 0.3, 64, 8);
  const double r = 0.02;
  const auto s = poisson_disc_sample(cyl, r, 42);
  Rng rng(99);
  int far = 0;
  for (int i = 0; i < 5000; ++i) {
    const double th = rng.uniform(0, 2 * pi), z = rng.uniform(0, 0.3);
    const Vec3 p(0.05 * std::cos(th), 0.05 * std::sin(th), z);
    double best = 1e300;
    for (const auto& x : s) best = std::min(best, (x.position - p).norm());
    far += best > 2.0 * r;
  }
  CHECK(far == 0);
}

TEST_CASE("poisson density lies inside the band measured by a rejection oracle") {
  const double R = 0.05, L = 0.3, r = 0.0145;
  const double unit = 2.0 * pi * R * L / (4.0 * r * r);
  std::size_t lo = SIZE_MAX, hi = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto n = rejection_count(R, L, r, seed, 4000);
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  const auto cyl = make_cylinder(R, L, 128, 12);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto n = static_cast<double>(poisson_disc_sample(cyl, r, seed).size());
    CHECK(n >= 0.3 * unit);
    CHECK(n <= static_cast<double>(hi));
    // a maximal sampler is as dense as saturated dart throwing, to a few percent
    CHECK(n >= 0.9 * static_cast<double>(lo));
  }
}

TEST_CASE("oversized radius is rejected") {
  const auto cyl = make_cylinder(0.05, 0.3, 32, 4);
  CHECK_THROWS_AS(poisson_disc_sample(cyl, 10.0, 1), RadiusTooLargeError);
}
