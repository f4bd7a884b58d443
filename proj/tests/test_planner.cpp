#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "skinrig/errors.hpp"
#include "skinrig/pipeline/pipeline.hpp"
#include "skinrig/planner/touch_plan.hpp"
#include "skinrig/planner/tour.hpp"
#include "skinrig/rng.hpp"
#include "support.hpp"

using namespace skinrig;
using namespace skinrig::planner;
using std::numbers::pi;

namespace {

double deg(double d) { return d * pi / 180.0; }

double angle(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

bool is_permutation_of_all(const std::vector<std::size_t>& order, std::size_t n) {
  auto s = order;
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (s.size() != n || s[i] != i) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("collinear points are visited in order") {
  const std::vector<Vec3> pts{Vec3(2, 0, 0), Vec3(0, 0, 0), Vec3(3, 0, 0), Vec3(1, 0, 0)};
  const auto t = order_tour(pts, 1);
  CHECK(t.length == doctest::Approx(3.0));
  std::vector<double> xs;
  for (auto i : t.order) xs.push_back(pts[i].x());
  CHECK((std::is_sorted(xs.begin(), xs.end()) || std::is_sorted(xs.rbegin(), xs.rend())));
}

TEST_CASE("two points form a single leg") {
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(0, 3, 4)};
  CHECK(order_tour(pts, 1).length == doctest::Approx(5.0));
  CHECK_THROWS_AS(order_tour({Vec3::Zero()}, 1), std::invalid_argument);
}

TEST_CASE("eight random points: within 5 percent of the exhaustive optimum") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 8; ++i) pts.emplace_back(rng.uniform(), rng.uniform(), 0.0);
    std::vector<std::size_t> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
      best = std::min(best, path_length(pts, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto t = order_tour(pts, static_cast<std::uint64_t>(trial));
    CHECK(is_permutation_of_all(t.order, 8));
    CHECK(t.length == doctest::Approx(path_length(pts, t.order)));
    CHECK(t.length <= 1.05 * best);
  }
}

TEST_CASE("tour is 2-opt optimal, no longer than nearest neighbour, and deterministic") {
  Rng rng(5);
  std::vector<Vec3> pts;
  for (int i = 0; i < 150; ++i) pts.emplace_back(rng.uniform(), rng.uniform(), rng.uniform(0, 0.2));
  const auto t = order_tour(pts, 9);
  CHECK(is_permutation_of_all(t.order, pts.size()));
  CHECK(best_two_opt_gain(pts, t.order) <= 1e-12);
  CHECK(t.length <= path_length(pts, nearest_neighbor_path(pts, 0)) + 1e-12);
  const auto again = order_tour(pts, 9);
  CHECK(again.order == t.order);
}

TEST_CASE("approach directions under obstacle cones") {
  const Vec3 n = Vec3::UnitZ();
  CHECK(approach_direction(n, {}, deg(26)) == n);
  SUBCASE("cone forcing a 20 degree tilt is accepted") {
    const auto d = approach_direction(n, {{Vec3::UnitZ(), deg(20)}}, deg(26));
    CHECK(angle(d, n) <= deg(26) + 1e-9);
    CHECK(angle(d, Vec3::UnitZ()) >= deg(20));
    CHECK(angle(d, n) == doctest::Approx(deg(20)).epsilon(1e-6));
  }
  SUBCASE("cone forcing a 30 degree tilt is rejected") {
    CHECK_THROWS_AS(approach_direction(n, {{Vec3::UnitZ(), deg(30)}}, deg(26)), AngleInfeasibleError);
  }
  SUBCASE("off-axis cone tilts away from its axis") {
    const Vec3 axis = Vec3(std::sin(deg(10)), 0, std::cos(deg(10)));
    const auto d = approach_direction(n, {{axis, deg(25)}}, deg(26));
    CHECK(angle(d, axis) >= deg(25) - 1e-9);
    CHECK(angle(d, n) == doctest::Approx(deg(15)).epsilon(1e-6));
  }
}

TEST_CASE("press profile is a trapezoid within 0..press_max") {
  const auto p = trapezoid(10.0, 1.5);
  CHECK(profile_force(p, -0.1) == 0.0);
  CHECK(profile_force(p, 0.0) == 0.0);
  CHECK(profile_force(p, 0.25) == doctest::Approx(5.0));
  CHECK(profile_force(p, 0.75) == doctest::Approx(10.0));
  CHECK(profile_force(p, 1.5) == doctest::Approx(0.0));
  CHECK(profile_force(p, 2.0) == 0.0);
  for (const auto& [t, f] : p) {
    CHECK(f >= 0.0);
    CHECK(f <= 10.0);
  }
}

TEST_CASE("link-2 plan for a 16x16 skin") {
  pipeline::PipelineConfig cfg;
  cfg.plan.obstacles = {{Vec3(1, 0, 0), deg(15)}};
  const auto chain = kinematics::load_chain(test::asset("chains/fanuc_proxy.json"));
  pipeline::SkinConfig skin;
  skin.link = 2;
  const auto plan = pipeline::make_plan(chain, skin, cfg, 7);
  CHECK(plan.touches.size() >= 256);
  double worst = 0.0;
  for (const auto& t : plan.touches) {
    worst = std::max(worst, angle(t.approach_dir, t.sample.normal));
    CHECK(std::abs(t.approach_dir.norm() - 1.0) < 1e-9);
  }
  CHECK(worst <= cfg.plan.max_angle + 1e-9);
  CHECK(worst > 0.0);  // the obstacle forced some tilts

  std::istringstream lines(plan_jsonl(plan));
  std::string line;
  std::getline(lines, line);
  CHECK(nlohmann::json::parse(line).at("kind") == "skinrig.touch_plan");
  std::size_t n = 0;
  while (std::getline(lines, line)) n += !line.empty();
  CHECK(n == plan.touches.size());
}
