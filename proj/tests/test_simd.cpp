#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "skinrig/rng.hpp"
#include "skinrig/simd/kernels.hpp"

using namespace skinrig;
using namespace skinrig::simd;

namespace {

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> out;
  for (Level l : {Level::Avx2, Level::Neon}) {
    if (const auto* t = table_for(l)) out.push_back(t);
  }
  return out;
}

std::vector<double> random_values(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

// sum of |terms|, the scale of reassociation error
double abs_sum(const std::vector<double>& a, const std::vector<double>& b, double ca, double cb) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs((a[i] - ca) * (b[i] - cb));
  return s;
}

}  // namespace

TEST_CASE("scalar table is always available and is the reference") {
  const auto* s = table_for(Level::Scalar);
  REQUIRE(s != nullptr);
  CHECK(s->squared_distances == &scalar::squared_distances);
  CHECK(table_for(active_level()) == &active());
  MESSAGE("active kernels: " << to_string(active_level()));
}

TEST_CASE("vector squared distances are bit-exact, every length and alignment") {
  Rng rng(1);
  for (const auto* t : vector_tables()) {
    for (std::size_t n = 0; n <= 67; ++n) {
      for (std::size_t offset = 0; offset < 3; ++offset) {
        const auto xs = random_values(rng, n + offset, -2.0, 2.0);
        const auto ys = random_values(rng, n + offset, -2.0, 2.0);
        const auto zs = random_values(rng, n + offset, -2.0, 2.0);
        const double qx = rng.uniform(-1, 1), qy = rng.uniform(-1, 1), qz = rng.uniform(-1, 1);
        std::vector<double> want(n + 1, -7.0), got(n + 1, -7.0);
        scalar::squared_distances(qx, qy, qz, xs.data() + offset, ys.data() + offset, zs.data() + offset,
                                  n, want.data());
        t->squared_distances(qx, qy, qz, xs.data() + offset, ys.data() + offset, zs.data() + offset, n,
                             got.data());
        CHECK(got == want);  // includes the untouched sentinel past the end
      }
    }
  }
}

TEST_CASE("vector reductions agree with the scalar reference") {
  Rng rng(2);
  for (const auto* t : vector_tables()) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 31u, 1000u, 4099u}) {
      const auto x = random_values(rng, n, 0.0, 250.0);
      const auto y = random_values(rng, n, 0.0, 10.0);
      const double cx = 120.0, cy = 4.0;
      const auto a = scalar::moments(x.data(), y.data(), n, cx, cy);
      const auto b = t->moments(x.data(), y.data(), n, cx, cy);
      const double eps = 1e-14;
      CHECK(std::abs(a.sx - b.sx) <= eps * (abs_sum(x, std::vector<double>(n, cx + 1.0), cx, cx) + 1));
      CHECK(std::abs(a.sxx - b.sxx) <= eps * (abs_sum(x, x, cx, cx) + 1));
      CHECK(std::abs(a.sxy - b.sxy) <= eps * (abs_sum(x, y, cx, cy) + 1));
      CHECK(std::abs(a.syy - b.syy) <= eps * (abs_sum(y, y, cy, cy) + 1));

      const double sa = scalar::affine_sse(x.data(), y.data(), n, 0.04, -0.3);
      const double sb = t->affine_sse(x.data(), y.data(), n, 0.04, -0.3);
      CHECK(std::abs(sa - sb) <= 1e-14 * (sa + 1));
    }
  }
}

TEST_CASE("SKINRIG_SIMD=scalar forces the reference kernels") {
  // ctest runs this binary a second time with the variable set
  const char* forced = std::getenv("SKINRIG_SIMD");
  if (forced != nullptr && std::string(forced) == "scalar") {
    CHECK(active_level() == Level::Scalar);
    CHECK(&active() == table_for(Level::Scalar));
  } else {
    CHECK((active_level() != Level::Scalar || vector_tables().empty()));
  }
}
