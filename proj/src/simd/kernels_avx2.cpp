// Compiled with -mavx2 (no FMA) so the distance kernel stays bit-identical to
// the scalar reference. Only raw pointers cross this translation unit's
// boundary; no inline library code is instantiated here.
#include <immintrin.h>

#include "skinrig/simd/kernels.hpp"

namespace skinrig::simd::avx2 {

namespace {
inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}
}  // namespace

void squared_distances(double qx, double qy, double qz, const double* xs,
                       const double* ys, const double* zs, std::size_t n,
                       double* out) {
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  const __m256d vqz = _mm256_set1_pd(qz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vqz);
    const __m256d dxy = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + i, _mm256_add_pd(dxy, _mm256_mul_pd(dz, dz)));
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    const double dxx = dx * dx;
    const double dyy = dy * dy;
    const double dzz = dz * dz;
    out[i] = (dxx + dyy) + dzz;
  }
}

Moments moments(const double* x, const double* y, std::size_t n, double cx,
                double cy) {
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  __m256d sx = _mm256_setzero_pd();
  __m256d sy = _mm256_setzero_pd();
  __m256d sxx = _mm256_setzero_pd();
  __m256d sxy = _mm256_setzero_pd();
  __m256d syy = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), vcy);
    sx = _mm256_add_pd(sx, dx);
    sy = _mm256_add_pd(sy, dy);
    sxx = _mm256_add_pd(sxx, _mm256_mul_pd(dx, dx));
    sxy = _mm256_add_pd(sxy, _mm256_mul_pd(dx, dy));
    syy = _mm256_add_pd(syy, _mm256_mul_pd(dy, dy));
  }
  Moments m{hsum(sx), hsum(sy), hsum(sxx), hsum(sxy), hsum(syy)};
  for (; i < n; ++i) {
    const double dx = x[i] - cx;
    const double dy = y[i] - cy;
    m.sx += dx;
    m.sy += dy;
    m.sxx += dx * dx;
    m.sxy += dx * dy;
    m.syy += dy * dy;
  }
  return m;
}

double affine_sse(const double* x, const double* y, std::size_t n, double slope,
                  double intercept) {
  const __m256d va = _mm256_set1_pd(slope);
  const __m256d vb = _mm256_set1_pd(intercept);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d pred = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)), vb);
    const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(y + i), pred);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(r, r));
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double r = y[i] - (slope * x[i] + intercept);
    total += r * r;
  }
  return total;
}

}  // namespace skinrig::simd::avx2
