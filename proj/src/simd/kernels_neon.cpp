#include <arm_neon.h>

#include "skinrig/simd/kernels.hpp"

namespace skinrig::simd::neon {

void squared_distances(double qx, double qy, double qz, const double* xs,
                       const double* ys, const double* zs, std::size_t n,
                       double* out) {
  const float64x2_t vqx = vdupq_n_f64(qx);
  const float64x2_t vqy = vdupq_n_f64(qy);
  const float64x2_t vqz = vdupq_n_f64(qz);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(xs + i), vqx);
    const float64x2_t dy = vsubq_f64(vld1q_f64(ys + i), vqy);
    const float64x2_t dz = vsubq_f64(vld1q_f64(zs + i), vqz);
    // separate mul/add (no vfmaq) to match the scalar rounding exactly
    const float64x2_t dxy = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    vst1q_f64(out + i, vaddq_f64(dxy, vmulq_f64(dz, dz)));
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
  const float64x2_t vcx = vdupq_n_f64(cx);
  const float64x2_t vcy = vdupq_n_f64(cy);
  float64x2_t sx = vdupq_n_f64(0.0), sy = sx, sxx = sx, sxy = sx, syy = sx;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(x + i), vcx);
    const float64x2_t dy = vsubq_f64(vld1q_f64(y + i), vcy);
    sx = vaddq_f64(sx, dx);
    sy = vaddq_f64(sy, dy);
    sxx = vaddq_f64(sxx, vmulq_f64(dx, dx));
    sxy = vaddq_f64(sxy, vmulq_f64(dx, dy));
    syy = vaddq_f64(syy, vmulq_f64(dy, dy));
  }
  Moments m{vaddvq_f64(sx), vaddvq_f64(sy), vaddvq_f64(sxx), vaddvq_f64(sxy),
            vaddvq_f64(syy)};
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
  const float64x2_t va = vdupq_n_f64(slope);
  const float64x2_t vb = vdupq_n_f64(intercept);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t pred = vaddq_f64(vmulq_f64(va, vld1q_f64(x + i)), vb);
    const float64x2_t r = vsubq_f64(vld1q_f64(y + i), pred);
    acc = vaddq_f64(acc, vmulq_f64(r, r));
  }
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double r = y[i] - (slope * x[i] + intercept);
    total += r * r;
  }
  return total;
}

}  // namespace skinrig::simd::neon
