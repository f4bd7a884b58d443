#include "skinrig/simd/kernels.hpp"

namespace skinrig::simd::scalar {

void squared_distances(double qx, double qy, double qz, const double* xs,
                       const double* ys, const double* zs, std::size_t n,
                       double* out) {
  for (std::size_t i = 0; i < n; ++i) {
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
  Moments m;
  for (std::size_t i = 0; i < n; ++i) {
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
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (slope * x[i] + intercept);
    acc += r * r;
  }
  return acc;
}

}  // namespace skinrig::simd::scalar
