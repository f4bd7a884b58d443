#pragma once

// Data-parallel inner loops used by calibration. Every kernel has a scalar
// reference implementation; vector variants are selected once at runtime and
// must agree with the reference (bit-exact for the distance kernel, within
// reassociation error for the reductions).

#include <cstddef>
#include <string_view>

namespace skinrig::simd {

enum class Level { Scalar, Avx2, Neon };

std::string_view to_string(Level level);

/// Centered second-order moments of paired samples (x, y) around (cx, cy).
struct Moments {
  double sx = 0.0;   ///< sum (x - cx)
  double sy = 0.0;   ///< sum (y - cy)
  double sxx = 0.0;  ///< sum (x - cx)^2
  double sxy = 0.0;  ///< sum (x - cx)(y - cy)
  double syy = 0.0;  ///< sum (y - cy)^2
};

struct KernelTable {
  /// out[i] = (xs[i]-qx)^2 + (ys[i]-qy)^2 + (zs[i]-qz)^2
  void (*squared_distances)(double qx, double qy, double qz, const double* xs,
                            const double* ys, const double* zs, std::size_t n,
                            double* out);
  Moments (*moments)(const double* x, const double* y, std::size_t n, double cx,
                     double cy);
  /// sum (y[i] - (slope * x[i] + intercept))^2
  double (*affine_sse)(const double* x, const double* y, std::size_t n,
                       double slope, double intercept);
};

/// Kernel table for a specific level. Returns nullptr when the level was not
/// compiled in or the CPU cannot run it.
const KernelTable* table_for(Level level);

/// Best level supported by this CPU. Setting SKINRIG_SIMD=scalar in the
/// environment forces the scalar reference.
Level active_level();

const KernelTable& active();

namespace scalar {
void squared_distances(double qx, double qy, double qz, const double* xs,
                       const double* ys, const double* zs, std::size_t n,
                       double* out);
Moments moments(const double* x, const double* y, std::size_t n, double cx,
                double cy);
double affine_sse(const double* x, const double* y, std::size_t n, double slope,
                  double intercept);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define SKINRIG_HAVE_AVX2_KERNELS 1
namespace avx2 {
void squared_distances(double qx, double qy, double qz, const double* xs,
                       const double* ys, const double* zs, std::size_t n,
                       double* out);
Moments moments(const double* x, const double* y, std::size_t n, double cx,
                double cy);
double affine_sse(const double* x, const double* y, std::size_t n, double slope,
                  double intercept);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define SKINRIG_HAVE_NEON_KERNELS 1
namespace neon {
void squared_distances(double qx, double qy, double qz, const double* xs,
                       const double* ys, const double* zs, std::size_t n,
                       double* out);
Moments moments(const double* x, const double* y, std::size_t n, double cx,
                double cy);
double affine_sse(const double* x, const double* y, std::size_t n, double slope,
                  double intercept);
}  // namespace neon
#endif

}  // namespace skinrig::simd
