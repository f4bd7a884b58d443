#include "skinrig/calib/force_model.hpp"

#include <cmath>

#include "skinrig/errors.hpp"
#include "skinrig/simd/kernels.hpp"

namespace skinrig::calib {

AffineFit fit_affine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw DegenerateFitError("need at least two samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  const auto& k = simd::active();
  const simd::Moments m = k.moments(x.data(), y.data(), n, mx, my);
  // the centered sums are ~0; fold them back in to absorb rounding in the means
  const double nn = static_cast<double>(n);
  const double sxx = m.sxx - m.sx * m.sx / nn;
  const double sxy = m.sxy - m.sx * m.sy / nn;
  const double syy = m.syy - m.sy * m.sy / nn;
  if (!(sxx > 0.0)) throw DegenerateFitError("all readings are equal");

  AffineFit f;
  f.n = n;
  f.slope = sxy / sxx;
  const double cx = mx + m.sx / nn;
  const double cy = my + m.sy / nn;
  f.intercept = cy - f.slope * cx;
  f.sse = k.affine_sse(x.data(), y.data(), n, f.slope, f.intercept);
  f.rmse = std::sqrt(f.sse / nn);
  f.r2 = syy > 0.0 ? 1.0 - f.sse / syy : 1.0;
  if (n > 2) {
    const double s2 = f.sse / (nn - 2.0);
    f.se_slope = std::sqrt(s2 / sxx);
    f.se_intercept = std::sqrt(s2 * (1.0 / nn + cx * cx / sxx));
  }
  return f;
}

int argmax_cell(const sim::CalibrationDataset& ds, std::size_t frame) {
  const double* r = ds.row(frame);
  int best = 0;
  for (int c = 1; c < ds.cell_count; ++c) {
    if (r[c] > r[best]) best = c;
  }
  return best;
}

std::vector<CellForceModel> fit_force_models(const sim::CalibrationDataset& ds,
                                             const std::vector<std::size_t>& frames) {
  const auto cells = static_cast<std::size_t>(ds.cell_count);
  std::vector<std::vector<double>> xs(cells), ys(cells);
  for (auto f : frames) {
    const int c = argmax_cell(ds, f);
    xs[c].push_back(ds.reading(f, c));
    ys[c].push_back(ds.force[f]);
  }
  std::vector<CellForceModel> out(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    auto& m = out[c];
    m.cell_id = static_cast<int>(c);
    m.samples = xs[c].size();
    try {
      const AffineFit fit = fit_affine(xs[c], ys[c]);
      m.slope = fit.slope;
      m.intercept = fit.intercept;
      m.r2 = fit.r2;
      m.rmse_train = fit.rmse;
      m.fitted = true;
      m.degenerate = !(fit.slope > 0.0);
    } catch (const DegenerateFitError&) {
      m.fitted = false;
      m.degenerate = true;
    }
  }
  return out;
}

}  // namespace skinrig::calib
