#include "skinrig/control/admittance.hpp"

#include <cmath>
#include <stdexcept>

#include "skinrig/errors.hpp"

namespace skinrig::control {

void validate(const AdmittanceParams& p) {
  if (!(p.k > 0.0)) throw std::invalid_argument("admittance K must be positive");
  if (!(p.b >= 0.0)) throw std::invalid_argument("admittance B must be non-negative");
  if (!(p.m >= 0.0)) throw std::invalid_argument("admittance M must be non-negative");
  if (!(p.ts > 0.0)) throw std::invalid_argument("sample time must be positive");
}

AdmittanceCoefficients coefficients(const AdmittanceParams& p) {
  const double t = p.ts;
  const double t2 = t * t;
  const double damp = p.form == AdmittanceForm::Tustin ? 2.0 * p.b * t : 2.0 * p.b * t2;
  return {4.0 * p.m + damp + p.k * t2, 2.0 * p.k * t2 - 8.0 * p.m, 4.0 * p.m - damp + p.k * t2, t2};
}

double spectral_radius(const AdmittanceParams& p) {
  const auto c = coefficients(p);
  // roots of a0 z^2 + a1 z + a2
  const std::complex<double> disc = std::sqrt(std::complex<double>(c.a1 * c.a1 - 4.0 * c.a0 * c.a2));
  const std::complex<double> z1 = (-c.a1 + disc) / (2.0 * c.a0);
  const std::complex<double> z2 = (-c.a1 - disc) / (2.0 * c.a0);
  return std::max(std::abs(z1), std::abs(z2));
}

double admittance_step(const AdmittanceParams& p, AdmittanceState& s, double force) {
  const auto c = coefficients(p);
  const double dx =
      (c.f * (force + 2.0 * s.f[0] + s.f[1]) - c.a1 * s.dx[0] - c.a2 * s.dx[1]) / c.a0;
  s.dx = {dx, s.dx[0]};
  s.f = {force, s.f[0]};
  return dx;
}

std::vector<double> admittance_response(const AdmittanceParams& p, const std::vector<double>& force) {
  validate(p);
  AdmittanceState s;
  std::vector<double> out;
  out.reserve(force.size());
  for (double f : force) out.push_back(admittance_step(p, s, f));
  return out;
}

FramedVector compose_multi_contact(const FramedVector& x_ref, const std::vector<FramedVector>& steps) {
  FramedVector out = x_ref;
  for (const auto& s : steps) {
    if (s.frame != x_ref.frame) {
      throw FrameMismatchError("displacement in frame '" + s.frame + "' added to reference in '" +
                               x_ref.frame + "'");
    }
    out.value += s.value;
  }
  return out;
}

}  // namespace skinrig::control
