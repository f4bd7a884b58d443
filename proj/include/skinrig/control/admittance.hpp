#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "skinrig/geometry/mesh.hpp"

namespace skinrig::control {

/// Which discrete recursion to run.
///  Tustin: bilinear transform of 1 / (M s^2 + B s + K); denominator
///          4M + 2BTs + KTs^2, Δx(k-2) weight 4M - 2BTs + KTs^2.
///  Printed: the same recursion with B*Ts^2 in place of B*Ts in both of
///          those coefficients, kept for comparison.
enum class AdmittanceForm { Tustin, Printed };

struct AdmittanceParams {
  double m = 0.0;
  double b = 44.721359549995796;  // 2 sqrt(K)
  double k = 500.0;
  double ts = 1.0 / 125.0;
  AdmittanceForm form = AdmittanceForm::Tustin;
};

/// Throws std::invalid_argument unless K > 0, B >= 0, M >= 0, Ts > 0.
void validate(const AdmittanceParams& p);

/// Recursion coefficients: a0 Δx(k) = Ts^2 (F(k) + 2F(k-1) + F(k-2))
///                                    - a1 Δx(k-1) - a2 Δx(k-2)
struct AdmittanceCoefficients {
  double a0, a1, a2, f;
};
AdmittanceCoefficients coefficients(const AdmittanceParams& p);

/// Largest pole magnitude of the homogeneous recursion.
double spectral_radius(const AdmittanceParams& p);

struct AdmittanceState {
  std::array<double, 2> dx{0.0, 0.0};  // Δx(k-1), Δx(k-2)
  std::array<double, 2> f{0.0, 0.0};   // F(k-1), F(k-2)
};

/// One controller tick: returns Δx(k) and shifts the histories.
double admittance_step(const AdmittanceParams& p, AdmittanceState& state, double force);

/// Runs the recursion over a force sequence from a zero state.
std::vector<double> admittance_response(const AdmittanceParams& p, const std::vector<double>& force);

/// Vector tagged with the frame it is expressed in.
struct FramedVector {
  Vec3 value = Vec3::Zero();
  std::string frame = "world";
};

/// x_des = x_ref + Σ Δx_c. Throws FrameMismatchError if any displacement
/// is expressed in a frame other than x_ref's.
FramedVector compose_multi_contact(const FramedVector& x_ref, const std::vector<FramedVector>& steps);

}  // namespace skinrig::control
