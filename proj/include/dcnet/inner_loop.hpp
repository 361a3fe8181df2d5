#pragma once

#include <numbers>

#include "dcnet/rational_function.hpp"

namespace dcnet {

/// Shape of the closed inner current loop: a first-order low-pass at
/// omega_tilde times a notch-like quadratic ratio centred at omega0 whose depth
/// is zeta1/zeta2.
struct InnerLoopDesign {
  double omega0 = 2.0 * std::numbers::pi * 120.0;  ///< ripple frequency, rad/s
  double omega_tilde = 2.0 * std::numbers::pi * 300.0;
  double zeta1 = 0.7;
  double zeta2 = 2.2;

  /// omega_tilde > omega0 > 0 and zeta2 > zeta1 > 0; throws ValidationError.
  void validate() const;

  bool operator==(const InnerLoopDesign&) const = default;
};

/// (w~/(s+w~)) * (s^2 + 2 z1 w0 s + w0^2) / (s^2 + 2 z2 w0 s + w0^2).
/// Also accepts the notch-free limit zeta1 == zeta2.
RationalFunction shaped_plant(const InnerLoopDesign& design);

/// The second-order controller that closes 1/(sL) into shaped_plant(design):
///   L w~ (s^2 + 2 z1 w0 s + w0^2) / (s^2 + 2 z2 w0 s + w0^2 + 2 (z2 - z1) w0 w~).
RationalFunction design_inner_controller(double L, const InnerLoopDesign& design);

/// Max relative deviation, over 200 log-spaced points in [1e-1, 1e6] rad/s,
/// between the loop kc/(s L_plant) closed with unity feedback and
/// shaped_plant(design). Does not throw on mismatch.
double inner_closure_error(const RationalFunction& kc, double L_plant, const InnerLoopDesign& design);

/// inner_closure_error with Kc designed for L itself. Throws ClosureMismatch
/// when the error exceeds 1e-6.
double verify_inner_closure(double L, const InnerLoopDesign& design);

/// The closed inner loop kc/(sL) / (1 + kc/(sL)) as a transfer function.
RationalFunction closed_inner_loop(const RationalFunction& kc, double L_plant);

}  // namespace dcnet
