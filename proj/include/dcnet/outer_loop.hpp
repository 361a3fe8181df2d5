#pragma once

#include "dcnet/hinf.hpp"
#include "dcnet/rational_function.hpp"

namespace dcnet {

/// Voltage controller Kv, current-reference controller Kr and the droop
/// coefficient eta (A/V) injecting the voltage error into the current loop.
struct OuterControllers {
  RationalFunction Kv;
  RationalFunction Kr;
  double eta = 0.0;

  /// Kv, Kr proper and eta >= 0; throws ValidationError.
  void validate() const;

  bool operator==(const OuterControllers&) const = default;
};

struct WeightSet {
  RationalFunction W1;
  RationalFunction W2;
  RationalFunction W3;
  RationalFunction W4;

  /// Each weight stable and proper; throws ValidationError.
  void validate() const;

  bool operator==(const WeightSet&) const = default;
};

/// Closed single-converter loop. With
///   Delta = 1 + D' Gc Kr + D' Gc Gv (Kv + eta Kr)
/// the DC-link voltage is
///   V = T_VrefV Vref + T_irefV (iref - iload) - GvS iload,
/// T_VrefV = D' Gc Gv (Kv + eta Kr) / Delta, T_irefV = D' Gc Gv Kr / Delta,
/// GvS = Gv / Delta and S = 1 / Delta.
struct ClosedLoopSet {
  RationalFunction T_VrefV;
  RationalFunction T_irefV;
  RationalFunction GvS;
  RationalFunction S;
  Polynomial characteristic;  ///< numerator of Delta over its common denominator
};

/// Forms the closed loop from the open-loop blocks. Throws UnstableLoop if
/// any closed-loop pole fails the stability test.
ClosedLoopSet build_closed_loop(const RationalFunction& gc, const RationalFunction& gv, double dprime,
                                const OuterControllers& ctrl);

/// Characteristic polynomial of the loop without the stability check.
Polynomial closed_loop_characteristic(const RationalFunction& gc, const RationalFunction& gv, double dprime,
                                      const OuterControllers& ctrl);

/// Weighted generalized plant from w = (Vref, iref, iload, u_hat) to
/// z = (z1, z2, z3, z4, e1, e2), together with the blocks it was built from.
struct GeneralizedPlant {
  TransferMatrix matrix{6, 4};
  RationalFunction gc;
  RationalFunction gv;
  double dprime = 1.0;
  double eta = 0.0;
  WeightSet weights;
};

GeneralizedPlant build_generalized_plant(const RationalFunction& gc, const RationalFunction& gv, double dprime,
                                         double eta, const WeightSet& weights);

struct ControllerEvaluation {
  double closed_weighted_norm = 0.0;  ///< peak max singular value w -> (z1..z4)
  double peak_omega = 0.0;
  bool stable = false;
};

/// Closes u_hat = Kv e1 + Kr e2 around the plant (lower LFT), evaluated
/// pointwise in frequency, and reports the grid+refine H-infinity norm from
/// (Vref, iref, iload) to (z1..z4). The norm is reported even when the loop
/// is unstable; callers must check `stable`.
ControllerEvaluation evaluate_controller(const GeneralizedPlant& plant, const OuterControllers& ctrl,
                                         const GridOptions& grid = {});

/// Closed-loop w -> z response at one frequency (4x3).
Eigen::MatrixXcd closed_weighted_response(const GeneralizedPlant& plant, const OuterControllers& ctrl,
                                          double omega);

/// Steady-state bound on |e1(j0)|. Centralized (iref = iload):
///   |iref0| / (D' |Kv(0) + eta Kr(0)|).
/// Decentralized:
///   (|Kr(0)| |iref0| + (D' |Kr(0)| + 1) |iload0|) / (D' |Kv(0) + eta Kr(0)|).
/// Returns 0 when either controller has an infinite DC gain.
double tracking_error_bounds(const OuterControllers& ctrl, double dprime, double iref0, double iload0,
                             bool centralized);

}  // namespace dcnet
