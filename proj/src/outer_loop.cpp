#include "dcnet/outer_loop.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "dcnet/error.hpp"

namespace dcnet {

using cd = std::complex<double>;

void OuterControllers::validate() const {
  if (!Kv.is_proper()) throw Error(ErrorCode::ValidationError, "OuterControllers: Kv must be proper");
  if (!Kr.is_proper()) throw Error(ErrorCode::ValidationError, "OuterControllers: Kr must be proper");
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorCode::ValidationError, "OuterControllers: eta must be finite and >= 0");
  }
}

void WeightSet::validate() const {
  const RationalFunction* w[] = {&W1, &W2, &W3, &W4};
  for (int k = 0; k < 4; ++k) {
    const std::string name = "WeightSet: W" + std::to_string(k + 1);
    if (!w[k]->is_proper()) throw Error(ErrorCode::ValidationError, name + " must be proper");
    if (!is_stable(*w[k])) throw Error(ErrorCode::ValidationError, name + " must be stable");
  }
}

namespace {

// Numerator/denominator pieces of every block in the loop. All closed-loop
// maps share the denominator
//   Dc Dv b d + D' Nc c Dv b + D' Nc Nv (a d + eta c b),
// which is Delta cleared of the block denominators.
struct LoopPieces {
  Polynomial nc, dc, nv, dv, a, b, c, d;
  double dprime;
  double eta;
};

LoopPieces pieces(const RationalFunction& gc, const RationalFunction& gv, double dprime,
                  const OuterControllers& ctrl) {
  return {gc.num(), gc.den(), gv.num(), gv.den(), ctrl.Kv.num(), ctrl.Kv.den(),
          ctrl.Kr.num(), ctrl.Kr.den(), dprime, ctrl.eta};
}

Polynomial characteristic_of(const LoopPieces& p) {
  const Polynomial voltage_gain = p.a * p.d + p.eta * (p.c * p.b);
  return p.dc * p.dv * p.b * p.d + p.dprime * (p.nc * p.c * p.dv * p.b) +
         p.dprime * (p.nc * p.nv * voltage_gain);
}

void check_inputs(const RationalFunction& gc, const RationalFunction& gv, double dprime,
                  const OuterControllers& ctrl) {
  ctrl.validate();
  if (!(dprime > 0.0 && dprime <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "closed loop: dprime must be in (0, 1]");
  }
  if (!gc.is_proper() || !gv.is_proper()) {
    throw Error(ErrorCode::InvalidArgument, "closed loop: plant blocks must be proper");
  }
}

}  // namespace

Polynomial closed_loop_characteristic(const RationalFunction& gc, const RationalFunction& gv, double dprime,
                                      const OuterControllers& ctrl) {
  check_inputs(gc, gv, dprime, ctrl);
  return characteristic_of(pieces(gc, gv, dprime, ctrl));
}

ClosedLoopSet build_closed_loop(const RationalFunction& gc, const RationalFunction& gv, double dprime,
                                const OuterControllers& ctrl) {
  check_inputs(gc, gv, dprime, ctrl);
  const LoopPieces p = pieces(gc, gv, dprime, ctrl);
  const Polynomial delta = characteristic_of(p);
  if (!is_stable_polynomial(delta)) {
    throw Error(ErrorCode::UnstableLoop, "closed outer loop has poles outside the open left half-plane");
  }
  const Polynomial voltage_gain = p.a * p.d + p.eta * (p.c * p.b);
  ClosedLoopSet out;
  out.T_VrefV = RationalFunction(dprime * (p.nc * p.nv * voltage_gain), delta).reduced();
  out.T_irefV = RationalFunction(dprime * (p.nc * p.nv * p.c * p.b), delta).reduced();
  out.GvS = RationalFunction(p.nv * p.dc * p.b * p.d, delta).reduced();
  out.S = RationalFunction(p.dc * p.dv * p.b * p.d, delta).reduced();
  out.characteristic = delta;
  return out;
}

GeneralizedPlant build_generalized_plant(const RationalFunction& gc, const RationalFunction& gv, double dprime,
                                         double eta, const WeightSet& weights) {
  weights.validate();
  GeneralizedPlant P;
  P.gc = gc;
  P.gv = gv;
  P.dprime = dprime;
  P.eta = eta;
  P.weights = weights;

  const RationalFunction& W1 = weights.W1;
  const RationalFunction& W2 = weights.W2;
  const RationalFunction& W3 = weights.W3;
  const RationalFunction& W4 = weights.W4;
  const RationalFunction gvgc = gv * gc;
  const RationalFunction droop_path = (RationalFunction(1.0) + eta * gv) * gc;

  auto& M = P.matrix;
  // z1: weighted voltage error
  M(0, 0) = W1;
  M(0, 1) = 0.0;
  M(0, 2) = W1 * gv;
  M(0, 3) = -dprime * (W1 * gvgc);
  // z2: weighted current-reference error
  M(1, 0) = eta * W2;
  M(1, 1) = W2;
  M(1, 2) = eta * (W2 * gv);
  M(1, 3) = -dprime * (W2 * droop_path);
  // z3: weighted control effort
  M(2, 0) = 0.0;
  M(2, 1) = 0.0;
  M(2, 2) = 0.0;
  M(2, 3) = W3;
  // z4: weighted output voltage
  M(3, 0) = 0.0;
  M(3, 1) = 0.0;
  M(3, 2) = -(W4 * gv);
  M(3, 3) = dprime * (W4 * gvgc);
  // e1, e2: measurements fed to the outer controllers
  M(4, 0) = 1.0;
  M(4, 1) = 0.0;
  M(4, 2) = gv;
  M(4, 3) = -dprime * gvgc;
  M(5, 0) = eta;
  M(5, 1) = 1.0;
  M(5, 2) = eta * gv;
  M(5, 3) = -dprime * droop_path;
  return P;
}

Eigen::MatrixXcd closed_weighted_response(const GeneralizedPlant& plant, const OuterControllers& ctrl,
                                          double omega) {
  if (plant.eta != ctrl.eta) {
    throw Error(ErrorCode::InvalidArgument, "evaluate_controller: controller eta differs from the plant's");
  }
  // Pointwise closure with every block denominator cleared, so the map stays
  // finite at DC where Gv has its integrator pole.
  const cd s(0.0, omega);
  const cd nc = plant.gc.num()(s), dc = plant.gc.den()(s);
  const cd nv = plant.gv.num()(s), dv = plant.gv.den()(s);
  const cd a = ctrl.Kv.num()(s), b = ctrl.Kv.den()(s);
  const cd c = ctrl.Kr.num()(s), d = ctrl.Kr.den()(s);
  const double Dp = plant.dprime;
  const double eta = plant.eta;

  const cd vg = a * d + eta * c * b;
  const cd delta = dc * dv * b * d + Dp * nc * c * dv * b + Dp * nc * nv * vg;

  // current i = D' Gc u and voltage V per exogenous input (Vref, iref, iload)
  const cd i_in[3] = {Dp * nc * dv * vg / delta, Dp * nc * dv * b * c / delta, Dp * nc * nv * vg / delta};
  const cd v_in[3] = {Dp * nc * nv * vg / delta, Dp * nc * nv * c * b / delta,
                      -nv * b * (dc * d + Dp * nc * c) / delta};
  const cd u_in[3] = {dc * dv * vg / delta, dc * dv * b * c / delta, dc * nv * vg / delta};

  const cd w1 = plant.weights.W1(s), w2 = plant.weights.W2(s);
  const cd w3 = plant.weights.W3(s), w4 = plant.weights.W4(s);
  Eigen::MatrixXcd T(4, 3);
  for (int k = 0; k < 3; ++k) {
    const cd vref_k = k == 0 ? 1.0 : 0.0;
    const cd iref_k = k == 1 ? 1.0 : 0.0;
    const cd e1 = vref_k - v_in[k];
    const cd e2 = iref_k + eta * e1 - i_in[k];
    T(0, k) = w1 * e1;
    T(1, k) = w2 * e2;
    T(2, k) = w3 * u_in[k];
    T(3, k) = w4 * v_in[k];
  }
  return T;
}

ControllerEvaluation evaluate_controller(const GeneralizedPlant& plant, const OuterControllers& ctrl,
                                         const GridOptions& grid) {
  ctrl.validate();
  if (plant.eta != ctrl.eta) {
    throw Error(ErrorCode::InvalidArgument, "evaluate_controller: controller eta differs from the plant's");
  }
  const LoopPieces p = pieces(plant.gc, plant.gv, plant.dprime, ctrl);
  ControllerEvaluation out;
  const auto& w = plant.weights;
  out.stable = is_stable_polynomial(characteristic_of(p)) && is_stable(w.W1) && is_stable(w.W2) &&
               is_stable(w.W3) && is_stable(w.W4);

  GridOptions opts = grid;
  // An unstable loop may have its pole at the origin; skip the DC sample then.
  if (!out.stable) opts.include_dc = false;
  const PeakGain peak =
      peak_gain_grid([&](double omega) { return closed_weighted_response(plant, ctrl, omega); }, opts);
  out.closed_weighted_norm = peak.norm;
  out.peak_omega = peak.omega;
  return out;
}

double tracking_error_bounds(const OuterControllers& ctrl, double dprime, double iref0, double iload0,
                             bool centralized) {
  const DcGain kv = dc_gain(ctrl.Kv);
  const DcGain kr = dc_gain(ctrl.Kr);
  if (kv.infinite || kr.infinite) return 0.0;
  const double voltage_gain = std::abs(kv.value + ctrl.eta * kr.value);
  if (voltage_gain == 0.0) return std::numeric_limits<double>::infinity();
  const double scale = dprime * voltage_gain;
  if (centralized) return std::abs(iref0) / scale;
  return std::abs(kr.value) * std::abs(iref0) / scale + (dprime * std::abs(kr.value) + 1.0) * std::abs(iload0) / scale;
}

}  // namespace dcnet
