#include "dcnet/inner_loop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dcnet/error.hpp"

namespace dcnet {

void InnerLoopDesign::validate() const {
  if (!(omega0 > 0.0)) throw Error(ErrorCode::ValidationError, "InnerLoopDesign: omega0 must be > 0");
  if (!(omega_tilde > omega0)) {
    throw Error(ErrorCode::ValidationError, "InnerLoopDesign: omega_tilde must exceed omega0");
  }
  if (!(zeta1 > 0.0)) throw Error(ErrorCode::ValidationError, "InnerLoopDesign: zeta1 must be > 0");
  if (!(zeta2 > zeta1)) throw Error(ErrorCode::ValidationError, "InnerLoopDesign: zeta2 must exceed zeta1");
}

namespace {

// The formulas themselves stay well defined at zeta1 == zeta2, where the notch
// disappears, so only the design record insists on a strict notch.
void check_formula_domain(const InnerLoopDesign& g) {
  if (g.zeta1 == g.zeta2 && g.zeta1 > 0.0) {
    InnerLoopDesign strict = g;
    strict.zeta2 = g.zeta1 * 2.0;
    strict.validate();
    return;
  }
  g.validate();
}

}  // namespace

RationalFunction shaped_plant(const InnerLoopDesign& g) {
  check_formula_domain(g);
  const double w0 = g.omega0;
  const double wt = g.omega_tilde;
  const Polynomial notch_num{w0 * w0, 2.0 * g.zeta1 * w0, 1.0};
  const Polynomial notch_den{w0 * w0, 2.0 * g.zeta2 * w0, 1.0};
  return {wt * notch_num, Polynomial{wt, 1.0} * notch_den};
}

RationalFunction design_inner_controller(double L, const InnerLoopDesign& g) {
  if (!(L > 0.0)) throw Error(ErrorCode::ValidationError, "inner controller: L must be > 0");
  check_formula_domain(g);
  const double w0 = g.omega0;
  const double wt = g.omega_tilde;
  const Polynomial num{w0 * w0, 2.0 * g.zeta1 * w0, 1.0};
  const Polynomial den{w0 * w0 + 2.0 * (g.zeta2 - g.zeta1) * w0 * wt, 2.0 * g.zeta2 * w0, 1.0};
  return {L * wt * num, den};
}

RationalFunction closed_inner_loop(const RationalFunction& kc, double L_plant) {
  return tf_feedback(kc * RationalFunction::integrator(L_plant), RationalFunction(1.0));
}

double inner_closure_error(const RationalFunction& kc, double L_plant, const InnerLoopDesign& design) {
  const RationalFunction closed = closed_inner_loop(kc, L_plant);
  const RationalFunction target = shaped_plant(design);
  double worst = 0.0;
  for (double w : logspace(1e-1, 1e6, 200)) {
    const auto ref = target.at_frequency(w);
    worst = std::max(worst, std::abs(closed.at_frequency(w) - ref) / std::abs(ref));
  }
  return worst;
}

double verify_inner_closure(double L, const InnerLoopDesign& design) {
  const double err = inner_closure_error(design_inner_controller(L, design), L, design);
  if (err > 1e-6) {
    std::ostringstream os;
    os << "inner loop does not close to the shaped plant (max rel. error " << err << ")";
    throw Error(ErrorCode::ClosureMismatch, os.str());
  }
  return err;
}

}  // namespace dcnet
