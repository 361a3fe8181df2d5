#include "dcnet/converter.hpp"

#include <algorithm>
#include <string>

#include "dcnet/error.hpp"

namespace dcnet {

namespace {
constexpr double kMinBoostVoltage = 1e-3;
}

const char* to_string(ConverterKind kind) noexcept {
  return kind == ConverterKind::Boost ? "boost" : "buck";
}

void ConverterParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ValidationError, msg); };
  if (!(L > 0.0)) fail("ConverterParams: L must be > 0");
  if (!(C > 0.0)) fail("ConverterParams: C must be > 0");
  if (!(Vg > 0.0)) fail("ConverterParams: Vg must be > 0");
  if (!(Vref > 0.0)) fail("ConverterParams: Vref must be > 0");
  if (kind == ConverterKind::Boost && !(Vref > Vg)) fail("ConverterParams: boost requires Vref > Vg");
  if (kind == ConverterKind::Buck && !(Vref < Vg)) fail("ConverterParams: buck requires Vref < Vg");
}

double ConverterParams::nominal_dprime() const noexcept {
  return kind == ConverterKind::Boost ? Vg / Vref : 1.0;
}

StateDerivative boost_rhs(const ConverterState& x, double dprime, double iload, const ConverterParams& p) {
  return {(-dprime * x.V + p.Vg) / p.L, (dprime * x.iL - iload) / p.C};
}

StateDerivative buck_rhs(const ConverterState& x, double d, double iload, const ConverterParams& p) {
  return {(-x.V + d * p.Vg) / p.L, (x.iL - iload) / p.C};
}

DutyCommand duty_from_control(double u_tilde, const ConverterState& x, const ConverterParams& p) {
  DutyCommand cmd;
  if (p.kind == ConverterKind::Boost) {
    if (x.V < kMinBoostVoltage) {
      cmd.voltage_near_zero = true;
      cmd.saturated = true;
      return cmd;
    }
    const double dp = (p.Vg - u_tilde) / x.V;
    cmd.saturated = dp < 0.0 || dp > 1.0;
    cmd.dprime = std::clamp(dp, 0.0, 1.0);
    cmd.duty = 1.0 - cmd.dprime;
    return cmd;
  }
  const double d = (u_tilde + x.V) / p.Vg;
  cmd.saturated = d < 0.0 || d > 1.0;
  cmd.duty = std::clamp(d, 0.0, 1.0);
  cmd.dprime = 1.0 - cmd.duty;
  return cmd;
}

SmallSignalBlocks small_signal_blocks(const ConverterParams& p) {
  return {RationalFunction::integrator(p.L), RationalFunction::integrator(p.C), p.nominal_dprime()};
}

}  // namespace dcnet
