#pragma once

#include "dcnet/rational_function.hpp"

namespace dcnet {

enum class ConverterKind { Boost, Buck };

const char* to_string(ConverterKind kind) noexcept;

/// Physical parameters of one averaged DC-DC converter. SI units throughout.
struct ConverterParams {
  double L = 0.0;     ///< inductance, H
  double C = 0.0;     ///< output (DC-link) capacitance, F
  double Vg = 0.0;    ///< input source voltage, V
  double Vref = 0.0;  ///< regulated output voltage, V
  ConverterKind kind = ConverterKind::Boost;

  /// Throws ValidationError naming the violated constraint.
  void validate() const;
  /// Nominal complementary duty Vg/Vref for a boost; 1 for a buck.
  double nominal_dprime() const noexcept;

  bool operator==(const ConverterParams&) const = default;
};

struct ConverterState {
  double iL = 0.0;  ///< inductor current, A
  double V = 0.0;   ///< capacitor voltage, V
};

struct StateDerivative {
  double diL = 0.0;
  double dV = 0.0;
};

/// Averaged boost dynamics in the exact bilinear form:
///   L diL/dt = Vg - d' V,   C dV/dt = d' iL - iload.
StateDerivative boost_rhs(const ConverterState& x, double dprime, double iload, const ConverterParams& p);

/// Averaged buck dynamics:  L diL/dt = d Vg - V,   C dV/dt = iL - iload.
StateDerivative buck_rhs(const ConverterState& x, double d, double iload, const ConverterParams& p);

struct DutyCommand {
  double duty = 0.0;    ///< switch ON fraction d in [0, 1]
  double dprime = 1.0;  ///< 1 - d, computed directly for the boost map
  bool saturated = false;
  bool voltage_near_zero = false;  ///< boost only: V below 1e-3 V, d forced to 0
};

/// Maps the inner-loop control u_tilde (volts across the inductor) to a duty
/// cycle. Boost: d' = (Vg - u_tilde)/V. Buck: d = (u_tilde + V)/Vg.
/// Result clamped to [0, 1].
DutyCommand duty_from_control(double u_tilde, const ConverterState& x, const ConverterParams& p);

struct SmallSignalBlocks {
  RationalFunction current_plant;  ///< 1/(sL)
  RationalFunction voltage_plant;  ///< Gv = 1/(sC)
  double dprime = 1.0;
};

SmallSignalBlocks small_signal_blocks(const ConverterParams& p);

}  // namespace dcnet
