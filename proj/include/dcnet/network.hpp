#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "dcnet/converter.hpp"
#include "dcnet/inner_loop.hpp"
#include "dcnet/outer_loop.hpp"

namespace dcnet {

/// Piecewise-constant share coefficients. Before the first breakpoint the
/// first entry applies.
struct ShareSchedule {
  struct Breakpoint {
    double time = 0.0;
    std::vector<double> gammas;
    bool operator==(const Breakpoint&) const = default;
  };
  std::vector<Breakpoint> breakpoints;

  /// Times strictly increasing, equal lengths, every gamma in (0, 1].
  /// Throws ValidationError; a breakpoint whose gammas do not sum to 1
  /// within 1e-9 throws ShareSumViolation.
  void validate() const;
  std::size_t converters() const noexcept {
    return breakpoints.empty() ? 0 : breakpoints.front().gammas.size();
  }
  const std::vector<double>& gammas_at(double t) const;

  bool operator==(const ShareSchedule&) const = default;
};

struct ConverterUnit {
  ConverterParams params;
  /// Inductance the unit's current controller is designed for; defaults to
  /// params.L. Setting it to anything else models a mistuned unit.
  std::optional<double> kc_design_L;

  double design_L() const noexcept { return kc_design_L.value_or(params.L); }

  bool operator==(const ConverterUnit&) const = default;
};

/// Nominal (equivalent single-converter) plant the outer loop was designed for.
struct NominalPlant {
  double L = 0.0;
  double C = 0.0;
  double dprime = 1.0;

  bool operator==(const NominalPlant&) const = default;
};

class ConverterNetwork {
 public:
  /// With strict = true every unit is validated and its inner loop must close
  /// to the nominal shaped plant (ClosureMismatch otherwise), the schedule must
  /// match the unit count and every breakpoint must sum to 1. strict = false
  /// skips the closure and share-sum checks so they can be reported instead.
  ConverterNetwork(std::vector<ConverterUnit> units, InnerLoopDesign inner, OuterControllers ctrl,
                   ShareSchedule share, NominalPlant nominal, bool strict = true);

  const std::vector<ConverterUnit>& units() const noexcept { return units_; }
  std::size_t size() const noexcept { return units_.size(); }
  const InnerLoopDesign& inner() const noexcept { return inner_; }
  const OuterControllers& controllers() const noexcept { return ctrl_; }
  const ShareSchedule& share() const noexcept { return share_; }
  const NominalPlant& nominal() const noexcept { return nominal_; }

  /// Nominal shaped inner plant.
  const RationalFunction& shaped() const noexcept { return shaped_; }
  /// Voltage plant 1/(s C_nominal).
  RationalFunction voltage_plant() const { return RationalFunction::integrator(nominal_.C); }
  /// Current controller of unit k, designed for its design_L().
  const RationalFunction& inner_controller(std::size_t k) const { return kc_.at(k); }
  /// Closed inner loop of unit k around its actual inductance.
  RationalFunction closed_inner(std::size_t k) const;

 private:
  std::vector<ConverterUnit> units_;
  InnerLoopDesign inner_;
  OuterControllers ctrl_;
  ShareSchedule share_;
  NominalPlant nominal_;
  RationalFunction shaped_;
  std::vector<RationalFunction> kc_;
};

/// Equivalent single-converter loop (nominal shaped plant, 1/(s C), D', Kv,
/// Kr, eta). Throws ShareSumViolation if the shares in force at time t do not
/// sum to 1.
ClosedLoopSet reduce_to_equivalent(const ConverterNetwork& net, double t = 0.0);

/// Explicit m-converter block diagram solved at one frequency for frozen
/// shares: unit k applies Kv/m to e1 and Kr to e2_k = g_k (iref + eta e1) - i_k,
/// its own closed inner loop turns the command into i_k, and the shared
/// capacitor integrates sum(i_k) - iload. Columns are (Vref, iref, iload).
struct NetworkResponse {
  std::array<std::complex<double>, 3> voltage{};
  std::vector<std::array<std::complex<double>, 3>> currents;
};

NetworkResponse network_response(const ConverterNetwork& net, const std::vector<double>& gammas, double omega);

/// i_k = from_iref * iref + from_e1 * e1 for unit k under the shares at time t.
struct ConverterCurrentPaths {
  RationalFunction from_iref;
  RationalFunction from_e1;
};

ConverterCurrentPaths per_converter_current(const ConverterNetwork& net, std::size_t k, double t = 0.0);

/// T1 = D' Gc Kr / (1 + D' Gc Kr) and T2 = D' Gc Kv / (m (1 + D' Gc Kr)).
struct SharingTerms {
  RationalFunction T1;
  RationalFunction T2;
};

SharingTerms sharing_terms(const ConverterNetwork& net);

/// Steady-state bound on |i_k/g_k - i_l/g_l| for a DC voltage error e1_dc:
///   (eta |T1(0)| + |1/g_k - 1/g_l| |T2(0)|) |e1_dc|.
double sharing_bound(const ConverterNetwork& net, std::size_t k, std::size_t l, double e1_dc, double t = 0.0);

}  // namespace dcnet
