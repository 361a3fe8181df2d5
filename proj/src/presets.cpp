#include "dcnet/presets.hpp"

#include <numbers>

#include "dcnet/error.hpp"

namespace dcnet {

namespace {

Polynomial lin(double a) { return Polynomial{a, 1.0}; }
Polynomial quad(double b, double c) { return Polynomial{c, b, 1.0}; }

OuterPreset make_paper_vi() {
  OuterPreset p;
  p.name = "paper-vi";
  p.description = "three-boost DC microgrid case study: sixth-order Kv/Kr, eta = 1.2667";

  const Polynomial kv_num[] = {Polynomial{-4.615e9, 1.0}, lin(6007.0), quad(5042.0, 5.97e6), quad(753.6, 1.039e5)};
  const Polynomial kv_den[] = {lin(1.604e4), lin(578.3), quad(1061.0, 5.69e5), quad(7.354e4, 2.074e9)};
  const Polynomial kr_num[] = {lin(181.3), lin(0.001012), quad(5141.0, 6.065e6), quad(3.818e6, 2.804e11)};
  const Polynomial kr_den[] = {lin(4.395), lin(0.001013), quad(1059.0, 5.694e5), quad(9.783e4, 3.69e9)};
  p.controllers.Kv = RationalFunction::from_factors(-0.00064, kv_num, kv_den);
  p.controllers.Kr = RationalFunction::from_factors(0.00267, kr_num, kr_den);
  p.controllers.eta = 1.2667;

  p.weights.W1 = RationalFunction(0.4167 * lin(452.4), lin(1.885));
  p.weights.W2 = RationalFunction(0.4167 * lin(1056.0), lin(4.398));
  p.weights.W3 = RationalFunction(0.04);
  p.weights.W4 = RationalFunction(37.037 * lin(314.2), lin(3.142e4));

  p.inner.omega0 = 2.0 * std::numbers::pi * 120.0;
  p.inner.omega_tilde = 2.0 * std::numbers::pi * 300.0;
  p.inner.zeta1 = 0.7;
  p.inner.zeta2 = 2.2;

  p.nominal_L = 0.12e-3;
  p.nominal_C = 500e-6;
  p.nominal_dprime = 0.5;
  return p;
}

}  // namespace

const std::vector<OuterPreset>& builtin_presets() {
  static const std::vector<OuterPreset> presets{make_paper_vi()};
  return presets;
}

const OuterPreset& builtin_preset(const std::string& name) {
  for (const auto& p : builtin_presets()) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::ConfigError, "unknown preset '" + name + "'");
}

}  // namespace dcnet
