#include "dcnet/network.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dcnet/error.hpp"

namespace dcnet {

using cd = std::complex<double>;

void ShareSchedule::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ValidationError, "ShareSchedule: " + msg); };
  if (breakpoints.empty()) fail("at least one breakpoint is required");
  const std::size_t m = breakpoints.front().gammas.size();
  if (m == 0) fail("gammas must not be empty");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const auto& bp = breakpoints[i];
    if (!std::isfinite(bp.time)) fail("breakpoint times must be finite");
    if (i > 0 && !(bp.time > breakpoints[i - 1].time)) fail("breakpoint times must be strictly increasing");
    if (bp.gammas.size() != m) fail("every breakpoint needs the same number of gammas");
    double sum = 0.0;
    for (double g : bp.gammas) {
      if (!(g > 0.0 && g <= 1.0)) fail("each gamma must lie in (0, 1]");
      sum += g;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "ShareSchedule: gammas at t=" << bp.time << " sum to " << sum << ", expected 1";
      throw Error(ErrorCode::ShareSumViolation, os.str());
    }
  }
}

const std::vector<double>& ShareSchedule::gammas_at(double t) const {
  if (breakpoints.empty()) throw Error(ErrorCode::InvalidArgument, "ShareSchedule: empty schedule");
  std::size_t idx = 0;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i].time <= t) idx = i;
  }
  return breakpoints[idx].gammas;
}

ConverterNetwork::ConverterNetwork(std::vector<ConverterUnit> units, InnerLoopDesign inner, OuterControllers ctrl,
                                   ShareSchedule share, NominalPlant nominal, bool strict)
    : units_(std::move(units)),
      inner_(inner),
      ctrl_(std::move(ctrl)),
      share_(std::move(share)),
      nominal_(nominal) {
  if (units_.empty()) throw Error(ErrorCode::ValidationError, "ConverterNetwork: at least one converter is required");
  inner_.validate();
  ctrl_.validate();
  if (!(nominal_.L > 0.0) || !(nominal_.C > 0.0)) {
    throw Error(ErrorCode::ValidationError, "ConverterNetwork: nominal L and C must be > 0");
  }
  if (!(nominal_.dprime > 0.0 && nominal_.dprime <= 1.0)) {
    throw Error(ErrorCode::ValidationError, "ConverterNetwork: nominal dprime must be in (0, 1]");
  }
  if (share_.breakpoints.empty()) throw Error(ErrorCode::ValidationError, "ShareSchedule: at least one breakpoint is required");
  if (share_.converters() != units_.size()) {
    throw Error(ErrorCode::ValidationError, "ConverterNetwork: share schedule length differs from converter count");
  }
  shaped_ = shaped_plant(inner_);
  kc_.reserve(units_.size());
  for (const auto& u : units_) {
    if (strict) u.params.validate();
    kc_.push_back(design_inner_controller(u.design_L(), inner_));
  }
  if (!strict) return;
  share_.validate();
  for (std::size_t k = 0; k < units_.size(); ++k) {
    const double err = inner_closure_error(kc_[k], units_[k].params.L, inner_);
    if (err > 1e-6) {
      std::ostringstream os;
      os << "ConverterNetwork: inner loop of converter " << k + 1 << " misses the shaped plant (rel. error " << err
         << ")";
      throw Error(ErrorCode::ClosureMismatch, os.str());
    }
  }
}

RationalFunction ConverterNetwork::closed_inner(std::size_t k) const {
  return closed_inner_loop(kc_.at(k), units_.at(k).params.L);
}

namespace {

void require_unit_sum(const std::vector<double>& gammas, double t) {
  double sum = 0.0;
  for (double g : gammas) sum += g;
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "shares at t=" << t << " sum to " << sum << ", expected 1";
    throw Error(ErrorCode::ShareSumViolation, os.str());
  }
}

// Cleared denominator of 1 + D' Gc Kr.
Polynomial current_loop_den(const ConverterNetwork& net) {
  const auto& gc = net.shaped();
  const auto& kr = net.controllers().Kr;
  return gc.den() * kr.den() + net.nominal().dprime * (gc.num() * kr.num());
}

}  // namespace

ClosedLoopSet reduce_to_equivalent(const ConverterNetwork& net, double t) {
  require_unit_sum(net.share().gammas_at(t), t);
  return build_closed_loop(net.shaped(), net.voltage_plant(), net.nominal().dprime, net.controllers());
}

NetworkResponse network_response(const ConverterNetwork& net, const std::vector<double>& gammas, double omega) {
  const std::size_t m = net.size();
  if (gammas.size() != m) throw Error(ErrorCode::InvalidArgument, "network_response: one gamma per converter");
  const cd s(0.0, omega);
  const auto& ctrl = net.controllers();
  const cd kv = ctrl.Kv(s);
  const cd kr = ctrl.Kr(s);
  const double eta = ctrl.eta;
  const double Dp = net.nominal().dprime;
  const RationalFunction gv = net.voltage_plant();
  const cd admittance = gv.den()(s) / gv.num()(s);

  // i_k = alpha_k e1 + beta_k iref, from the unit's current loop closed locally.
  std::vector<cd> alpha(m), beta(m);
  cd alpha_sum = 0.0, beta_sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const cd g = Dp * net.closed_inner(k)(s);
    const cd local = 1.0 + g * kr;
    alpha[k] = g * (kv / static_cast<double>(m) + eta * gammas[k] * kr) / local;
    beta[k] = g * gammas[k] * kr / local;
    alpha_sum += alpha[k];
    beta_sum += beta[k];
  }
  // s C V = sum(i_k) - iload with e1 = Vref - V
  const cd den = admittance + alpha_sum;
  NetworkResponse out;
  out.voltage = {alpha_sum / den, beta_sum / den, -1.0 / den};
  out.currents.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    for (int col = 0; col < 3; ++col) {
      const cd e1 = (col == 0 ? 1.0 : 0.0) - out.voltage[col];
      out.currents[k][col] = alpha[k] * e1 + (col == 1 ? beta[k] : 0.0);
    }
  }
  return out;
}

ConverterCurrentPaths per_converter_current(const ConverterNetwork& net, std::size_t k, double t) {
  const auto& gammas = net.share().gammas_at(t);
  if (k >= gammas.size()) throw Error(ErrorCode::InvalidArgument, "per_converter_current: index out of range");
  const double gk = gammas[k];
  const double m = static_cast<double>(net.size());
  const double Dp = net.nominal().dprime;
  const auto& gc = net.shaped();
  const auto& kv = net.controllers().Kv;
  const auto& kr = net.controllers().Kr;
  const double eta = net.controllers().eta;
  const Polynomial loop = current_loop_den(net);

  ConverterCurrentPaths out;
  out.from_iref = RationalFunction(Dp * gk * (gc.num() * kr.num()), loop).reduced();
  const Polynomial e1_num = (1.0 / m) * (kv.num() * kr.den()) + (eta * gk) * (kr.num() * kv.den());
  out.from_e1 = RationalFunction(Dp * (gc.num() * e1_num), kv.den() * loop).reduced();
  return out;
}

SharingTerms sharing_terms(const ConverterNetwork& net) {
  const double m = static_cast<double>(net.size());
  const double Dp = net.nominal().dprime;
  const auto& gc = net.shaped();
  const auto& kv = net.controllers().Kv;
  const auto& kr = net.controllers().Kr;
  const Polynomial loop = current_loop_den(net);
  SharingTerms out;
  out.T1 = RationalFunction(Dp * (gc.num() * kr.num()), loop).reduced();
  out.T2 = RationalFunction((Dp / m) * (gc.num() * kv.num() * kr.den()), kv.den() * loop).reduced();
  return out;
}

double sharing_bound(const ConverterNetwork& net, std::size_t k, std::size_t l, double e1_dc, double t) {
  const auto& gammas = net.share().gammas_at(t);
  if (k >= gammas.size() || l >= gammas.size()) {
    throw Error(ErrorCode::InvalidArgument, "sharing_bound: index out of range");
  }
  const double gk = gammas[k];
  const double gl = gammas[l];
  if (!(gk > 0.0 && gl > 0.0)) throw Error(ErrorCode::InvalidArgument, "sharing_bound: gammas must be > 0");
  const SharingTerms terms = sharing_terms(net);
  const DcGain t1 = dc_gain(terms.T1);
  const DcGain t2 = dc_gain(terms.T2);
  const double eta = net.controllers().eta;
  const double gap = std::abs(1.0 / gk - 1.0 / gl);
  double coeff = eta * std::abs(t1.value);
  if (gap > 0.0) coeff += gap * std::abs(t2.value);
  if (t1.infinite || (gap > 0.0 && t2.infinite)) coeff = std::numeric_limits<double>::infinity();
  return coeff * std::abs(e1_dc);
}

}  // namespace dcnet
