#pragma once

#include <complex>
#include <span>
#include <vector>

#include "dcnet/polynomial.hpp"

namespace dcnet {

/// SISO LTI transfer function num(s)/den(s). The denominator is kept monic.
class RationalFunction {
 public:
  RationalFunction() : num_{0.0}, den_{1.0} {}
  RationalFunction(double gain) : num_{gain}, den_{1.0} {}  // NOLINT: implicit scalar promotion
  RationalFunction(Polynomial num, Polynomial den);

  /// gain * prod(num_factors) / prod(den_factors).
  static RationalFunction from_factors(double gain, std::span<const Polynomial> num_factors,
                                       std::span<const Polynomial> den_factors);
  /// 1 / (scale * s).
  static RationalFunction integrator(double scale);

  const Polynomial& num() const noexcept { return num_; }
  const Polynomial& den() const noexcept { return den_; }

  std::complex<double> operator()(std::complex<double> s) const noexcept {
    return num_(s) / den_(s);
  }
  std::complex<double> at_frequency(double omega) const noexcept {
    return (*this)(std::complex<double>(0.0, omega));
  }

  bool is_proper() const noexcept { return num_.degree() <= den_.degree(); }
  bool is_strictly_proper() const noexcept {
    return num_.is_zero() || num_.degree() < den_.degree();
  }
  bool is_zero() const noexcept { return num_.is_zero(); }

  /// Cancel numerator/denominator roots that coincide to within
  /// rel_tol * max(|z|, |p|). Matched factors are deflated out by polynomial
  /// division so the surviving coefficients keep their accuracy; roots in
  /// common at the origin are removed exactly.
  RationalFunction reduced(double rel_tol = 1e-7) const;

  RationalFunction operator-() const { return {-num_, den_}; }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);

  bool operator==(const RationalFunction&) const = default;

 private:
  Polynomial num_;
  Polynomial den_;
};

struct FrequencyResponse {
  std::vector<double> omegas;
  std::vector<std::complex<double>> values;
};

/// DC value; `infinite` is set when a pole at the origin survives
/// cancellation, in which case `value` carries the sign as +-inf.
struct DcGain {
  double value = 0.0;
  bool infinite = false;
};

/// g / (1 + g h). Throws AlgebraicLoop when 1 + g h vanishes identically.
RationalFunction tf_feedback(const RationalFunction& g, const RationalFunction& h);

/// Throws PoleOnGrid when |den(j w)| is at rounding level at a grid point.
FrequencyResponse freq_response(const RationalFunction& sys, std::span<const double> omegas);

DcGain dc_gain(const RationalFunction& sys);

/// All denominator roots satisfy Re(p) < -1e-9 * max(1, |p|).
bool is_stable(const RationalFunction& sys);
bool is_stable_polynomial(const Polynomial& den);

/// n points logarithmically spaced over [lo, hi], inclusive.
std::vector<double> logspace(double lo, double hi, std::size_t n);

}  // namespace dcnet
