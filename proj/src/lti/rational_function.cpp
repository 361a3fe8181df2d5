#include "dcnet/rational_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dcnet/error.hpp"

namespace dcnet {

namespace {

constexpr double kOriginTol = 1e-12;

Polynomial linear_factor(double r) { return Polynomial{-r, 1.0}; }

Polynomial quadratic_factor(std::complex<double> r) {
  return Polynomial{std::norm(r), -2.0 * r.real(), 1.0};
}

}  // namespace

RationalFunction::RationalFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error(ErrorCode::InvalidArgument, "transfer function with zero denominator");
  const double lead = den_.leading();
  if (lead != 1.0) {
    num_ *= 1.0 / lead;
    den_ *= 1.0 / lead;
  }
}

RationalFunction RationalFunction::from_factors(double gain, std::span<const Polynomial> num_factors,
                                                std::span<const Polynomial> den_factors) {
  Polynomial n{gain};
  for (const auto& f : num_factors) n = n * f;
  Polynomial d{1.0};
  for (const auto& f : den_factors) d = d * f;
  return {std::move(n), std::move(d)};
}

RationalFunction RationalFunction::integrator(double scale) {
  return {Polynomial{1.0}, Polynomial{0.0, scale}};
}

RationalFunction RationalFunction::reduced(double rel_tol) const {
  if (num_.is_zero()) return {Polynomial{0.0}, Polynomial{1.0}};

  const std::size_t k = std::min(num_.origin_multiplicity(kOriginTol), den_.origin_multiplicity(kOriginTol));
  Polynomial n = num_.divided_by_s(k);
  Polynomial d = den_.divided_by_s(k);
  if (n.degree() == 0 || d.degree() == 0) return {std::move(n), std::move(d)};

  auto zeros = n.roots();
  auto poles = d.roots();
  std::vector<bool> used(poles.size(), false);

  for (const auto& z : zeros) {
    if (z.imag() < 0.0) continue;  // handled with its conjugate
    const bool complex_root = z.imag() > 0.0;
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (used[j]) continue;
      const auto& p = poles[j];
      if (complex_root != (p.imag() > 0.0) || p.imag() < 0.0) continue;
      const double scale = std::max(std::abs(z), std::abs(p));
      if (std::abs(z - p) > rel_tol * scale) continue;
      const std::complex<double> r = 0.5 * (z + p);
      const Polynomial f = complex_root ? quadratic_factor(r) : linear_factor(r.real());
      if (n.degree() < f.degree() || d.degree() < f.degree()) break;
      n = poly_quotient(n, f);
      d = poly_quotient(d, f);
      used[j] = true;
      break;
    }
  }
  return {std::move(n), std::move(d)};
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
  return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return {a.num_ * b.num_, a.den_ * b.den_};
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) throw Error(ErrorCode::InvalidArgument, "division by the zero transfer function");
  return {a.num_ * b.den_, a.den_ * b.num_};
}

RationalFunction tf_feedback(const RationalFunction& g, const RationalFunction& h) {
  Polynomial num = g.num() * h.den();
  Polynomial den = g.den() * h.den() + g.num() * h.num();
  if (den.is_zero()) throw Error(ErrorCode::AlgebraicLoop, "1 + g*h vanishes identically");
  return RationalFunction(std::move(num), std::move(den)).reduced();
}

FrequencyResponse freq_response(const RationalFunction& sys, std::span<const double> omegas) {
  FrequencyResponse out;
  out.omegas.assign(omegas.begin(), omegas.end());
  out.values.reserve(omegas.size());
  const auto& d = sys.den().coeffs();
  for (double w : omegas) {
    const std::complex<double> s(0.0, w);
    const std::complex<double> dv = sys.den()(s);
    double mag = 0.0;
    double wp = 1.0;
    for (double c : d) {
      mag += std::abs(c) * wp;
      wp *= std::abs(w);
    }
    if (std::abs(dv) <= 1e-13 * mag) {
      throw Error(ErrorCode::PoleOnGrid, "pole on the imaginary axis at omega = " + std::to_string(w));
    }
    out.values.push_back(sys.num()(s) / dv);
  }
  return out;
}

DcGain dc_gain(const RationalFunction& sys) {
  if (sys.num().is_zero()) return {0.0, false};
  const std::size_t kz = sys.num().origin_multiplicity(kOriginTol);
  const std::size_t kp = sys.den().origin_multiplicity(kOriginTol);
  if (kz > kp) return {0.0, false};
  const Polynomial n = sys.num().divided_by_s(kz);
  const Polynomial d = sys.den().divided_by_s(kp);
  const double ratio = n[0] / d[0];
  if (kp > kz) {
    return {std::copysign(std::numeric_limits<double>::infinity(), ratio), true};
  }
  return {ratio, false};
}

bool is_stable_polynomial(const Polynomial& den) {
  for (const auto& r : den.roots()) {
    if (!(r.real() < -1e-9 * std::max(1.0, std::abs(r)))) return false;
  }
  return true;
}

bool is_stable(const RationalFunction& sys) { return is_stable_polynomial(sys.den()); }

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace dcnet
