#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace dcnet {

/// Real polynomial in the Laplace variable s, stored as dense coefficients in
/// ascending powers. High-order zero coefficients are trimmed on construction;
/// the zero polynomial is the single coefficient 0.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  Polynomial(std::initializer_list<double> ascending);
  explicit Polynomial(std::vector<double> ascending);

  static Polynomial constant(double c) { return Polynomial{c}; }
  /// The monomial s.
  static Polynomial s() { return Polynomial{0.0, 1.0}; }
  /// leading * prod (s - r). Complex roots must come in conjugate pairs.
  static Polynomial from_roots(std::span<const std::complex<double>> roots,
                               double leading = 1.0);

  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  /// Coefficient of s^k, zero beyond the degree.
  double operator[](std::size_t k) const noexcept {
    return k < coeffs_.size() ? coeffs_[k] : 0.0;
  }
  double leading() const noexcept { return coeffs_.back(); }
  bool is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  double norm_inf() const noexcept;

  std::complex<double> operator()(std::complex<double> s) const noexcept;
  double operator()(double s) const noexcept;

  /// Roots from the eigenvalues of the balanced companion matrix. Exact zero
  /// low-order coefficients produce exact roots at the origin.
  std::vector<std::complex<double>> roots() const;

  /// Number of low-order coefficients with magnitude <= rel_tol * norm_inf().
  std::size_t origin_multiplicity(double rel_tol) const noexcept;
  /// Divide by s^k, dropping the k lowest coefficients.
  Polynomial divided_by_s(std::size_t k) const;

  Polynomial operator-() const;
  Polynomial& operator*=(double k);

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double k, Polynomial p) { return p *= k; }
  friend Polynomial operator*(Polynomial p, double k) { return p *= k; }

  bool operator==(const Polynomial&) const = default;

 private:
  void trim();

  std::vector<double> coeffs_;
};

/// Coefficient convolution.
Polynomial poly_mul(const Polynomial& a, const Polynomial& b);

/// Quotient of a / divisor, remainder discarded. Used to deflate a known
/// common factor out of a numerator/denominator pair.
Polynomial poly_quotient(const Polynomial& a, const Polynomial& divisor);

}  // namespace dcnet
