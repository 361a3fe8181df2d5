#include "dcnet/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "balance.hpp"

namespace dcnet {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::complex<double> eval_derivative(const std::vector<double>& c, std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (std::size_t k = c.size() - 1; k >= 1; --k) {
    acc = acc * s + static_cast<double>(k) * c[k];
  }
  return acc;
}

}  // namespace

Polynomial::Polynomial(std::initializer_list<double> ascending) : coeffs_(ascending) { trim(); }

Polynomial::Polynomial(std::vector<double> ascending) : coeffs_(std::move(ascending)) { trim(); }

void Polynomial::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

Polynomial Polynomial::from_roots(std::span<const std::complex<double>> roots, double leading) {
  // Accumulate in complex arithmetic and keep the real part; conjugate pairs
  // make the imaginary parts cancel up to rounding.
  std::vector<std::complex<double>> acc{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(acc.size() + 1, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i];
      next[i] -= acc[i] * r;
    }
    acc = std::move(next);
  }
  std::vector<double> c(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) c[i] = leading * acc[i].real();
  return Polynomial(std::move(c));
}

double Polynomial::norm_inf() const noexcept {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const noexcept {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double Polynomial::operator()(double s) const noexcept {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::vector<std::complex<double>> Polynomial::roots() const {
  std::vector<std::complex<double>> out;
  if (degree() == 0) return out;

  std::size_t zeros = 0;
  while (zeros < coeffs_.size() - 1 && coeffs_[zeros] == 0.0) ++zeros;
  out.assign(zeros, 0.0);

  const std::vector<double> c(coeffs_.begin() + static_cast<std::ptrdiff_t>(zeros), coeffs_.end());
  const std::size_t n = c.size() - 1;
  if (n == 0) return out;
  if (n == 1) {
    out.emplace_back(-c[0] / c[1], 0.0);
    return out;
  }

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                    static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < n; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) = -c[i] / c[n];
  }
  detail::balance_in_place(companion);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  const auto& ev = solver.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    // Two guarded Newton steps on the deflated polynomial tighten roots for
    // the later root matching.
    std::complex<double> z = ev(i);
    for (int it = 0; it < 2; ++it) {
      std::complex<double> pz = 0.0;
      for (auto k = c.rbegin(); k != c.rend(); ++k) pz = pz * z + *k;
      const std::complex<double> dz = eval_derivative(c, z);
      if (std::abs(dz) == 0.0) break;
      const std::complex<double> cand = z - pz / dz;
      std::complex<double> pc = 0.0;
      for (auto k = c.rbegin(); k != c.rend(); ++k) pc = pc * cand + *k;
      if (!(std::abs(pc) < std::abs(pz))) break;
      z = cand;
    }
    if (std::abs(ev(i).imag()) == 0.0) z = {z.real(), 0.0};
    out.push_back(z);
  }
  return out;
}

std::size_t Polynomial::origin_multiplicity(double rel_tol) const noexcept {
  if (is_zero()) return 0;
  const double cutoff = rel_tol * norm_inf();
  std::size_t k = 0;
  while (k < coeffs_.size() - 1 && std::abs(coeffs_[k]) <= cutoff) ++k;
  return k;
}

Polynomial Polynomial::divided_by_s(std::size_t k) const {
  if (k >= coeffs_.size()) return Polynomial{};
  return Polynomial(std::vector<double>(coeffs_.begin() + static_cast<std::ptrdiff_t>(k), coeffs_.end()));
}

Polynomial Polynomial::operator-() const {
  Polynomial p = *this;
  for (double& c : p.coeffs_) c = -c;
  return p;
}

Polynomial& Polynomial::operator*=(double k) {
  for (double& c : coeffs_) c *= k;
  trim();
  return *this;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  const std::size_t n = std::max(a.coeffs_.size(), b.coeffs_.size());
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a[i];
    const double y = b[i];
    const double sum = x + y;
    // A sum at the rounding level of its operands is a cancellation, not data.
    c[i] = std::abs(sum) <= 4.0 * kEps * (std::abs(x) + std::abs(y)) ? 0.0 : sum;
  }
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) { return poly_mul(a, b); }

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial{};
  const auto& x = a.coeffs();
  const auto& y = b.coeffs();
  std::vector<double> c(x.size() + y.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) c[i + j] += x[i] * y[j];
  }
  return Polynomial(std::move(c));
}

Polynomial poly_quotient(const Polynomial& a, const Polynomial& divisor) {
  if (divisor.degree() > a.degree()) return Polynomial{};
  std::vector<double> rem = a.coeffs();
  const auto& d = divisor.coeffs();
  const std::size_t nd = divisor.degree();
  std::vector<double> q(a.degree() - nd + 1, 0.0);
  for (std::size_t k = q.size(); k-- > 0;) {
    const double coef = rem[k + nd] / d[nd];
    q[k] = coef;
    for (std::size_t j = 0; j <= nd; ++j) rem[k + j] -= coef * d[j];
  }
  return Polynomial(std::move(q));
}

}  // namespace dcnet
