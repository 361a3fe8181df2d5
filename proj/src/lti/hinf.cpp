#include "dcnet/hinf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "balance.hpp"
#include "dcnet/error.hpp"

namespace dcnet {

namespace {

double sigma_max(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

double sigma_max(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// Frequencies w >= 0 where the Hamiltonian of (sys, gamma) has eigenvalues on
// the imaginary axis (loosely detected; callers certify by evaluation).
std::vector<double> crossing_candidates(const StateSpaceModel& sys, double gamma) {
  const Eigen::Index n = sys.states();
  const Eigen::Index m = sys.inputs();
  const Eigen::Index p = sys.outputs();
  const Eigen::MatrixXd R = gamma * gamma * Eigen::MatrixXd::Identity(m, m) - sys.D.transpose() * sys.D;
  const Eigen::MatrixXd Rinv = R.inverse();
  const Eigen::MatrixXd Ae = sys.A + sys.B * Rinv * sys.D.transpose() * sys.C;
  const Eigen::MatrixXd Q =
      sys.C.transpose() * (Eigen::MatrixXd::Identity(p, p) + sys.D * Rinv * sys.D.transpose()) * sys.C;

  Eigen::MatrixXd H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = Ae;
  H.topRightCorner(n, n) = sys.B * Rinv * sys.B.transpose();
  H.bottomLeftCorner(n, n) = -Q;
  H.bottomRightCorner(n, n) = -Ae.transpose();
  detail::balance_in_place(H);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(H, false);
  const auto& ev = solver.eigenvalues();
  std::vector<double> out;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double mag = std::abs(ev(i));
    if (std::abs(ev(i).real()) <= 1e-6 * std::max(1.0, mag) && ev(i).imag() >= 0.0) {
      out.push_back(ev(i).imag());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Eigen::MatrixXcd TransferMatrix::at_frequency(double omega) const {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (*this)(r, c).at_frequency(omega);
    }
  }
  return m;
}

PeakGain hinf_norm(const StateSpaceModel& sys, double rel_tol) {
  if (!sys.is_stable()) throw Error(ErrorCode::Unstable, "H-infinity norm requires a stable system");
  const double dnorm = sigma_max(sys.D);
  if (sys.states() == 0) return {dnorm, std::numeric_limits<double>::infinity()};

  auto eval = [&](double w) { return sigma_max(sys.response(w)); };

  // Initial lower bound from DC, infinity and the pole frequencies.
  PeakGain best{dnorm, std::numeric_limits<double>::infinity()};
  auto consider = [&](double w) {
    const double g = eval(w);
    if (g > best.norm) best = {g, w};
    return g;
  };
  consider(0.0);
  const auto poles = sys.poles();
  for (Eigen::Index i = 0; i < poles.size(); ++i) {
    consider(std::abs(poles(i)));
    if (poles(i).imag() != 0.0) consider(std::abs(poles(i).imag()));
  }
  if (best.norm == 0.0) return {0.0, 0.0};

  // Returns true when gamma is certified to lie below the norm; raises the
  // lower bound with evaluations at crossing frequencies and their midpoints.
  auto below_norm = [&](double gamma) {
    const auto ws = crossing_candidates(sys, gamma);
    bool crossing = false;
    std::vector<double> certified;
    for (double w : ws) {
      if (consider(w) >= gamma * (1.0 - 1e-8)) {
        crossing = true;
        certified.push_back(w);
      }
    }
    for (std::size_t i = 0; i + 1 < certified.size(); ++i) {
      consider(0.5 * (certified[i] + certified[i + 1]));
    }
    return crossing;
  };

  double lo = best.norm;
  double hi = 2.0 * lo;
  while (below_norm(hi)) {
    lo = std::max(lo, best.norm);
    hi = 2.0 * std::max(hi, best.norm);
  }
  lo = std::max(lo, best.norm);
  for (int it = 0; it < 200 && hi - lo > rel_tol * lo; ++it) {
    const double gamma = 0.5 * (lo + hi);
    if (below_norm(gamma)) {
      lo = std::max(gamma, best.norm);
    } else {
      hi = gamma;
    }
    lo = std::max(lo, best.norm);
    if (lo > hi) hi = lo;
  }
  return {hi, best.omega};
}

double hinf_norm(const RationalFunction& sys, double rel_tol) {
  if (!is_stable(sys)) throw Error(ErrorCode::Unstable, "H-infinity norm requires a stable system");
  return hinf_norm(realize(sys), rel_tol).norm;
}

PeakGain peak_gain_grid(const std::function<Eigen::MatrixXcd(double)>& response, const GridOptions& opts) {
  auto eval = [&](double w) { return sigma_max(response(w)); };
  const auto grid = logspace(opts.omega_lo, opts.omega_hi, opts.points);

  std::size_t best_i = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double g = eval(grid[i]);
    if (g > best) {
      best = g;
      best_i = i;
    }
  }
  PeakGain out{best, grid[best_i]};

  // Golden-section search on the bracket around the best sample (log axis),
  // or on [0, w1] (linear axis) when DC wins.
  constexpr double invphi = 0.6180339887498949;
  auto golden = [&](double a, double b, auto&& to_omega) {
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = eval(to_omega(c));
    double fd = eval(to_omega(d));
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-13 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = eval(to_omega(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = eval(to_omega(d));
      }
    }
    const double x = 0.5 * (a + b);
    const double fx = eval(to_omega(x));
    if (fx > out.norm) out = {fx, to_omega(x)};
  };

  if (opts.include_dc) {
    const double g0 = eval(0.0);
    if (g0 >= out.norm) {
      out = {g0, 0.0};
      golden(0.0, grid.size() > 1 ? grid[1] : grid[0], [](double w) { return w; });
      return out;
    }
  }
  const double a = std::log(grid[best_i > 0 ? best_i - 1 : 0]);
  const double b = std::log(grid[std::min(best_i + 1, grid.size() - 1)]);
  if (b > a) golden(a, b, [](double x) { return std::exp(x); });
  return out;
}

PeakGain hinf_norm_grid(const TransferMatrix& sys, const GridOptions& opts) {
  for (std::size_t r = 0; r < sys.rows(); ++r) {
    for (std::size_t c = 0; c < sys.cols(); ++c) {
      const auto& e = sys(r, c);
      if (!e.is_zero() && e.den().degree() > 0 && !is_stable(e)) {
        throw Error(ErrorCode::Unstable, "transfer matrix entry is unstable");
      }
    }
  }
  return peak_gain_grid([&](double w) { return sys.at_frequency(w); }, opts);
}

}  // namespace dcnet
