#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "dcnet/rational_function.hpp"
#include "dcnet/state_space.hpp"

namespace dcnet {

/// Dense matrix of SISO transfer functions (row-major).
class TransferMatrix {
 public:
  TransferMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  RationalFunction& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const RationalFunction& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  Eigen::MatrixXcd at_frequency(double omega) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<RationalFunction> entries_;
};

struct PeakGain {
  double norm = 0.0;
  double omega = 0.0;  ///< frequency of the peak, rad/s (0 for DC)
};

struct GridOptions {
  double omega_lo = 1e-2;
  double omega_hi = 1e6;
  std::size_t points = 2000;
  bool include_dc = true;
};

/// H-infinity norm by bisection on gamma with the Hamiltonian
/// imaginary-eigenvalue test. Works for MIMO state-space models.
/// Throws Unstable if A is not Hurwitz.
PeakGain hinf_norm(const StateSpaceModel& sys, double rel_tol = 1e-6);

/// SISO convenience: realizes then runs the Hamiltonian bisection.
/// Throws Unstable if the denominator is not Hurwitz.
double hinf_norm(const RationalFunction& sys, double rel_tol = 1e-6);

/// Peak of the largest singular value of a frequency response sampled on a
/// log grid, refined by golden-section search around the best sample.
PeakGain peak_gain_grid(const std::function<Eigen::MatrixXcd(double)>& response,
                        const GridOptions& opts = {});

/// Grid + refine H-infinity norm of a stable transfer matrix.
/// Throws Unstable if any entry is unstable.
PeakGain hinf_norm_grid(const TransferMatrix& sys, const GridOptions& opts = {});

}  // namespace dcnet
