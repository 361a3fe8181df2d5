#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "dcnet/rational_function.hpp"

namespace dcnet {

struct StateSpaceModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;

  StateSpaceModel() = default;
  /// Throws InvalidArgument on inconsistent dimensions.
  StateSpaceModel(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd D);

  Eigen::Index states() const noexcept { return A.rows(); }
  Eigen::Index inputs() const noexcept { return B.cols(); }
  Eigen::Index outputs() const noexcept { return C.rows(); }

  /// C (jw I - A)^-1 B + D.
  Eigen::MatrixXcd response(double omega) const;
  Eigen::VectorXcd poles() const;
  bool is_stable() const;
};

/// Controllable canonical realization of a proper transfer function,
/// followed by diagonal balancing of A. Throws InvalidArgument if improper.
StateSpaceModel realize(const RationalFunction& sys);

/// Realization of a - b (parallel connection, shared input, outputs subtracted).
StateSpaceModel difference(const StateSpaceModel& a, const StateSpaceModel& b);

}  // namespace dcnet
