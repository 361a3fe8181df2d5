#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dcnet/state_space.hpp"

namespace dcnet {

/// Solves A X + X A^T + Q = 0 by the dense Kronecker-vectorized linear system.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

struct BalancedReduction {
  StateSpaceModel reduced;
  std::vector<double> hankel_singular_values;  ///< descending, full order
  double error_bound = 0.0;                    ///< 2 * sum of discarded values
};

/// Square-root balanced truncation to `order` states. order == states()
/// returns the model unchanged. Throws Unstable, or OrderTooLarge when
/// order exceeds the state dimension.
BalancedReduction balanced_truncate(const StateSpaceModel& sys, std::size_t order);

std::vector<double> hankel_singular_values(const StateSpaceModel& sys);

}  // namespace dcnet
