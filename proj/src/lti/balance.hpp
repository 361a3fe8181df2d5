#pragma once

#include <Eigen/Dense>

namespace dcnet::detail {

// Radix-2 diagonal balancing (no permutations). On return A holds
// D^-1 * A * D and the diagonal of D is returned.
Eigen::VectorXd balance_in_place(Eigen::MatrixXd& A);

}  // namespace dcnet::detail
