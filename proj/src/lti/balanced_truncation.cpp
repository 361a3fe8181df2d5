#include "dcnet/balanced_truncation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "dcnet/error.hpp"

namespace dcnet {

namespace {

// Symmetric PSD square root factor: W = L L^T, negative eigenvalues from
// rounding are clipped.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& W) {
  const Eigen::MatrixXd sym = 0.5 * (W + W.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * lam.asDiagonal();
}

struct Gramian {
  Eigen::MatrixXd Lc;
  Eigen::MatrixXd Lo;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
};

Gramian gramian_factors(const StateSpaceModel& sys) {
  if (!sys.is_stable()) throw Error(ErrorCode::Unstable, "balanced truncation requires a stable system");
  const Eigen::MatrixXd Wc = solve_lyapunov(sys.A, sys.B * sys.B.transpose());
  const Eigen::MatrixXd Wo = solve_lyapunov(sys.A.transpose(), sys.C.transpose() * sys.C);
  Gramian g;
  g.Lc = psd_factor(Wc);
  g.Lo = psd_factor(Wo);
  g.svd.compute(g.Lo.transpose() * g.Lc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return g;
}

}  // namespace

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw Error(ErrorCode::InvalidArgument, "solve_lyapunov: A and Q must be square and the same size");
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  // vec(A X + X A^T) = (I (x) A + A (x) I) vec(X), column-major vec.
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) += I(i, j) * A;
      K.block(i * n, j * n, n, n) += A(i, j) * I;
    }
  }
  const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
  const Eigen::VectorXd x = K.fullPivLu().solve(-q);
  Eigen::MatrixXd X = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
  return 0.5 * (X + X.transpose());
}

std::vector<double> hankel_singular_values(const StateSpaceModel& sys) {
  const auto g = gramian_factors(sys);
  const auto& s = g.svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

BalancedReduction balanced_truncate(const StateSpaceModel& sys, std::size_t order) {
  const auto n = static_cast<std::size_t>(sys.states());
  if (order > n) throw Error(ErrorCode::OrderTooLarge, "requested order exceeds the state dimension");
  if (order == 0) throw Error(ErrorCode::InvalidArgument, "reduced order must be positive");

  const auto g = gramian_factors(sys);
  const Eigen::VectorXd sigma = g.svd.singularValues();

  BalancedReduction out;
  out.hankel_singular_values.assign(sigma.data(), sigma.data() + sigma.size());
  for (std::size_t i = order; i < n; ++i) out.error_bound += 2.0 * sigma(static_cast<Eigen::Index>(i));

  if (order == n) {
    out.reduced = sys;
    return out;
  }

  const auto r = static_cast<Eigen::Index>(order);
  if (!(sigma(r - 1) > 0.0)) throw Error(ErrorCode::OrderTooLarge, "retained Hankel singular values vanish");
  const Eigen::VectorXd inv_sqrt = sigma.head(r).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd T = g.Lc * g.svd.matrixV().leftCols(r) * inv_sqrt.asDiagonal();
  const Eigen::MatrixXd Ti = inv_sqrt.asDiagonal() * g.svd.matrixU().leftCols(r).transpose() * g.Lo.transpose();

  out.reduced = StateSpaceModel(Ti * sys.A * T, Ti * sys.B, sys.C * T, sys.D);
  return out;
}

}  // namespace dcnet
