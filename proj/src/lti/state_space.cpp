#include "dcnet/state_space.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "balance.hpp"
#include "dcnet/error.hpp"

namespace dcnet {

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
  const bool ok = A.rows() == A.cols() && B.rows() == A.rows() && C.cols() == A.rows() &&
                  D.rows() == C.rows() && D.cols() == B.cols();
  if (!ok) throw Error(ErrorCode::InvalidArgument, "state-space matrices have inconsistent dimensions");
}

Eigen::MatrixXcd StateSpaceModel::response(double omega) const {
  if (states() == 0) return D.cast<std::complex<double>>();
  Eigen::MatrixXcd M = -A.cast<std::complex<double>>();
  M.diagonal().array() += std::complex<double>(0.0, omega);
  Eigen::MatrixXcd X = M.partialPivLu().solve(B.cast<std::complex<double>>());
  return C.cast<std::complex<double>>() * X + D.cast<std::complex<double>>();
}

Eigen::VectorXcd StateSpaceModel::poles() const {
  if (states() == 0) return {};
  Eigen::MatrixXd Ab = A;
  detail::balance_in_place(Ab);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(Ab, false);
  return solver.eigenvalues();
}

bool StateSpaceModel::is_stable() const {
  const auto p = poles();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i).real() < -1e-9 * std::max(1.0, std::abs(p(i))))) return false;
  }
  return true;
}

StateSpaceModel realize(const RationalFunction& sys) {
  if (!sys.is_proper()) throw Error(ErrorCode::InvalidArgument, "cannot realize an improper transfer function");
  const auto& den = sys.den();  // monic
  const std::size_t n = den.degree();
  const auto N = static_cast<Eigen::Index>(n);

  const double d0 = sys.num()[n];
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, 1);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(1, N);
  Eigen::MatrixXd D = Eigen::MatrixXd::Constant(1, 1, d0);
  if (n == 0) return {A, B, C, D};

  for (Eigen::Index i = 0; i + 1 < N; ++i) A(i, i + 1) = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    A(N - 1, static_cast<Eigen::Index>(i)) = -den[i];
    // strictly proper remainder num - d0 * den
    C(0, static_cast<Eigen::Index>(i)) = sys.num()[i] - d0 * den[i];
  }
  B(N - 1, 0) = 1.0;

  const Eigen::VectorXd scale = detail::balance_in_place(A);
  // A was replaced by T^-1 A T with T = diag(scale).
  B = scale.cwiseInverse().asDiagonal() * B;
  C = C * scale.asDiagonal();

  // Split the remaining input/output gain evenly so B and C have comparable
  // magnitude; this keeps Gramians well scaled.
  const double bn = B.norm();
  const double cn = C.norm();
  if (bn > 0.0 && cn > 0.0) {
    const double k = std::sqrt(cn / bn);
    B *= k;
    C /= k;
  }
  return {A, B, C, D};
}

StateSpaceModel difference(const StateSpaceModel& a, const StateSpaceModel& b) {
  if (a.inputs() != b.inputs() || a.outputs() != b.outputs()) {
    throw Error(ErrorCode::InvalidArgument, "difference of systems with different I/O sizes");
  }
  const Eigen::Index na = a.states();
  const Eigen::Index nb = b.states();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(na + nb, na + nb);
  A.topLeftCorner(na, na) = a.A;
  A.bottomRightCorner(nb, nb) = b.A;
  Eigen::MatrixXd B(na + nb, a.inputs());
  B << a.B, b.B;
  Eigen::MatrixXd C(a.outputs(), na + nb);
  C << a.C, -b.C;
  return {A, B, C, a.D - b.D};
}

}  // namespace dcnet
