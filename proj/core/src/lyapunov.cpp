#include "qdslab/lyapunov.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qdslab {

ShiftedLyapunovSolver::ShiftedLyapunovSolver(const Matrix& g, double lambda)
    : lambda_(lambda) {
  if (g.rows() != g.cols()) throw DimensionError("G must be square");
  Eigen::ComplexSchur<Matrix> schur(g);
  if (schur.info() != Eigen::Success) throw Error("complex Schur decomposition failed");
  t_ = schur.matrixT();
  u_ = schur.matrixU();
  // lambda + T_ii + conj(T_jj) must stay away from 0
  for (Eigen::Index i = 0; i < t_.rows(); ++i)
    if (lambda_ + 2.0 * t_(i, i).real() <= 0.0)
      throw Error("shifted Lyapunov operator is singular: lambda + 2 Re mu <= 0");
  diagonal_ = t_.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero(0.0);
  identity_u_ = u_.isIdentity(0.0);
}

Matrix ShiftedLyapunovSolver::solve(const Matrix& c) const {
  const Eigen::Index n = t_.rows();
  if (c.rows() != n || c.cols() != n) throw DimensionError("right-hand side shape mismatch");
  const Matrix ct = identity_u_ ? c : Matrix(u_.adjoint() * c * u_);
  Matrix y(n, n);
  if (diagonal_) {
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        y(i, j) = ct(i, j) / (lambda_ + std::conj(t_(i, i)) + t_(j, j));
    return identity_u_ ? y : Matrix(u_ * y * u_.adjoint());
  }
  Matrix lower = t_.adjoint();
  const Eigen::VectorXcd diag = lower.diagonal();
  Vector rhs(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    rhs = ct.col(j);
    if (j > 0) rhs.noalias() -= y.leftCols(j) * t_.col(j).head(j);
    lower.diagonal() = diag.array() + (lambda_ + t_(j, j));
    y.col(j) = lower.triangularView<Eigen::Lower>().solve(rhs);
  }
  return identity_u_ ? y : Matrix(u_ * y * u_.adjoint());
}

}  // namespace qdslab
