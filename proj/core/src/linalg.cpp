#include "qdslab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace qdslab::linalg {

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

RealVector hermitian_eigenvalues(const Matrix& m) {
  if (m.rows() == 0) return RealVector();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const Matrix& m) {
  const RealVector ev = hermitian_eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev(0);
}

double max_eigenvalue(const Matrix& m) {
  const RealVector ev = hermitian_eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev(ev.size() - 1);
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() <= 8 || m.cols() <= 8) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  }
  const Matrix gram = m.cols() <= m.rows() ? Matrix(m.adjoint() * m)
                                           : Matrix(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(es.eigenvalues().size() - 1)));
}

bool norm_below(const Matrix& m, double bound) {
  if (m.size() == 0) return 0.0 < bound;
  const double one = m.cwiseAbs().colwise().sum().maxCoeff();
  const double inf = m.cwiseAbs().rowwise().sum().maxCoeff();
  if (std::sqrt(one * inf) < bound) return true;
  const double lower = m.norm() / std::sqrt(static_cast<double>(std::min(m.rows(), m.cols())));
  if (lower >= bound) return false;
  return operator_norm(m) < bound;
}

double hermitian_norm(const Matrix& m) {
  const RealVector ev = hermitian_eigenvalues(m);
  if (ev.size() == 0) return 0.0;
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double hermiticity_defect(const Matrix& m) {
  return operator_norm(m - m.adjoint());
}

bool is_psd(const Matrix& m, double tol) { return min_eigenvalue(m) >= -tol; }

Matrix expm(const Matrix& a) { return a.exp(); }

Matrix orthonormal_columns(const Matrix& m, double tol) {
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double scale = s.size() > 0 ? std::max(1.0, s(0)) : 1.0;
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tol * scale) ++rank;
  return svd.matrixU().leftCols(rank);
}

Matrix psd_projection(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  RealVector ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() *
         es.eigenvectors().adjoint();
}

Matrix ket_bra(const Vector& v, const Vector& u) { return v * u.adjoint(); }

}  // namespace qdslab::linalg
