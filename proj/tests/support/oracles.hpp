#pragma once

// Reference values computed without the library's Sylvester solver, ODE
// integrator or Laplace quadrature. Everything here works on vec(X) in
// column-major order, so vec(A X B) = (B^T kron A) vec(X).

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Vec vec(const Mat& x) { return Eigen::Map<const Vec>(x.data(), x.size()); }

inline Mat unvec(const Vec& v, Eigen::Index n) { return Eigen::Map<const Mat>(v.data(), n, n); }

/// The matrix of x -> sum L_k* x L_k - G* x - x G.
inline Mat superoperator(const Mat& g, const std::vector<Mat>& kraus) {
  const Eigen::Index n = g.rows();
  const Mat id = Mat::Identity(n, n);
  Mat s = -Eigen::kroneckerProduct(id, Mat(g.adjoint())).eval();
  s -= Eigen::kroneckerProduct(Mat(g.transpose()), id).eval();
  for (const auto& l : kraus)
    s += Eigen::kroneckerProduct(Mat(l.transpose()), Mat(l.adjoint())).eval();
  return s;
}

/// Y with lambda Y + G* Y + Y G = c, by a dense solve on n^2 unknowns.
inline Mat lyapunov(const Mat& g, double lambda, const Mat& c) {
  const Eigen::Index n = g.rows();
  const Mat id = Mat::Identity(n, n);
  Mat a = lambda * Mat::Identity(n * n, n * n);
  a += Eigen::kroneckerProduct(id, Mat(g.adjoint())).eval();
  a += Eigen::kroneckerProduct(Mat(g.transpose()), id).eval();
  return unvec(a.partialPivLu().solve(vec(c)), n);
}

inline Mat phi(const std::vector<Mat>& kraus, const Mat& x) {
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (const auto& l : kraus) out += l.adjoint() * x * l;
  return out;
}

/// Q_lambda(x) through the Kronecker solve.
inline Mat q_lambda(const Mat& g, const std::vector<Mat>& kraus, double lambda, const Mat& x) {
  return lyapunov(g, lambda, phi(kraus, x));
}

/// exp(t L)(x), L the superoperator: the semigroup generated on the
/// truncation, which is the minimal one there.
inline Mat semigroup(const Mat& g, const std::vector<Mat>& kraus, double t, const Mat& x) {
  const Mat s = (t * superoperator(g, kraus)).exp();
  return unvec(s * vec(x), g.rows());
}

/// (lambda - L)^{-1}(x) = int_0^inf e^{-lambda t} exp(t L)(x) dt.
inline Mat resolvent(const Mat& g, const std::vector<Mat>& kraus, double lambda, const Mat& x) {
  const Eigen::Index n = g.rows();
  const Mat a = lambda * Mat::Identity(n * n, n * n) - superoperator(g, kraus);
  return unvec(a.partialPivLu().solve(vec(x)), n);
}

/// int_0^inf e^{-lambda t} (I - W_t* W_t) dt = I/lambda - Y, lambda Y + G*Y + YG = I.
inline Mat first_iterate(const Mat& g, double lambda) {
  const Eigen::Index n = g.rows();
  return Mat::Identity(n, n) / lambda - lyapunov(g, lambda, Mat::Identity(n, n));
}

/// A pure-birth chain started at 0 leaves the truncation {0..N} before an
/// independent Exp(lambda) clock rings with probability
/// prod_{k=0}^{N} q_k / (q_k + lambda).
inline double birth_escape_probability(const std::function<double(int)>& q, int n_top,
                                       double lambda) {
  double p = 1.0;
  for (int k = 0; k <= n_top; ++k) p *= q(k) / (q(k) + lambda);
  return p;
}

/// prod_{k>=1} k^2 / (k^2 + 1) = pi / sinh(pi).
inline double pi_over_sinh_pi() { return M_PI / std::sinh(M_PI); }

/// Random positive semidefinite matrix with unit operator norm.
inline Mat random_psd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  Mat p = a * a.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(p, Eigen::EigenvaluesOnly);
  return p / es.eigenvalues().maxCoeff();
}

/// Simpson's rule on [a, b] with 2m panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  const double h = (b - a) / (2 * m);
  double s = f(a) + f(b);
  for (int i = 1; i < 2 * m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace oracle
