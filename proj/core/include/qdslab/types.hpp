#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qdslab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances shared by every module. Defaults are tuned for
/// unit-normalized models of dimension up to a few hundred.
struct Tolerances {
  double hermitian = 1e-10;
  double psd = 1e-10;
  double duality = 1e-10;
  double contraction = 1e-10;
  double semigroup = 1e-8;
  double condition_iv = 1e-10;

  double ode_abs = 1e-10;
  double ode_rel = 1e-8;
  double quadrature = 1e-10;
  double cross_method = 1e-6;
  double iteration_convergence = 1e-6;

  // Certificate norms above decision_threshold count as explosion mass;
  // values in [inconclusive_floor, decision_threshold) force "inconclusive".
  double decision_threshold = 1e-7;
  double inconclusive_floor = 1e-9;
  double series_tail = 1e-14;
  double stall = 1e-13;

  double annihilator_rank = 1e-9;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (G, Kraus operators, D, inputs).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the set where the operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the model or input is not met; the operation declines.
class RefusalError : public Error {
 public:
  using Error::Error;
};

/// An iterative or adaptive procedure did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// The numerical evidence does not support a definite classification.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdslab
