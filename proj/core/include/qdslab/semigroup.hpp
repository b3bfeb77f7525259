#pragma once

#include <vector>

#include "qdslab/model.hpp"

namespace qdslab {

/// W_t = exp(-tG).
struct Propagator {
  double t = 0.0;
  Matrix W;
};

/// Throws DomainError for t < 0 and RefusalError when -G is not dissipative.
Propagator propagator(const ModelSpec& spec, double t, const Tolerances& tol = {});

struct EvolutionResult {
  std::vector<double> times;
  std::vector<HermitianForm> observables;  ///< P_t(x)
  std::vector<HermitianForm> explosion;    ///< I - P_t(I), only when x = I
};

/// Solves dX/dt = L(X), X(0) = x with an adaptive Runge-Kutta scheme and
/// samples the solution at the given sorted times.
EvolutionResult evolve_observable(const ModelSpec& spec, const HermitianForm& x,
                                  const std::vector<double>& times,
                                  const Tolerances& tol = {});

/// Uniform sampling of [0, t] with `steps` intervals.
EvolutionResult evolve_observable(const ModelSpec& spec, const HermitianForm& x,
                                  double t, int steps, const Tolerances& tol = {});

struct IterationOptions {
  int n_max = 16;
  /// Stop early once ||P^(n) - P^(n-1)|| falls below this (0 disables).
  double stall_tol = 0.0;
  int initial_panels = 0;  ///< 0 picks a count from the rate scale
  int max_refinements = 8;
};

/// P^(1)_t(x), ..., P^(n)_t(x) of the monotone iteration
///   P^(n)_t(x) = W_t* x W_t + int_0^t W_{t-s}* phi(P^(n-1)_s(x)) W_{t-s} ds.
/// The time integrals use composite Gauss-Legendre panels, doubled until the
/// last iterate changes by less than tol.quadrature.
/// Throws RefusalError when x is not positive semidefinite.
std::vector<HermitianForm> minimal_iteration(const ModelSpec& spec,
                                             const HermitianForm& x, double t,
                                             const IterationOptions& opts = {},
                                             const Tolerances& tol = {});

/// The trace-dual evolution d rho/dt = L^dagger(rho).
/// Throws RefusalError when rho is not positive semidefinite.
Matrix predual_evolve(const ModelSpec& spec, const Matrix& rho, double t,
                      const Tolerances& tol = {});

}  // namespace qdslab
