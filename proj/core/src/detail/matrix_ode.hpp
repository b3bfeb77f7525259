#pragma once

#include <functional>
#include <vector>

#include "qdslab/types.hpp"

namespace qdslab::detail {

struct OdeOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double initial_dt = 1e-3;
  long max_steps = 2'000'000;
  bool hermitian = true;  // symmetrize after each accepted step
};

using MatrixRhs = std::function<void(const Matrix& x, Matrix& dxdt)>;

// Integrates dX/dt = F(X), X(0) = x0, and returns X at each of the sorted,
// nonnegative output times.
std::vector<Matrix> integrate_matrix_ode(const MatrixRhs& rhs, const Matrix& x0,
                                         const std::vector<double>& times,
                                         const OdeOptions& opts);

}  // namespace qdslab::detail
