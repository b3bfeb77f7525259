#pragma once

#include <functional>
#include <vector>

#include "qdslab/types.hpp"

namespace qdslab::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Supported orders: 8 and 16.
const GaussRule& gauss_legendre(int order);

/// Evaluates a matrix-valued function at a sorted list of times.
using BatchEvaluator =
    std::function<std::vector<Matrix>(const std::vector<double>& sorted_times)>;

struct LaplaceOptions {
  double lambda = 1.0;
  /// Typical decay rate of the integrand; sets the width of the first panel.
  double rate_scale = 1.0;
  double tol = 1e-10;
  int max_refinements = 6;
};

struct LaplaceResult {
  Matrix value;
  double achieved = 0.0;  ///< difference between the last two refinements
  int panels = 0;
  int evaluations = 0;
};

/// int_0^inf e^{-lambda t} g(t) dt for bounded g, by composite
/// Gauss-Legendre on geometrically graded panels. Panels are halved until
/// two successive refinements agree to opts.tol (operator norm).
/// Throws ConvergenceError if max_refinements is exhausted.
LaplaceResult laplace_transform(const BatchEvaluator& g, int rows, int cols,
                                const LaplaceOptions& opts);

/// Adaptive composite Gauss-Kronrod for a scalar function on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13);

}  // namespace qdslab::quad
