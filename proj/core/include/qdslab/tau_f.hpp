#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdslab/types.hpp"

namespace qdslab {

/// A positive coefficient function f on [0, inf) for the transport operator
/// tau_f u = (1/2i)((f u)' + f u').
class PositiveFunction {
 public:
  /// f(x) = (1 + x)^alpha, alpha in [0, 1].
  static PositiveFunction power(double alpha);
  /// Piecewise-linear interpolation of samples; x must start at 0.
  static PositiveFunction sampled(std::vector<double> x, std::vector<double> f);

  double operator()(double x) const;
  double derivative(double x) const;
  /// int_0^x dt / f(t)
  double inverse_integral(double x) const;

  /// Closed-form functions are defined on all of [0, inf); sampled ones only
  /// up to their last sample.
  bool closed_form() const noexcept { return !xs_.has_value(); }
  double domain_end() const;
  std::optional<double> alpha() const noexcept { return alpha_; }
  std::string describe() const;

 private:
  PositiveFunction() = default;
  std::optional<double> alpha_;
  std::optional<std::vector<double>> xs_;
  std::vector<double> fs_;
  std::vector<double> cumulative_;  // int 1/f at the sample points
};

/// Strictly increasing grid starting at 0.
std::vector<double> uniform_grid(double a, double b, int intervals);

/// Inserts the midpoint of every interval.
std::vector<double> refine_grid(const std::vector<double>& grid);

struct TauFModel {
  PositiveFunction f = PositiveFunction::power(0.0);
  std::vector<double> grid;
  double c1 = 1.0;

  /// Throws DomainError when the grid or f is invalid.
  void validate() const;
  int intervals() const { return static_cast<int>(grid.size()) - 1; }
  /// max |f'| by finite differences on the grid
  double derivative_bound() const;
  /// int_0^{x_M} dx / f
  double divergence_integral() const;
};

}  // namespace qdslab
