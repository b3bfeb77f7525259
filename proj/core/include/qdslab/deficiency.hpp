#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qdslab/model.hpp"
#include "qdslab/tau_f.hpp"

namespace qdslab {

enum class Orientation { forward, adjoint };
const char* to_string(Orientation o);

enum class TailClass { square_integrable, divergent };
const char* to_string(TailClass t);

struct DeficiencyVectors {
  std::vector<double> x;
  RealVector u_plus;   ///< c1 f^{-1/2} exp(-int_0^x 1/f)
  RealVector u_minus;  ///< c1 f^{-1/2} exp(+int_0^x 1/f)
  /// max_j |f^{1/2} D_h(f^{1/2} u)_j -/+ u_j| / |u_j| with a forward difference D_h
  double residual_plus = 0.0;
  double residual_minus = 0.0;
};

/// Largest relative ODE residual accepted by deficiency_vectors_tau_f.
inline constexpr double kMaxDeficiencyResidual = 0.25;

/// Samples u_+ and u_- on the grid and checks tau_f u = +/- i u with a
/// first-order difference. Throws ConvergenceError when the grid is too
/// coarse for the residual bound.
DeficiencyVectors deficiency_vectors_tau_f(const TauFModel& model);

struct PartialNorm {
  double x = 0.0;
  double log_value = 0.0;  ///< log of int_0^x |u|^2
};

struct DeficiencyResult {
  int n_plus = 0;
  int n_minus = 0;
  DeficiencyVectors vectors;
  double norm_plus = 0.0;           ///< quadrature of ||u_+||^2
  double norm_plus_expected = 0.0;  ///< c1^2 / 2
  double norm_plus_cutoff = 0.0;    ///< upper integration limit used
  bool norm_plus_extrapolated = false; ///< sampled f held constant past its last sample
  TailClass tail_plus = TailClass::square_integrable;
  TailClass tail_minus = TailClass::divergent;
  std::vector<PartialNorm> minus_partial_norms;
  std::vector<double> minus_doubling_ratios;
  double divergence_integral = 0.0;
  double derivative_bound = 0.0;
};

/// Deficiency indices of the closure of tau_f with u(0) = 0 from the
/// square-integrability of u_+ and u_-. Throws InconclusiveError when the
/// doubling test for u_- gives mixed evidence.
DeficiencyResult deficiency_indices_tau_f(const TauFModel& model);

/// A partial isometry on l^2(N): either a weighted shift V e_n = w_n e_{n+m}
/// truncated to any dimension, or a fixed explicit matrix.
struct IsometrySpec {
  int m = 1;
  int dim = 16;
  std::function<cplx(int)> weight;  ///< unimodular; empty means 1
  std::optional<Matrix> explicit_matrix;

  Matrix matrix(int dimension) const;
  Matrix matrix() const { return matrix(dim); }
  /// Columns orthonormal where nonzero, within 1e-12.
  void validate() const;
};

struct CayleyResult {
  int n_plus = 0;
  int n_minus = 0;
  std::vector<int> dims;            ///< truncations compared
  std::vector<int> n_plus_by_dim;
  std::vector<int> n_minus_by_dim;
  Matrix n_minus_basis;             ///< orthonormal basis of N_- at the first dim
  double range_margin = 0.0;        ///< smallest singular value of I - V
  bool stabilized = true;
};

/// Indices of H = i(I + V)(I - V)^{-1}: n_+ = dim (dom V)^perp and
/// n_- = dim ker V*, counting only kernel vectors with mass in the first
/// half of the basis (the rest are truncation edges). Computed at dim and
/// 2 dim; a change raises InconclusiveError. Rejects V when I - V has a
/// kernel (range of I - V not dense).
CayleyResult cayley_deficiency_from_isometry(const IsometrySpec& iso);

enum class IsometryVerdict { extends_to_isometry_generator, does_not };
const char* to_string(IsometryVerdict v);

/// n_+ <= n_- : iH restricts a generator of an isometry semigroup.
IsometryVerdict isometric_restriction_verdict(int n_plus, int n_minus);

struct Prop42Level {
  int intervals = 0;
  double max_residual = 0.0;
  double far_tail_residual = 0.0;  ///< at the last index of D
};

struct Prop42Report {
  std::vector<Prop42Level> levels;  ///< M and 2M
  double order = 0.0;               ///< log2 of the residual ratio
};

/// |L(x)[e_j] - 2 <e_j, x e_j>| for each index j of D, with x = |w><w|.
RealVector prop42_residuals(const ModelSpec& spec, const Vector& w);

/// Builds the forward transport model at the model grid and its midpoint
/// refinement, takes w = normalized u_+ in the weighted grid coordinates,
/// and reports the residuals and their convergence order.
/// Refuses the adjoint orientation (n_+ = 0 there).
Prop42Report prop42_certificate(const TauFModel& model,
                                Orientation orientation = Orientation::forward);

}  // namespace qdslab
