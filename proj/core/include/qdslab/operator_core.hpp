#pragma once

#include "qdslab/model.hpp"

namespace qdslab {

enum class ConditionStatus { pass, fail, grid_approximate, informational };

const char* to_string(ConditionStatus s);

/// Residuals of the structural conditions on a truncated generator.
///
/// Condition (iii) is checked in the form L(I) <= 0, i.e.
/// phi(I) <= G + G*. Condition (iii') (L(I) = 0 everywhere) is reported
/// for information only; its failure is what allows explosion.
struct ValidationReport {
  double dissipativity_residual = 0.0;      ///< max(0, -lambda_min(G + G*))
  double condition_iii_residual = 0.0;      ///< max(0, lambda_max(L(I)))
  double condition_iii_prime_residual = 0.0;///< ||(G + G*) - phi(I)||
  double condition_iv_residual = 0.0;       ///< max |L(I)[u,v]| over a basis of D
  ConditionStatus dissipativity = ConditionStatus::pass;
  ConditionStatus condition_iii = ConditionStatus::pass;
  ConditionStatus condition_iii_prime = ConditionStatus::informational;
  ConditionStatus condition_iv = ConditionStatus::pass;

  /// Conditions (i)-(iii) hold and (iv) holds or is grid-approximate.
  bool admissible() const;
};

ValidationReport validate_model(const ModelSpec& spec, const Tolerances& tol = {});

/// phi(x) = sum_k L_k* x L_k. Works for any square x.
Matrix apply_phi(const ModelSpec& spec, const Matrix& x);
HermitianForm apply_phi(const ModelSpec& spec, const HermitianForm& x);

/// L(x) = phi(x) - G* x - x G.
Matrix apply_generator(const ModelSpec& spec, const Matrix& x);
HermitianForm apply_generator(const ModelSpec& spec, const HermitianForm& x);

/// phi^dagger(rho) = sum_k L_k rho L_k*, the trace dual of phi.
Matrix apply_phi_dual(const ModelSpec& spec, const Matrix& rho);

/// L^dagger(rho) = phi^dagger(rho) - G rho - rho G*, the trace dual of L.
Matrix apply_predual_generator(const ModelSpec& spec, const Matrix& rho);

/// L^dagger(|v><u|) for u, v in D. The result satisfies
/// tr(x * result) = L(x)[u, v] for every x.
/// Throws DomainError when u or v is not in span(D).
Matrix predual_generator(const ModelSpec& spec, const Vector& u,
                         const Vector& v, const Tolerances& tol = {});

/// Choi matrix sum_{ij} |i><j| (x) phi(|i><j|); positive semidefinite
/// exactly when phi is completely positive.
Matrix choi_matrix(const ModelSpec& spec);

/// The matrix of x -> L(x) acting on column-stacked vec(x), size n^2 x n^2.
Matrix generator_superoperator(const ModelSpec& spec);

}  // namespace qdslab
