#pragma once

#include "qdslab/types.hpp"

namespace qdslab::linalg {

/// (M + M*) / 2
Matrix hermitian_part(const Matrix& m);

/// Eigenvalues of the Hermitian part of m, ascending.
RealVector hermitian_eigenvalues(const Matrix& m);

double min_eigenvalue(const Matrix& m);
double max_eigenvalue(const Matrix& m);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Whether ||m|| < bound, deciding from the Frobenius and sqrt(||m||_1 ||m||_inf)
/// bounds when they suffice and from the exact norm otherwise.
bool norm_below(const Matrix& m, double bound);

/// Operator norm of the Hermitian part (largest |eigenvalue|).
double hermitian_norm(const Matrix& m);

/// ||M - M*|| in operator norm.
double hermiticity_defect(const Matrix& m);

bool is_psd(const Matrix& m, double tol);

/// exp(A) by Pade scaling and squaring.
Matrix expm(const Matrix& a);

/// Orthonormal basis for the span of the columns of m (rank decided with tol).
Matrix orthonormal_columns(const Matrix& m, double tol = 1e-12);

/// Projection of the Hermitian part of m onto the positive semidefinite cone.
Matrix psd_projection(const Matrix& m);

/// |v><u| as a matrix: (|v><u|) w = <u, w> v.
Matrix ket_bra(const Vector& v, const Vector& u);

}  // namespace qdslab::linalg
