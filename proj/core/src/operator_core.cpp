#include "qdslab/operator_core.hpp"

#include <algorithm>

#include "qdslab/linalg.hpp"

namespace qdslab {
namespace {

void require_square(const ModelSpec& spec, const Matrix& x, const char* what) {
  if (x.rows() != spec.dim() || x.cols() != spec.dim())
    throw DimensionError(std::string(what) + " is " + std::to_string(x.rows()) +
                         "x" + std::to_string(x.cols()) + ", model dimension is " +
                         std::to_string(spec.dim()));
}

}  // namespace

const char* to_string(ConditionStatus s) {
  switch (s) {
    case ConditionStatus::pass: return "pass";
    case ConditionStatus::fail: return "fail";
    case ConditionStatus::grid_approximate: return "grid-approximate";
    case ConditionStatus::informational: return "informational";
  }
  return "unknown";
}

bool ValidationReport::admissible() const {
  return dissipativity == ConditionStatus::pass &&
         condition_iii == ConditionStatus::pass &&
         condition_iv != ConditionStatus::fail;
}

ValidationReport validate_model(const ModelSpec& spec, const Tolerances& tol) {
  ValidationReport r;
  const Matrix herm = spec.G() + spec.G().adjoint();
  const Matrix phi_i = spec.phi_identity();
  const Matrix l_of_i = phi_i - herm;

  r.dissipativity_residual = std::max(0.0, -linalg::min_eigenvalue(herm));
  r.condition_iii_residual = std::max(0.0, linalg::max_eigenvalue(l_of_i));
  r.condition_iii_prime_residual = linalg::operator_norm(l_of_i);

  const Matrix on_d = spec.domain().compress(l_of_i);
  r.condition_iv_residual = on_d.size() == 0 ? 0.0 : on_d.cwiseAbs().maxCoeff();

  r.dissipativity = r.dissipativity_residual <= tol.psd ? ConditionStatus::pass
                                                        : ConditionStatus::fail;
  r.condition_iii = r.condition_iii_residual <= tol.psd ? ConditionStatus::pass
                                                        : ConditionStatus::fail;
  r.condition_iii_prime = ConditionStatus::informational;
  if (r.condition_iv_residual <= tol.condition_iv)
    r.condition_iv = ConditionStatus::pass;
  else
    r.condition_iv = spec.grid_model() ? ConditionStatus::grid_approximate
                                       : ConditionStatus::fail;
  return r;
}

Matrix apply_phi(const ModelSpec& spec, const Matrix& x) {
  require_square(spec, x, "phi argument");
  Matrix out = Matrix::Zero(spec.dim(), spec.dim());
  const auto& sparse = spec.sparse_kraus();
  for (std::size_t k = 0; k < spec.kraus_ops().size(); ++k) {
    if (sparse[k].nonZeros() > 0) {
      const Matrix lx = sparse[k].adjoint() * x;
      out.noalias() += lx * sparse[k];
    } else {
      const auto& l = spec.kraus_ops()[k];
      out.noalias() += l.adjoint() * x * l;
    }
  }
  return out;
}

HermitianForm apply_phi(const ModelSpec& spec, const HermitianForm& x) {
  return HermitianForm::make(apply_phi(spec, x.matrix()), x.tag());
}

Matrix apply_generator(const ModelSpec& spec, const Matrix& x) {
  require_square(spec, x, "generator argument");
  Matrix out = apply_phi(spec, x);
  out.noalias() -= spec.G().adjoint() * x;
  out.noalias() -= x * spec.G();
  return out;
}

HermitianForm apply_generator(const ModelSpec& spec, const HermitianForm& x) {
  return HermitianForm::make(apply_generator(spec, x.matrix()), x.tag());
}

Matrix apply_phi_dual(const ModelSpec& spec, const Matrix& rho) {
  require_square(spec, rho, "phi-dual argument");
  Matrix out = Matrix::Zero(spec.dim(), spec.dim());
  const auto& sparse = spec.sparse_kraus();
  for (std::size_t k = 0; k < spec.kraus_ops().size(); ++k) {
    if (sparse[k].nonZeros() > 0) {
      const Matrix lr = sparse[k] * rho;
      out.noalias() += lr * sparse[k].adjoint();
    } else {
      const auto& l = spec.kraus_ops()[k];
      out.noalias() += l * rho * l.adjoint();
    }
  }
  return out;
}

Matrix apply_predual_generator(const ModelSpec& spec, const Matrix& rho) {
  Matrix out = apply_phi_dual(spec, rho);
  out.noalias() -= spec.G() * rho;
  out.noalias() -= rho * spec.G().adjoint();
  return out;
}

Matrix predual_generator(const ModelSpec& spec, const Vector& u,
                         const Vector& v, const Tolerances& tol) {
  if (u.size() != spec.dim() || v.size() != spec.dim())
    throw DimensionError("predual_generator: vector length mismatch");
  const double du = spec.domain().relative_distance(u);
  const double dv = spec.domain().relative_distance(v);
  if (du > tol.duality * 1e2 || dv > tol.duality * 1e2)
    throw DomainError("predual_generator: u and v must lie in span(D)");
  const Vector gu = spec.G() * u;
  const Vector gv = spec.G() * v;
  Matrix out = apply_phi_dual(spec, linalg::ket_bra(v, u));
  out -= linalg::ket_bra(v, gu);
  out -= linalg::ket_bra(gv, u);
  return out;
}

Matrix choi_matrix(const ModelSpec& spec) {
  const int n = spec.dim();
  Matrix choi = Matrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      choi.block(i * n, j * n, n, n) = apply_phi(spec, e);
    }
  return choi;
}

Matrix generator_superoperator(const ModelSpec& spec) {
  const int n = spec.dim();
  Matrix s(n * n, n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      const Matrix img = apply_generator(spec, e);
      s.col(j * n + i) = Eigen::Map<const Vector>(img.data(), n * n);
    }
  return s;
}

}  // namespace qdslab
