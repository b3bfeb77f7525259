#include "qdslab/model.hpp"

#include <algorithm>
#include <set>

#include "qdslab/linalg.hpp"

namespace qdslab {

TruncatedSpace::TruncatedSpace(int dim, std::vector<std::string> labels)
    : dim_(dim), labels_(std::move(labels)) {
  if (dim < 1) throw DimensionError("truncated space needs dim >= 1");
  if (!labels_.empty() && static_cast<int>(labels_.size()) != dim)
    throw DimensionError("basis_labels length " +
                         std::to_string(labels_.size()) +
                         " does not match dim " + std::to_string(dim));
}

Subspace Subspace::full(int dim) {
  std::vector<int> idx(dim);
  for (int i = 0; i < dim; ++i) idx[i] = i;
  return from_indices(dim, std::move(idx));
}

Subspace Subspace::from_indices(int dim, std::vector<int> indices) {
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
    throw DimensionError("domain index list has duplicates");
  for (int i : indices)
    if (i < 0 || i >= dim)
      throw DimensionError("domain index " + std::to_string(i) +
                           " outside [0, " + std::to_string(dim) + ")");
  Matrix b = Matrix::Zero(dim, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) b(indices[c], c) = 1.0;
  return Subspace(dim, std::move(b), std::move(indices));
}

Subspace Subspace::from_basis(const Matrix& columns) {
  Matrix q = linalg::orthonormal_columns(columns);
  if (q.cols() != columns.cols())
    throw DimensionError("domain basis columns are linearly dependent");
  return Subspace(static_cast<int>(columns.rows()), std::move(q), std::nullopt);
}

const std::vector<int>& Subspace::indices() const {
  if (!indices_) throw DomainError("subspace is not axis-aligned");
  return *indices_;
}

double Subspace::relative_distance(const Vector& v) const {
  if (v.size() != ambient_dim_)
    throw DimensionError("vector length does not match ambient dimension");
  const double nv = v.norm();
  if (nv == 0.0) return 0.0;
  const Vector r = v - basis_ * (basis_.adjoint() * v);
  return r.norm() / nv;
}

Matrix Subspace::compress(const Matrix& m) const {
  if (indices_) {
    const auto& idx = *indices_;
    const Eigen::Index d = static_cast<Eigen::Index>(idx.size());
    Matrix out(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) out(i, j) = m(idx[i], idx[j]);
    return out;
  }
  return basis_.adjoint() * m * basis_;
}

ModelSpec::ModelSpec(TruncatedSpace space, Matrix g,
                     std::vector<Matrix> kraus_ops, Subspace domain,
                     std::string name)
    : space_(std::move(space)),
      g_(std::move(g)),
      kraus_(std::move(kraus_ops)),
      domain_(std::move(domain)),
      name_(std::move(name)) {
  const int n = space_.dim();
  if (g_.rows() != n || g_.cols() != n)
    throw DimensionError("G is " + std::to_string(g_.rows()) + "x" +
                         std::to_string(g_.cols()) + ", expected " +
                         std::to_string(n) + "x" + std::to_string(n));
  for (std::size_t k = 0; k < kraus_.size(); ++k)
    if (kraus_[k].rows() != n || kraus_[k].cols() != n)
      throw DimensionError("Kraus operator " + std::to_string(k) +
                           " has wrong shape");
  if (domain_.ambient_dim() != n)
    throw DimensionError("domain D lives in dimension " +
                         std::to_string(domain_.ambient_dim()) +
                         ", model has " + std::to_string(n));
  sparse_kraus_.resize(kraus_.size());
  for (std::size_t k = 0; k < kraus_.size(); ++k) {
    const Eigen::Index nnz = (kraus_[k].array() != cplx(0.0)).count();
    if (n >= 16 && nnz * 8 <= static_cast<Eigen::Index>(n) * n)
      sparse_kraus_[k] = kraus_[k].sparseView();
  }
}

Matrix ModelSpec::phi_identity() const {
  Matrix s = Matrix::Zero(dim(), dim());
  for (const auto& l : kraus_) s.noalias() += l.adjoint() * l;
  return s;
}

double ModelSpec::rate_scale() const {
  return linalg::operator_norm(g_) + linalg::hermitian_norm(phi_identity());
}

const char* to_string(FormTag tag) {
  switch (tag) {
    case FormTag::observable: return "observable";
    case FormTag::explosion: return "explosion";
    case FormTag::resolvent_map_value: return "resolvent_map_value";
    case FormTag::laplace_form: return "laplace_form";
  }
  return "unknown";
}

HermitianForm HermitianForm::make(const Matrix& m, FormTag tag,
                                  const Tolerances& tol) {
  if (m.rows() != m.cols()) throw DimensionError("form matrix must be square");
  const double scale = std::max(1.0, linalg::operator_norm(m));
  const double defect = linalg::hermiticity_defect(m);
  if (defect > tol.hermitian * scale)
    throw DomainError("matrix is not Hermitian (defect " +
                      std::to_string(defect) + ")");
  Matrix h = linalg::hermitian_part(m);
  if (tag == FormTag::explosion) {
    const RealVector ev = linalg::hermitian_eigenvalues(h);
    if (ev.size() > 0 && (ev(0) < -tol.psd || ev(ev.size() - 1) > 1.0 + tol.psd))
      throw DomainError("explosion form must satisfy 0 <= E <= I");
  }
  return HermitianForm(std::move(h), tag);
}

HermitianForm HermitianForm::identity(int dim, FormTag tag) {
  return HermitianForm(Matrix::Identity(dim, dim), tag);
}

}  // namespace qdslab
