#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "qdslab/types.hpp"

namespace qdslab {

/// Finite truncation of the underlying Hilbert space.
class TruncatedSpace {
 public:
  explicit TruncatedSpace(int dim, std::vector<std::string> labels = {});

  int dim() const noexcept { return dim_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  int dim_;
  std::vector<std::string> labels_;
};

/// The distinguished subspace D. Axis-aligned subspaces keep their basis
/// indices so that compressions reduce to submatrix extraction.
class Subspace {
 public:
  static Subspace full(int dim);
  static Subspace from_indices(int dim, std::vector<int> indices);
  /// Columns are orthonormalized; a rank-deficient input is rejected.
  static Subspace from_basis(const Matrix& columns);

  int ambient_dim() const noexcept { return ambient_dim_; }
  int dim() const noexcept { return static_cast<int>(basis_.cols()); }
  bool axis_aligned() const noexcept { return indices_.has_value(); }
  const std::vector<int>& indices() const;
  const Matrix& basis() const noexcept { return basis_; }

  /// Distance from v to the subspace relative to ||v||.
  double relative_distance(const Vector& v) const;

  /// B* M B for the orthonormal basis B.
  Matrix compress(const Matrix& m) const;

 private:
  Subspace(int ambient, Matrix basis, std::optional<std::vector<int>> idx)
      : ambient_dim_(ambient), basis_(std::move(basis)), indices_(std::move(idx)) {}

  int ambient_dim_;
  Matrix basis_;
  std::optional<std::vector<int>> indices_;
};

/// A truncated formal generator L(x) = phi(x) - G* x - x G with
/// phi(x) = sum_k L_k* x L_k, together with the subspace D.
class ModelSpec {
 public:
  ModelSpec(TruncatedSpace space, Matrix g, std::vector<Matrix> kraus_ops,
            Subspace domain, std::string name);

  int dim() const noexcept { return space_.dim(); }
  const TruncatedSpace& space() const noexcept { return space_; }
  const Matrix& G() const noexcept { return g_; }
  const std::vector<Matrix>& kraus_ops() const noexcept { return kraus_; }
  /// Sparse copies of the Kraus operators that are mostly zero; an empty
  /// matrix marks an operator kept dense.
  const std::vector<Eigen::SparseMatrix<cplx>>& sparse_kraus() const noexcept {
    return sparse_kraus_;
  }
  const Subspace& domain() const noexcept { return domain_; }
  const std::string& name() const noexcept { return name_; }

  /// Marks a model assembled from a grid discretization; condition (iv)
  /// violations are then reported as grid-approximate rather than failures.
  bool grid_model() const noexcept { return grid_model_; }
  ModelSpec& set_grid_model(bool v) {
    grid_model_ = v;
    return *this;
  }

  /// sum_k L_k* L_k
  Matrix phi_identity() const;

  /// A rate scale ||G|| + ||phi(I)|| used to size time steps and panels.
  double rate_scale() const;

 private:
  TruncatedSpace space_;
  Matrix g_;
  std::vector<Matrix> kraus_;
  std::vector<Eigen::SparseMatrix<cplx>> sparse_kraus_;
  Subspace domain_;
  std::string name_;
  bool grid_model_ = false;
};

enum class FormTag { observable, explosion, resolvent_map_value, laplace_form };

const char* to_string(FormTag tag);

/// A Hermitian matrix standing for a bounded sesquilinear form. The stored
/// matrix is exactly Hermitian (symmetrized on construction).
class HermitianForm {
 public:
  /// Rejects inputs whose anti-Hermitian part exceeds tol. Explosion forms
  /// must also satisfy 0 <= x <= I within psd_tol.
  static HermitianForm make(const Matrix& m, FormTag tag,
                            const Tolerances& tol = {});
  static HermitianForm identity(int dim, FormTag tag = FormTag::observable);

  const Matrix& matrix() const noexcept { return m_; }
  FormTag tag() const noexcept { return tag_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

 private:
  HermitianForm(Matrix m, FormTag tag) : m_(std::move(m)), tag_(tag) {}
  Matrix m_;
  FormTag tag_;
};

}  // namespace qdslab
