#pragma once

#include "qdslab/deficiency.hpp"
#include "qdslab/tau_f.hpp"

namespace qdslab {

/// A symmetric operator H given on an orthonormal domain basis, bases of the
/// deficiency spaces N_+ = ran(H + i)^perp and N_- = ran(H - i)^perp, and a
/// partial isometry V from N_+ to N_- in those bases. index_plus and
/// index_minus are the deficiency indices of the operator being modeled,
/// which decide whether an extension exists at all.
struct ExtensionSpec {
  Matrix domain;         ///< n x k, orthonormal columns spanning dom H
  Matrix image;          ///< n x k, H applied to the domain columns
  Matrix n_plus_basis;   ///< n x p
  Matrix n_minus_basis;  ///< n x q
  Matrix v;              ///< q x p; V = 0 means no extension
  int index_plus = 0;
  int index_minus = 0;
};

/// H_V(u + v + Vv) = Hu + iv - iVv on dom H + {v + Vv : v in the initial
/// space of V}.
class VonNeumannExtension {
 public:
  /// Throws RefusalError when index_plus > index_minus and DomainError when
  /// V is not a partial isometry or the bases are not deficiency vectors.
  explicit VonNeumannExtension(ExtensionSpec spec, double tol = 1e-8);

  /// H_V applied to u + v + Vv, given the coordinates of u in the domain
  /// basis and of v in the N_+ basis.
  Vector apply(const Vector& u_coords, const Vector& v_coords) const;
  /// H_V w for w in dom H_V; throws DomainError otherwise.
  Vector apply(const Vector& w) const;

  /// max |<H_V a, b> - <a, H_V b>| over the domain basis of H_V.
  double symmetry_residual() const;
  int ambient_dim() const { return static_cast<int>(spec_.domain.rows()); }
  int domain_dim() const { return static_cast<int>(dom_.cols()); }
  int rank_v() const { return rank_; }
  /// n - dim dom H_V for both signs.
  int discrete_deficiency() const { return ambient_dim() - domain_dim(); }

  const Matrix& domain_matrix() const { return dom_; }
  const Matrix& image_matrix() const { return img_; }

 private:
  ExtensionSpec spec_;
  double tol_;
  int rank_ = 0;
  Matrix initial_;  // p x r, orthonormal basis of the initial space of V
  Matrix dom_;
  Matrix img_;
};

VonNeumannExtension von_neumann_extension(const ExtensionSpec& spec);

/// Discrete tau_f (forward: -iK, adjoint: iK) on grid functions vanishing at
/// both ends, with its discrete deficiency spaces, the index data of the
/// continuum operator ((1,0) forward, (0,1) adjoint), and V a unitary
/// between the discrete deficiency bases chosen so that dom H and the graph
/// of V are independent (or V = 0 when `with_isometry` is false).
ExtensionSpec tau_f_extension_spec(const TauFModel& model, Orientation orientation,
                                   bool with_isometry = true);

}  // namespace qdslab
