#include "qdslab/extension.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "qdslab/catalog.hpp"
#include "qdslab/linalg.hpp"

namespace qdslab {
namespace {

const cplx I1(0.0, 1.0);

Matrix orthogonal_complement(const Matrix& a) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(1e-12);
  const Eigen::Index rank = qr.rank();
  const Matrix q = qr.householderQ();
  return q.rightCols(a.rows() - rank);
}

}  // namespace

VonNeumannExtension::VonNeumannExtension(ExtensionSpec spec, double tol)
    : spec_(std::move(spec)), tol_(tol) {
  const auto& s = spec_;
  if (s.index_plus > s.index_minus)
    throw RefusalError("n_+ > n_-: no isometry from N_+ into N_- exists, so there is no extension");
  const Eigen::Index n = s.domain.rows();
  if (s.image.rows() != n || s.image.cols() != s.domain.cols() || s.n_plus_basis.rows() != n ||
      s.n_minus_basis.rows() != n || s.v.rows() != s.n_minus_basis.cols() ||
      s.v.cols() != s.n_plus_basis.cols())
    throw DimensionError("extension data shapes are inconsistent");

  const double scale = std::max(1.0, s.image.size() ? linalg::operator_norm(s.image) : 0.0);
  if (s.n_plus_basis.cols() > 0 &&
      (s.n_plus_basis.adjoint() * (s.image + I1 * s.domain)).cwiseAbs().maxCoeff() > tol_ * scale)
    throw DomainError("N_+ basis is not orthogonal to ran(H + i)");
  if (s.n_minus_basis.cols() > 0 &&
      (s.n_minus_basis.adjoint() * (s.image - I1 * s.domain)).cwiseAbs().maxCoeff() > tol_ * scale)
    throw DomainError("N_- basis is not orthogonal to ran(H - i)");

  // V*V must be an orthogonal projection
  const Matrix p = s.v.adjoint() * s.v;
  if (p.size() && (p * p - p).cwiseAbs().maxCoeff() > tol_)
    throw DomainError("V is not a partial isometry");
  if (p.size()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::hermitian_part(p));
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
    initial_.resize(p.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) initial_.col(c) = es.eigenvectors().col(keep[c]);
  } else {
    initial_.resize(s.v.cols(), 0);
  }
  rank_ = static_cast<int>(initial_.cols());

  const Matrix vplus = s.n_plus_basis * initial_;
  const Matrix vminus = s.n_minus_basis * (s.v * initial_);
  dom_.resize(n, s.domain.cols() + rank_);
  img_.resize(n, s.domain.cols() + rank_);
  dom_ << s.domain, vplus + vminus;
  img_ << s.image, I1 * vplus - I1 * vminus;

  Eigen::BDCSVD<Matrix> svd(dom_);
  const auto& sv = svd.singularValues();
  if (sv.size() && sv(sv.size() - 1) < 1e-10 * sv(0))
    throw DomainError("dom H and the graph of V are not independent");
}

Vector VonNeumannExtension::apply(const Vector& u_coords, const Vector& v_coords) const {
  if (u_coords.size() != spec_.domain.cols() || v_coords.size() != spec_.n_plus_basis.cols())
    throw DimensionError("coordinate vector length mismatch");
  // components of v outside the initial space of V are not in dom H_V
  const Vector vin = initial_ * (initial_.adjoint() * v_coords);
  if ((v_coords - vin).norm() > tol_ * std::max(1.0, v_coords.norm()))
    throw DomainError("v is outside the initial space of V");
  const Vector vp = spec_.n_plus_basis * vin;
  const Vector vm = spec_.n_minus_basis * (spec_.v * vin);
  return spec_.image * u_coords + I1 * vp - I1 * vm;
}

Vector VonNeumannExtension::apply(const Vector& w) const {
  if (w.size() != dom_.rows()) throw DimensionError("vector length mismatch");
  const Vector c = dom_.colPivHouseholderQr().solve(w);
  if ((dom_ * c - w).norm() > tol_ * std::max(1.0, w.norm()))
    throw DomainError("vector is not in dom H_V");
  return img_ * c;
}

double VonNeumannExtension::symmetry_residual() const {
  const Matrix a = img_.adjoint() * dom_;
  const Matrix b = dom_.adjoint() * img_;
  return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0;
}

VonNeumannExtension von_neumann_extension(const ExtensionSpec& spec) {
  return VonNeumannExtension(spec);
}

ExtensionSpec tau_f_extension_spec(const TauFModel& model, Orientation orientation,
                                   bool with_isometry) {
  const RealMatrix k = tau_f_skew_operator(model);
  const Eigen::Index n = k.rows();
  const Matrix a = (orientation == Orientation::forward ? -I1 : I1) * k.cast<cplx>();
  ExtensionSpec s;
  s.domain = Matrix::Zero(n, n - 2);
  for (Eigen::Index j = 1; j + 1 < n; ++j) s.domain(j, j - 1) = 1.0;
  s.image = a * s.domain;
  s.n_plus_basis = orthogonal_complement(s.image + I1 * s.domain);
  s.n_minus_basis = orthogonal_complement(s.image - I1 * s.domain);
  s.index_plus = orientation == Orientation::forward ? 1 : 0;
  s.index_minus = orientation == Orientation::forward ? 0 : 1;
  s.v = Matrix::Zero(s.n_minus_basis.cols(), s.n_plus_basis.cols());
  if (with_isometry && s.v.rows() == s.v.cols() && s.v.rows() > 0) {
    // the graph of V must meet dom H trivially: pick the unitary that keeps
    // the boundary components of v + Vv best conditioned
    Matrix edge(2, n);
    edge.setZero();
    edge(0, 0) = 1.0;
    edge(1, n - 1) = 1.0;
    const Matrix x = edge * s.n_plus_basis;
    const Matrix y = edge * s.n_minus_basis;
    const Eigen::Index r = s.v.rows();
    std::vector<Matrix> candidates;
    Eigen::JacobiSVD<Matrix> polar(y.adjoint() * x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    candidates.push_back(polar.matrixU() * polar.matrixV().adjoint());
    candidates.push_back(Matrix::Identity(r, r));
    candidates.push_back(-Matrix::Identity(r, r));
    Matrix flip = Matrix::Identity(r, r);
    flip(0, 0) = -1.0;
    candidates.push_back(flip);
    double best = -1.0;
    for (const auto& c : candidates) {
      Eigen::JacobiSVD<Matrix> sv(x + y * c);
      const double lo = sv.singularValues()(sv.singularValues().size() - 1);
      if (lo > best) {
        best = lo;
        s.v = c;
      }
    }
  }
  return s;
}

}  // namespace qdslab
