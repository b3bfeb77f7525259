#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qdslab/linalg.hpp"
#include "qdslab/operator_core.hpp"
#include "qdslab/resolvent.hpp"

namespace qdslab {
namespace {

constexpr int kMaxDim = 32;

// Frobenius-isometric coordinates on n x n Hermitian matrices: diagonal
// entries, then sqrt(2) Re and sqrt(2) Im of each strict upper entry.
RealVector to_real(const Matrix& h) {
  const Eigen::Index n = h.rows();
  RealVector v(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) v(k++) = h(i, i).real();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      v(k++) = std::sqrt(2.0) * h(i, j).real();
      v(k++) = std::sqrt(2.0) * h(i, j).imag();
    }
  return v;
}

Matrix from_real(const RealVector& v, Eigen::Index n) {
  Matrix h = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = v(k++);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const cplx z(s * v(k), s * v(k + 1));
      k += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  return h;
}

struct PsdSearch {
  bool found = false;
  bool excluded = false;  // certified that no nonzero PSD element exists
  Matrix element;
  double min_eigenvalue = 0.0;
  std::string method;
};

// Looks for X in span(basis) with X >= 0 and tr X = 1.
PsdSearch search_psd(const RealMatrix& basis, Eigen::Index n) {
  PsdSearch s;
  const Eigen::Index k = basis.cols();
  if (k == 0) {
    s.excluded = true;
    s.method = "empty annihilator";
    return s;
  }
  const RealVector id = to_real(Matrix::Identity(n, n));
  const RealVector trace_coeffs = basis.transpose() * id;  // tr(B_i)
  const double tnorm = trace_coeffs.norm();
  if (tnorm < 1e-12) {
    s.excluded = true;
    s.method = "trace vanishes on the annihilator";
    return s;
  }
  // dual certificate: the component of I orthogonal to the annihilator
  const RealVector perp = id - basis * trace_coeffs;
  if (linalg::min_eigenvalue(from_real(perp, n)) > 1e-10) {
    s.excluded = true;
    s.method = "positive definite element of the orthogonal complement";
    return s;
  }
  // alternating projections between {X in span, tr X = 1} and the PSD cone
  const RealVector a = trace_coeffs / (tnorm * tnorm);  // minimum-norm point with tr = 1
  auto project_affine = [&](const RealVector& y) {
    RealVector c = basis.transpose() * y;
    c += (1.0 - trace_coeffs.dot(c)) * trace_coeffs / (tnorm * tnorm);
    return c;
  };
  // a shifted cone first so that an interior point is hit in finitely many steps
  for (double shift : {1e-6 / static_cast<double>(n), 0.0}) {
    RealVector c = a;
    for (int it = 0; it < 5000; ++it) {
      const Matrix x = from_real(basis * c, n);
      const double lo = linalg::min_eigenvalue(x);
      if (lo >= -1e-12) {
        s.found = true;
        s.element = x;
        s.min_eigenvalue = lo;
        s.method = "alternating projections";
        return s;
      }
      Eigen::SelfAdjointEigenSolver<Matrix> es(x);
      const RealVector ev = es.eigenvalues().cwiseMax(shift);
      const Matrix proj = es.eigenvectors() * ev.cast<cplx>().asDiagonal() *
                          es.eigenvectors().adjoint();
      c = project_affine(to_real(proj));
    }
  }
  s.method = "alternating projections did not converge";
  return s;
}

}  // namespace

AnnihilatorResult predual_annihilator_check(const LaplaceContext& ctx) {
  const ModelSpec& spec = ctx.spec();
  const Eigen::Index n = spec.dim();
  const Eigen::Index d = spec.domain().dim();
  if (n > kMaxDim)
    throw RefusalError("annihilator check is limited to dim <= " + std::to_string(kMaxDim));
  if (d == 0) throw DomainError("annihilator check needs a nontrivial D");

  AnnihilatorResult r;
  r.unknowns = static_cast<int>(n * n);
  r.constraints = static_cast<int>(d * d);
  RealMatrix a(d * d, n * n);
  for (Eigen::Index j = 0; j < n * n; ++j) {
    RealVector e = RealVector::Zero(n * n);
    e(j) = 1.0;
    const Matrix x = from_real(e, n);
    const Matrix img = ctx.lambda() * x - apply_generator(spec, x);
    a.col(j) = to_real(linalg::hermitian_part(spec.domain().compress(img)));
  }

  Eigen::BDCSVD<RealMatrix> svd(a, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double rel = ctx.tolerances().annihilator_rank;
  r.rank_threshold = rel * std::max(smax, 1e-300);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > r.rank_threshold) ++rank;
  r.smallest_kept = rank > 0 ? sv(rank - 1) : 0.0;
  r.largest_dropped = rank < sv.size() ? sv(rank) : 0.0;
  // a two-decade gap on each side of the threshold is required
  r.ambiguous_rank = (rank > 0 && r.smallest_kept < 1e2 * r.rank_threshold) ||
                     (r.largest_dropped > 1e-2 * r.rank_threshold);
  r.dimension = static_cast<int>(n * n - rank);

  const RealMatrix basis = svd.matrixV().rightCols(n * n - rank);
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(basis.cols(), 3); ++i)
    r.basis_sample.push_back(from_real(basis.col(i), n));

  const PsdSearch ps = search_psd(basis, n);
  r.has_psd_element = ps.found;
  r.psd_method = ps.method;
  if (ps.found) {
    r.psd_element = ps.element;
    r.psd_min_eigenvalue = ps.min_eigenvalue;
  }
  r.inconclusive = r.ambiguous_rank || (!ps.found && !ps.excluded);
  return r;
}

}  // namespace qdslab
