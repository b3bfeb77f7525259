#include "qdslab/deficiency.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "qdslab/catalog.hpp"
#include "qdslab/quadrature.hpp"

namespace qdslab {
namespace {

// log of int_0^X exp(h(x)) dx for increasing h, summed on panels that are
// geometrically graded towards X so the boundary layer at X is resolved.
double log_partial_norm(const std::function<double(double)>& h, double X) {
  const double hx = h(X);
  double total = 0.0;
  double right = X;
  double width = std::min(1.0, X);
  while (right > 0.0) {
    const double left = std::max(0.0, right - width);
    total += quad::integrate([&](double x) { return std::exp(h(x) - hx); }, left, right, 1e-12);
    right = left;
    width *= 2.0;
  }
  return hx + std::log(total);
}

struct Kernel {
  Matrix basis;        // orthonormal kernel basis
  Matrix interior;     // part of the kernel with mass in the first half
  double smallest_sv = 0.0;
};

Kernel kernel_with_interior(const Matrix& a) {
  const Eigen::Index n = a.cols();
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double thr = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++rank;
  Kernel k;
  k.smallest_sv = sv.size() ? sv(sv.size() - 1) : 0.0;
  k.basis = svd.matrixV().rightCols(n - rank);
  const Eigen::Index half = (n + 1) / 2;
  if (k.basis.cols() == 0) {
    k.interior = Matrix(n, 0);
    return k;
  }
  const Matrix top = k.basis.topRows(half);
  Eigen::JacobiSVD<Matrix> s2(top, Eigen::ComputeFullV);
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < s2.singularValues().size(); ++i)
    if (s2.singularValues()(i) > 1e-6) ++count;
  k.interior = k.basis * s2.matrixV().leftCols(count);
  return k;
}

}  // namespace

const char* to_string(Orientation o) {
  return o == Orientation::forward ? "forward" : "adjoint";
}

const char* to_string(TailClass t) {
  return t == TailClass::square_integrable ? "square_integrable" : "divergent";
}

const char* to_string(IsometryVerdict v) {
  return v == IsometryVerdict::extends_to_isometry_generator ? "extends_to_isometry_generator"
                                                             : "does_not";
}

DeficiencyVectors deficiency_vectors_tau_f(const TauFModel& model) {
  model.validate();
  DeficiencyVectors r;
  r.x = model.grid;
  const Eigen::Index n = static_cast<Eigen::Index>(model.grid.size());
  r.u_plus.resize(n);
  r.u_minus.resize(n);
  std::vector<double> integral(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = model.grid[j];
    const double f = model.f(x);
    integral[j] = model.f.inverse_integral(x);
    r.u_plus(j) = model.c1 * std::exp(-integral[j]) / std::sqrt(f);
    r.u_minus(j) = model.c1 * std::exp(integral[j]) / std::sqrt(f);
  }
  // f^{1/2} (f^{1/2} u)' = -u for u_+ and +u for u_-, relative to |u_j|
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    const double h = model.grid[j + 1] - model.grid[j];
    const double f = model.f(model.grid[j]);
    const double di = integral[j + 1] - integral[j];
    r.residual_plus = std::max(r.residual_plus, std::abs(f * std::expm1(-di) / h + 1.0));
    r.residual_minus = std::max(r.residual_minus, std::abs(f * std::expm1(di) / h - 1.0));
  }
  const double worst = std::max(r.residual_plus, r.residual_minus);
  if (worst > kMaxDeficiencyResidual)
    throw ConvergenceError("deficiency vectors: grid too coarse, relative ODE residual " +
                               std::to_string(worst),
                           worst);
  return r;
}

DeficiencyResult deficiency_indices_tau_f(const TauFModel& model) {
  DeficiencyResult r;
  r.vectors = deficiency_vectors_tau_f(model);
  r.divergence_integral = model.divergence_integral();
  r.derivative_bound = model.derivative_bound();
  const PositiveFunction& f = model.f;
  const double c2 = model.c1 * model.c1;

  // ||u_+||^2 on doubling panels until the integrand is negligible
  const auto plus = [&](double x) { return c2 * std::exp(-2.0 * f.inverse_integral(x)) / f(x); };
  double a = 0.0, b = 1.0, sum = 0.0;
  for (;;) {
    sum += quad::integrate(plus, a, b);
    if (plus(b) * b < 1e-12 || b > 1e15) break;
    a = b;
    b *= 2.0;
  }
  r.norm_plus = sum;
  r.norm_plus_cutoff = b;
  r.norm_plus_expected = 0.5 * c2;
  r.norm_plus_extrapolated = b > f.domain_end();
  r.tail_plus = TailClass::square_integrable;

  // doubling protocol for u_-
  const auto h = [&](double x) { return std::log(c2) - std::log(f(x)) + 2.0 * f.inverse_integral(x); };
  const double x0 = std::max(model.grid.back(), 1.0);
  for (int k = 0; k <= 3; ++k) {
    const double X = x0 * std::ldexp(1.0, k);
    r.minus_partial_norms.push_back({X, log_partial_norm(h, X)});
  }
  bool growing = true, settled = true;
  for (std::size_t k = 1; k < r.minus_partial_norms.size(); ++k) {
    const double d = r.minus_partial_norms[k].log_value - r.minus_partial_norms[k - 1].log_value;
    r.minus_doubling_ratios.push_back(d > 690.0 ? 1e300 : std::exp(d));
    growing = growing && d > std::log(1.05);
    settled = settled && d < 1e-6;
  }
  const bool non_decaying = h(r.minus_partial_norms.back().x) >= h(r.minus_partial_norms.front().x);
  if (growing && non_decaying) {
    r.tail_minus = TailClass::divergent;
  } else if (settled && !non_decaying) {
    r.tail_minus = TailClass::square_integrable;
  } else {
    throw InconclusiveError("u_- tail classification is unstable under grid doubling");
  }
  r.n_plus = r.tail_plus == TailClass::square_integrable ? 1 : 0;
  r.n_minus = r.tail_minus == TailClass::square_integrable ? 1 : 0;
  return r;
}

Matrix IsometrySpec::matrix(int dimension) const {
  if (explicit_matrix) return *explicit_matrix;
  if (m < 1) throw DomainError("shift offset m must be >= 1");
  if (dimension <= 2 * m) throw DimensionError("shift isometry needs dim > 2m");
  Matrix v = Matrix::Zero(dimension, dimension);
  for (int k = 0; k + m < dimension; ++k) v(k + m, k) = weight ? weight(k) : cplx(1.0);
  return v;
}

void IsometrySpec::validate() const {
  const Matrix v = matrix();
  if (v.rows() != v.cols()) throw DimensionError("isometry matrix must be square");
  const Matrix gram = v.adjoint() * v;
  for (Eigen::Index j = 0; j < gram.cols(); ++j)
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
      const double want = (i == j && std::abs(gram(j, j)) > 0.5) ? 1.0 : 0.0;
      if (std::abs(gram(i, j) - want) > 1e-12)
        throw DomainError("V is not isometric on its domain (column " + std::to_string(j) + ")");
    }
}

CayleyResult cayley_deficiency_from_isometry(const IsometrySpec& iso) {
  iso.validate();
  CayleyResult r;
  r.dims = iso.explicit_matrix ? std::vector<int>{static_cast<int>(iso.explicit_matrix->rows())}
                               : std::vector<int>{iso.dim, 2 * iso.dim};
  for (std::size_t i = 0; i < r.dims.size(); ++i) {
    const Matrix v = iso.matrix(r.dims[i]);
    const Matrix id = Matrix::Identity(v.rows(), v.cols());
    const Kernel range = kernel_with_interior((id - v).adjoint());
    if (range.interior.cols() > 0)
      throw RefusalError("range of I - V is not dense: (I - V)* has a kernel");
    const Kernel dom = kernel_with_interior(v);
    const Kernel co = kernel_with_interior(v.adjoint());
    r.n_plus_by_dim.push_back(static_cast<int>(dom.interior.cols()));
    r.n_minus_by_dim.push_back(static_cast<int>(co.interior.cols()));
    if (i == 0) {
      r.n_minus_basis = co.interior;
      r.range_margin = range.smallest_sv;
    }
  }
  r.n_plus = r.n_plus_by_dim.front();
  r.n_minus = r.n_minus_by_dim.front();
  for (std::size_t i = 1; i < r.dims.size(); ++i)
    if (r.n_plus_by_dim[i] != r.n_plus || r.n_minus_by_dim[i] != r.n_minus) r.stabilized = false;
  if (!r.stabilized)
    throw InconclusiveError("Cayley deficiency indices change between truncations");
  return r;
}

IsometryVerdict isometric_restriction_verdict(int n_plus, int n_minus) {
  if (n_plus < 0 || n_minus < 0) throw DomainError("deficiency indices must be >= 0");
  return n_plus <= n_minus ? IsometryVerdict::extends_to_isometry_generator
                           : IsometryVerdict::does_not;
}

RealVector prop42_residuals(const ModelSpec& spec, const Vector& w) {
  if (w.size() != spec.dim()) throw DimensionError("vector length mismatch");
  // L(ww*) = sum_k (L_k* w)(L_k* w)* - (G* w) w* - w (G* w)*
  const Matrix& b = spec.domain().basis();
  const Vector gw = spec.G().adjoint() * w;
  const Vector bw = b.adjoint() * w;
  const Vector bg = b.adjoint() * gw;
  RealVector lhs = -2.0 * (bg.array() * bw.conjugate().array()).real();
  for (const auto& l : spec.kraus_ops()) {
    const Vector a = b.adjoint() * (l.adjoint() * w);
    lhs += a.cwiseAbs2();
  }
  return (lhs - 2.0 * bw.cwiseAbs2()).cwiseAbs();
}

Prop42Report prop42_certificate(const TauFModel& model, Orientation orientation) {
  if (orientation == Orientation::adjoint)
    throw RefusalError("n_+ = 0 for the adjoint orientation; the certificate needs u in N_+");
  model.validate();
  Prop42Report rep;
  std::vector<double> grid = model.grid;
  for (int level = 0; level < 2; ++level) {
    TauFModel m = model;
    m.grid = grid;
    const ModelSpec spec = build_tau_f_transport(m, Orientation::forward);
    const DeficiencyVectors dv = deficiency_vectors_tau_f(m);
    const RealVector mu = grid_weights(grid);
    Vector w = (mu.cwiseSqrt().cwiseProduct(dv.u_plus)).cast<cplx>();
    w /= w.norm();
    const RealVector res = prop42_residuals(spec, w);
    rep.levels.push_back({m.intervals(), res.maxCoeff(), res(res.size() - 1)});
    grid = refine_grid(grid);
  }
  const double r0 = rep.levels[0].max_residual;
  const double r1 = rep.levels[1].max_residual;
  rep.order = (r0 > 0.0 && r1 > 0.0) ? std::log2(r0 / r1) : 0.0;
  return rep;
}

}  // namespace qdslab
