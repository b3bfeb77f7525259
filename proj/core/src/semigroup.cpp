#include "qdslab/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include "detail/matrix_ode.hpp"
#include "qdslab/linalg.hpp"
#include "qdslab/operator_core.hpp"
#include "qdslab/quadrature.hpp"

namespace qdslab {
namespace {

void require_dissipative(const ModelSpec& spec, const Tolerances& tol) {
  const double lo = linalg::min_eigenvalue(spec.G() + spec.G().adjoint());
  if (lo < -tol.psd)
    throw RefusalError("-G is not dissipative: lambda_min(G + G*) = " +
                       std::to_string(lo));
}

detail::OdeOptions ode_options(const ModelSpec& spec, const Tolerances& tol) {
  detail::OdeOptions o;
  o.abs_tol = tol.ode_abs;
  o.rel_tol = tol.ode_rel;
  o.initial_dt = 0.1 / std::max(1.0, spec.rate_scale());
  return o;
}

bool is_identity(const Matrix& x) {
  return x.rows() == x.cols() &&
         (x - Matrix::Identity(x.rows(), x.cols())).cwiseAbs().maxCoeff() == 0.0;
}

double lagrange(const std::vector<double>& nodes, std::size_t m, double s) {
  double v = 1.0;
  for (std::size_t l = 0; l < nodes.size(); ++l)
    if (l != m) v *= (s - nodes[l]) / (nodes[m] - nodes[l]);
  return v;
}

// One pass of the iteration on K uniform panels with an order-p Gauss rule.
std::vector<Matrix> iterate_on_panels(const ModelSpec& spec, const Matrix& x,
                                      double t, int K, int n_max,
                                      double stall_tol) {
  const auto& rule = quad::gauss_legendre(8);
  const auto& xi = rule.nodes;
  const auto& w = rule.weights;
  const std::size_t p = xi.size();
  const double H = t / K;
  const int n = spec.dim();

  std::vector<double> d(p);
  std::vector<Matrix> wd(p);
  for (std::size_t j = 0; j < p; ++j) {
    d[j] = 0.5 * H * (1.0 + xi[j]);
    wd[j] = linalg::expm(-d[j] * spec.G());
  }
  const Matrix wh = linalg::expm(-H * spec.G());
  // W over the sub-intervals of the partial panel [t_k, t_k + d_j]
  std::vector<Matrix> wpart(p * p);
  std::vector<double> lag(p * p * p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i) {
      wpart[j * p + i] = linalg::expm(-0.5 * d[j] * (1.0 - xi[i]) * spec.G());
      const double sigma = -1.0 + 0.5 * (1.0 + xi[j]) * (1.0 + xi[i]);
      for (std::size_t m = 0; m < p; ++m)
        lag[(j * p + i) * p + m] = lagrange(xi, m, sigma);
    }

  const std::size_t total = static_cast<std::size_t>(K) * p;
  std::vector<Matrix> prev_nodes(total, Matrix::Zero(n, n));
  std::vector<Matrix> cur_nodes(total);
  std::vector<Matrix> phi_nodes(total);
  std::vector<Matrix> out;
  Matrix phi_s(n, n);

  for (int it = 1; it <= n_max; ++it) {
    for (std::size_t q = 0; q < total; ++q)
      phi_nodes[q] = it == 1 ? Matrix::Zero(n, n) : apply_phi(spec, prev_nodes[q]);
    Matrix c = x;
    for (int k = 0; k < K; ++k) {
      const Matrix* phi_panel = &phi_nodes[static_cast<std::size_t>(k) * p];
      for (std::size_t j = 0; j < p; ++j) {
        Matrix v = wd[j].adjoint() * c * wd[j];
        if (it > 1) {
          for (std::size_t i = 0; i < p; ++i) {
            phi_s.setZero();
            for (std::size_t m = 0; m < p; ++m)
              phi_s += lag[(j * p + i) * p + m] * phi_panel[m];
            const Matrix& wp = wpart[j * p + i];
            v += (0.5 * d[j] * w[i]) * (wp.adjoint() * phi_s * wp);
          }
        }
        cur_nodes[static_cast<std::size_t>(k) * p + j] = std::move(v);
      }
      Matrix next = wh.adjoint() * c * wh;
      if (it > 1)
        for (std::size_t i = 0; i < p; ++i) {
          const Matrix& wr = wd[p - 1 - i];
          next += (0.5 * H * w[i]) * (wr.adjoint() * phi_panel[i] * wr);
        }
      c = std::move(next);
    }
    c = linalg::hermitian_part(c);
    const bool stalled =
        stall_tol > 0.0 && !out.empty() && linalg::operator_norm(c - out.back()) < stall_tol;
    out.push_back(std::move(c));
    std::swap(prev_nodes, cur_nodes);
    if (stalled) break;
  }
  return out;
}

}  // namespace

Propagator propagator(const ModelSpec& spec, double t, const Tolerances& tol) {
  if (!(t >= 0.0)) throw DomainError("propagator: t must be >= 0");
  require_dissipative(spec, tol);
  return {t, linalg::expm(-t * spec.G())};
}

EvolutionResult evolve_observable(const ModelSpec& spec, const HermitianForm& x,
                                  const std::vector<double>& times,
                                  const Tolerances& tol) {
  if (x.dim() != spec.dim()) throw DimensionError("observable dimension mismatch");
  for (double t : times)
    if (!(t >= 0.0)) throw DomainError("evolve_observable: times must be >= 0");
  require_dissipative(spec, tol);

  const auto rhs = [&spec](const Matrix& m, Matrix& dm) { dm = apply_generator(spec, m); };
  const auto states = detail::integrate_matrix_ode(rhs, x.matrix(), times,
                                                   ode_options(spec, tol));
  EvolutionResult r;
  r.times = times;
  const bool unit = is_identity(x.matrix());
  // integration error is O(ode_rel), so the order bounds are judged at that scale
  Tolerances loose = tol;
  loose.psd = std::max(tol.psd, tol.ode_rel);
  loose.hermitian = std::max(tol.hermitian, tol.ode_rel);
  const Matrix id = Matrix::Identity(spec.dim(), spec.dim());
  for (const auto& s : states) {
    r.observables.push_back(HermitianForm::make(s, FormTag::observable, loose));
    if (unit) r.explosion.push_back(HermitianForm::make(id - s, FormTag::explosion, loose));
  }
  return r;
}

EvolutionResult evolve_observable(const ModelSpec& spec, const HermitianForm& x,
                                  double t, int steps, const Tolerances& tol) {
  if (!(t >= 0.0)) throw DomainError("evolve_observable: t must be >= 0");
  if (steps < 1) throw DomainError("evolve_observable: steps must be >= 1");
  std::vector<double> times(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) times[i] = t * i / steps;
  times.back() = t;
  return evolve_observable(spec, x, times, tol);
}

std::vector<HermitianForm> minimal_iteration(const ModelSpec& spec,
                                             const HermitianForm& x, double t,
                                             const IterationOptions& opts,
                                             const Tolerances& tol) {
  if (x.dim() != spec.dim()) throw DimensionError("observable dimension mismatch");
  if (!(t >= 0.0)) throw DomainError("minimal_iteration: t must be >= 0");
  if (opts.n_max < 1) throw DomainError("minimal_iteration: n_max must be >= 1");
  const double scale = std::max(1.0, linalg::operator_norm(x.matrix()));
  if (linalg::min_eigenvalue(x.matrix()) < -tol.psd * scale)
    throw RefusalError("minimal_iteration: x must be positive semidefinite");
  require_dissipative(spec, tol);

  std::vector<HermitianForm> out;
  if (t == 0.0) {
    out.assign(static_cast<std::size_t>(opts.n_max), x);
    return out;
  }
  int K = opts.initial_panels > 0
              ? opts.initial_panels
              : std::max(1, static_cast<int>(std::ceil(2.0 * spec.rate_scale() * t)));
  auto prev = iterate_on_panels(spec, x.matrix(), t, K, opts.n_max, opts.stall_tol);
  double achieved = 0.0;
  for (int r = 0; r < opts.max_refinements; ++r) {
    K *= 2;
    auto cur = iterate_on_panels(spec, x.matrix(), t, K, opts.n_max, opts.stall_tol);
    const std::size_t common = std::min(prev.size(), cur.size());
    achieved = 0.0;
    for (std::size_t i = 0; i < common; ++i)
      achieved = std::max(achieved, linalg::operator_norm(cur[i] - prev[i]));
    if (achieved < tol.quadrature * scale) {
      for (auto& m : cur) out.push_back(HermitianForm::make(m, x.tag(), tol));
      return out;
    }
    prev = std::move(cur);
  }
  throw ConvergenceError("minimal_iteration: quadrature did not converge", achieved);
}

Matrix predual_evolve(const ModelSpec& spec, const Matrix& rho, double t,
                      const Tolerances& tol) {
  if (rho.rows() != spec.dim() || rho.cols() != spec.dim())
    throw DimensionError("density matrix dimension mismatch");
  if (!(t >= 0.0)) throw DomainError("predual_evolve: t must be >= 0");
  if (linalg::hermiticity_defect(rho) > tol.hermitian ||
      linalg::min_eigenvalue(rho) < -tol.psd)
    throw RefusalError("predual_evolve: rho must be positive semidefinite");
  if (rho.trace().real() > 1.0 + tol.psd)
    throw RefusalError("predual_evolve: tr(rho) must be <= 1");
  require_dissipative(spec, tol);

  const auto rhs = [&spec](const Matrix& m, Matrix& dm) {
    dm = apply_predual_generator(spec, m);
  };
  return detail::integrate_matrix_ode(rhs, linalg::hermitian_part(rho), {t},
                                      ode_options(spec, tol))
      .front();
}

}  // namespace qdslab
