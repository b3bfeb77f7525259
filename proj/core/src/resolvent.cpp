#include "qdslab/resolvent.hpp"

#include <algorithm>
#include <cmath>

#include "qdslab/linalg.hpp"
#include "qdslab/operator_core.hpp"
#include "qdslab/quadrature.hpp"
#include "qdslab/semigroup.hpp"

namespace qdslab {
namespace {

Matrix q_sylvester(const LaplaceContext& ctx, const Matrix& x) {
  return linalg::hermitian_part(ctx.solver().solve(apply_phi(ctx.spec(), x)));
}

quad::LaplaceOptions laplace_options(const LaplaceContext& ctx, double tol) {
  quad::LaplaceOptions o;
  o.lambda = ctx.lambda();
  o.rate_scale = std::max(1.0, ctx.spec().rate_scale());
  o.tol = tol;
  o.max_refinements = 8;
  return o;
}

// e^{-lambda t} weighted integral of t -> W_t* c W_t
Matrix conjugation_transform(const LaplaceContext& ctx, const Matrix& c, double tol) {
  const Matrix& g = ctx.spec().G();
  const auto eval = [&](const std::vector<double>& times) {
    std::vector<Matrix> out;
    out.reserve(times.size());
    for (double t : times) {
      const Matrix w = linalg::expm(-t * g);
      out.push_back(w.adjoint() * c * w);
    }
    return out;
  };
  const int n = ctx.spec().dim();
  return quad::laplace_transform(eval, n, n, laplace_options(ctx, tol)).value;
}

double scaled_tol(const LaplaceContext& ctx, double base, double magnitude) {
  return base * std::max(1.0, magnitude / ctx.lambda());
}

}  // namespace

LaplaceContext::LaplaceContext(ModelSpec spec, double lambda, Tolerances tol)
    : spec_(std::make_shared<const ModelSpec>(std::move(spec))),
      lambda_(lambda),
      tol_(tol) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  const double lo = linalg::min_eigenvalue(spec_->G() + spec_->G().adjoint());
  if (lo < -tol_.psd)
    throw RefusalError("-G is not dissipative: lambda_min(G + G*) = " + std::to_string(lo));
  solver_ = std::make_shared<const ShiftedLyapunovSolver>(spec_->G(), lambda_);
}

int LaplaceContext::max_terms() const noexcept {
  return std::max(10 * spec_->dim(), 50);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::conservative: return "conservative";
    case Verdict::explosive: return "explosive";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

HermitianForm q_lambda(const LaplaceContext& ctx, const HermitianForm& x, QMethod method) {
  if (x.dim() != ctx.spec().dim()) throw DimensionError("q_lambda: dimension mismatch");
  if (method == QMethod::sylvester)
    return HermitianForm::make(q_sylvester(ctx, x.matrix()), FormTag::resolvent_map_value,
                               ctx.tolerances());
  const Matrix phi = apply_phi(ctx.spec(), x.matrix());
  const double tol =
      scaled_tol(ctx, ctx.tolerances().quadrature, linalg::operator_norm(phi));
  return HermitianForm::make(linalg::hermitian_part(conjugation_transform(ctx, phi, tol)),
                             FormTag::resolvent_map_value, ctx.tolerances());
}

HermitianForm ell_lambda(const LaplaceContext& ctx) {
  const ModelSpec& s = ctx.spec();
  const Matrix rhs = -apply_generator(s, Matrix::Identity(s.dim(), s.dim()));
  const Matrix z = ctx.solver().solve(rhs) / ctx.lambda();
  return HermitianForm::make(linalg::hermitian_part(z), FormTag::laplace_form,
                             ctx.tolerances());
}

QLimitResult q_power_limit(const LaplaceContext& ctx, int max_iters, double stall_tol) {
  if (max_iters <= 0) max_iters = ctx.max_terms();
  if (stall_tol < 0.0) stall_tol = ctx.tolerances().stall;
  const int n = ctx.spec().dim();
  QLimitResult r;
  r.limit = Matrix::Identity(n, n);
  r.increment = 1.0;
  while (r.iterations < max_iters) {
    Matrix next = q_sylvester(ctx, r.limit);
    const Matrix diff = next - r.limit;
    r.limit = std::move(next);
    ++r.iterations;
    if (linalg::norm_below(diff, stall_tol) || r.iterations == max_iters) {
      r.increment = linalg::operator_norm(diff);
      r.converged = r.increment < stall_tol;
      if (r.converged) break;
    }
  }
  return r;
}

ExplosionCertificate explosion_transform(const LaplaceContext& ctx) {
  const Tolerances& tol = ctx.tolerances();
  ExplosionCertificate c;
  c.lambda = ctx.lambda();
  c.decision_threshold = tol.decision_threshold;
  c.inconclusive_floor = tol.inconclusive_floor;

  const Matrix ell = ell_lambda(ctx).matrix();
  c.ell_norm = linalg::operator_norm(ell);

  const QLimitResult ql = q_power_limit(ctx);
  c.q_limit_norm = linalg::operator_norm(ql.limit);
  c.q_limit_increment = ql.increment;
  c.q_limit_converged = ql.converged;

  Matrix sum = ql.limit / ctx.lambda();
  Matrix term = ell;
  c.series_converged = false;
  const int cap = ctx.max_terms();
  for (int k = 0; k < cap; ++k) {
    if (linalg::norm_below(term, tol.series_tail)) {
      c.series_tail = linalg::operator_norm(term);
      c.series_converged = true;
      break;
    }
    sum += term;
    ++c.series_terms_used;
    term = q_sylvester(ctx, term);
  }
  if (!c.series_converged) c.series_tail = linalg::operator_norm(term);
  c.explosion_transform = linalg::hermitian_part(sum);
  c.resolvent_gap = std::max(0.0, linalg::max_eigenvalue(c.explosion_transform));
  c.explosion_mass = ctx.lambda() * c.explosion_transform(0, 0).real();
  c.verdict = Verdict::inconclusive;
  return c;
}

ExplosionCertificate conservativity_verdict(const LaplaceContext& ctx) {
  ExplosionCertificate c = explosion_transform(ctx);
  const double source = std::max(c.ell_norm, c.q_limit_norm);
  const double thr = c.decision_threshold;
  const double floor = c.inconclusive_floor;
  if (!c.q_limit_converged || !c.series_converged) {
    c.verdict = Verdict::inconclusive;
    c.note = !c.q_limit_converged ? "power iteration Q^n(I) did not stall"
                                  : "series for E~(I) did not reach its tail tolerance";
  } else if (source > thr && c.resolvent_gap > thr) {
    c.verdict = Verdict::explosive;
    c.note = c.ell_norm > thr ? "boundary leak: l(I) != 0" : "escape: lim Q^n(I) != 0";
  } else if (source < floor && c.resolvent_gap < floor) {
    c.verdict = Verdict::conservative;
    c.note = "all certificates below the inconclusive floor";
  } else {
    c.verdict = Verdict::inconclusive;
    c.note = "certificates disagree or fall in the inconclusive band";
  }
  return c;
}

ExplosionSolutionReport verify_explosion_solution(const LaplaceContext& ctx,
                                                  const ExplosionCertificate& cert) {
  ExplosionSolutionReport r;
  r.applicable = cert.verdict == Verdict::explosive;
  if (!r.applicable) return r;
  const ModelSpec& s = ctx.spec();
  const Matrix& x = cert.explosion_transform;
  const Matrix defect = apply_generator(s, x) - ctx.lambda() * x;
  const Matrix on_d = s.domain().compress(defect);
  r.residual_on_d = on_d.size() ? on_d.cwiseAbs().maxCoeff() : 0.0;
  r.residual_full = defect.cwiseAbs().maxCoeff();
  const Matrix fp = s.domain().compress(q_sylvester(ctx, x) - x);
  r.fixed_point_on_d = fp.size() ? fp.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

Matrix resolvent_identity_quadrature(const LaplaceContext& ctx) {
  const ModelSpec& s = ctx.spec();
  const int n = s.dim();
  Tolerances fine = ctx.tolerances();
  fine.ode_abs = std::min(fine.ode_abs, 1e-12);
  fine.ode_rel = std::min(fine.ode_rel, 1e-10);
  const HermitianForm id = HermitianForm::identity(n);
  const auto eval = [&](const std::vector<double>& times) {
    std::vector<Matrix> out;
    out.reserve(times.size());
    for (const auto& f : evolve_observable(s, id, times, fine).observables)
      out.push_back(f.matrix());
    return out;
  };
  // the ODE carries O(1e-10) noise, so agreement is judged well above it
  const double tol = std::max(ctx.tolerances().quadrature, 1e-2 * ctx.tolerances().cross_method);
  return quad::laplace_transform(eval, n, n, laplace_options(ctx, tol / ctx.lambda())).value;
}

Matrix first_iterate_quadrature(const LaplaceContext& ctx) {
  const int n = ctx.spec().dim();
  const Matrix& g = ctx.spec().G();
  const auto eval = [&](const std::vector<double>& times) {
    std::vector<Matrix> out;
    out.reserve(times.size());
    for (double t : times) {
      const Matrix w = linalg::expm(-t * g);
      out.push_back(Matrix::Identity(n, n) - w.adjoint() * w);
    }
    return out;
  };
  const double tol = scaled_tol(ctx, ctx.tolerances().quadrature, 1.0);
  return quad::laplace_transform(eval, n, n, laplace_options(ctx, tol)).value;
}

}  // namespace qdslab
