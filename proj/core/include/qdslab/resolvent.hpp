#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qdslab/lyapunov.hpp"
#include "qdslab/model.hpp"

namespace qdslab {

/// A model together with a Laplace parameter lambda > 0. The Schur
/// factorization used by every Sylvester solve is computed once here, so a
/// context is cheap to share and immutable after construction.
class LaplaceContext {
 public:
  LaplaceContext(ModelSpec spec, double lambda, Tolerances tol = {});

  double lambda() const noexcept { return lambda_; }
  const ModelSpec& spec() const noexcept { return *spec_; }
  const Tolerances& tolerances() const noexcept { return tol_; }
  const ShiftedLyapunovSolver& solver() const noexcept { return *solver_; }

  /// Cap on series terms and power iterations: max(10 * dim, 50).
  int max_terms() const noexcept;

 private:
  std::shared_ptr<const ModelSpec> spec_;
  double lambda_;
  Tolerances tol_;
  std::shared_ptr<const ShiftedLyapunovSolver> solver_;
};

enum class QMethod { sylvester, quadrature };
enum class Verdict { conservative, explosive, inconclusive };

const char* to_string(Verdict v);

/// Q_lambda(x) = int_0^inf e^{-lambda t} W_t* phi(x) W_t dt.
HermitianForm q_lambda(const LaplaceContext& ctx, const HermitianForm& x,
                       QMethod method = QMethod::sylvester);

/// l_lambda(I) = Z / lambda with lambda Z + G* Z + Z G = -L(I).
HermitianForm ell_lambda(const LaplaceContext& ctx);

struct QLimitResult {
  Matrix limit;            ///< last iterate Q^n(I)
  double increment = 0.0;  ///< ||Q^n(I) - Q^(n-1)(I)||
  int iterations = 0;
  bool converged = false;
};

/// Iterates Y <- Q_lambda(Y) from Y = I until the increment drops below
/// stall_tol. Non-convergence is flagged, not thrown.
/// max_iters <= 0 uses ctx.max_terms(); stall_tol < 0 uses tol.stall.
QLimitResult q_power_limit(const LaplaceContext& ctx, int max_iters = 0,
                           double stall_tol = -1.0);

struct ExplosionCertificate {
  double lambda = 0.0;
  double ell_norm = 0.0;
  double q_limit_norm = 0.0;
  double q_limit_increment = 0.0;
  bool q_limit_converged = true;
  Matrix explosion_transform;  ///< E~_lambda(I), Hermitian
  int series_terms_used = 0;
  double series_tail = 0.0;  ///< norm of the last series term
  bool series_converged = true;
  double resolvent_gap = 0.0;    ///< lambda_max(E~_lambda(I))
  double explosion_mass = 0.0;   ///< lambda <e_0, E~_lambda(I) e_0>
  Verdict verdict = Verdict::inconclusive;
  double decision_threshold = 0.0;
  double inconclusive_floor = 0.0;
  std::string note;
};

/// E~_lambda(I) = (1/lambda) lim Q^n(I) + sum_n Q^n(l_lambda(I)). Fills the
/// certificate fields that the series needs; the verdict is left inconclusive.
ExplosionCertificate explosion_transform(const LaplaceContext& ctx);

/// All certificates plus a verdict: explosive when both the source
/// certificate max(ell_norm, q_limit_norm) and resolvent_gap exceed
/// decision_threshold, conservative when both are below inconclusive_floor,
/// inconclusive otherwise or when a series or limit did not converge.
ExplosionCertificate conservativity_verdict(const LaplaceContext& ctx);

struct ExplosionSolutionReport {
  bool applicable = false;        ///< verdict was explosive
  double residual_on_d = 0.0;     ///< max |L(x)[u,v] - lambda <u, x v>| over D
  double fixed_point_on_d = 0.0;  ///< max |(Q_lambda(x) - x)[u,v]| over D, reported only
  double residual_full = 0.0;     ///< same as residual_on_d over the whole space
};

/// Checks that x = E~_lambda(I) solves L(x) = lambda x on D x D.
ExplosionSolutionReport verify_explosion_solution(const LaplaceContext& ctx,
                                                  const ExplosionCertificate& cert);

struct AnnihilatorResult {
  int dimension = 0;       ///< dim of {x Hermitian : (lambda - L)(x) = 0 on D x D}
  int unknowns = 0;
  int constraints = 0;
  bool has_psd_element = false;
  Matrix psd_element;      ///< trace-normalized element when found
  double psd_min_eigenvalue = 0.0;
  bool ambiguous_rank = false;  ///< singular values straddle the threshold
  bool inconclusive = false;
  double rank_threshold = 0.0;
  double smallest_kept = 0.0;   ///< smallest singular value counted in the rank
  double largest_dropped = 0.0; ///< largest singular value counted as zero
  std::vector<Matrix> basis_sample;
  std::string psd_method;
};

/// Null space of x -> compress_D((lambda - L)(x)) on Hermitian matrices,
/// and a search for a nonzero positive semidefinite element in it.
/// Refuses dimensions above 32 (n^2 unknowns).
AnnihilatorResult predual_annihilator_check(const LaplaceContext& ctx);

/// Reference values by quadrature over time, independent of the Sylvester path.
/// int e^{-lambda t} P_t(I) dt using evolve_observable.
Matrix resolvent_identity_quadrature(const LaplaceContext& ctx);
/// int e^{-lambda t} (I - W_t* W_t) dt
Matrix first_iterate_quadrature(const LaplaceContext& ctx);

}  // namespace qdslab
