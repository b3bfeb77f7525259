// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qdslab/qdslab.hpp"
#include "support/oracles.hpp"

using namespace qdslab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

const std::vector<std::string> kCatalog = {
    "pure-birth:quadratic",          "pure-birth:linear",
    "tau-f:alpha=0",                 "tau-f-adjoint:alpha=0.5",
    "tau-f-noise:alpha=0.5",         "bounded-lindblad:seed=7,dim=4",
    "unitary:seed=7,dim=3"};
const std::vector<double> kLambdas = {0.5, 1.0, 2.0};

double max_abs(const Matrix& m) { return oracle::max_abs(m); }

Outcome explosive_birth() {
  Outcome o;
  o.detail.precision(6);
  const auto q = [](int n) { return double(n + 1) * (n + 1); };
  const ModelSpec s64 = build_pure_birth(RateSequence::quadratic(), 64);
  const ExplosionCertificate c = conservativity_verdict(LaplaceContext(s64, 1.0));
  const double product = oracle::birth_escape_probability(q, 64, 1.0);
  o.detail << "N=64 mass " << c.explosion_mass << " vs product " << product << " (diff "
           << std::abs(c.explosion_mass - product) << ")";
  o.require(std::abs(c.explosion_mass - product) <= 1e-8, "N=64 product within 1e-8");
  o.require(c.verdict == Verdict::explosive, "N=64 verdict explosive");

  const std::vector<int> levels = {8, 16, 32, 64, 128};
  const SweepResult r = truncation_sweep(CatalogEntry::parse("pure-birth:quadratic").family(),
                                         1.0, levels);
  bool decreasing = true;
  for (std::size_t i = 1; i < r.observable_trace.size(); ++i)
    decreasing = decreasing && r.observable_trace[i] < r.observable_trace[i - 1];
  const double v128 = r.observable_trace.back();
  const double limit = oracle::pi_over_sinh_pi();
  const double finite128 = oracle::birth_escape_probability(q, 128, 1.0);
  o.detail << "; sweep";
  for (double v : r.observable_trace) o.detail << " " << v;
  o.detail << "; N=128 vs finite product diff " << std::abs(v128 - finite128)
           << "; |N=128 - pi/sinh(pi)| = " << std::abs(v128 - limit)
           << "; Richardson limit " << r.extrapolated_limit.value_or(NAN) << " (off by "
           << std::abs(r.extrapolated_limit.value_or(NAN) - limit) << ")";
  o.require(decreasing, "strictly decreasing");
  o.require(std::abs(v128 - finite128) <= 1e-8, "N=128 equals its finite product");
  o.require(std::abs(v128 - limit) <= 1e-3, "N=128 value within 1e-3 of pi/sinh(pi)");
  return o;
}

Outcome conservative_birth() {
  Outcome o;
  o.detail.precision(3);
  double worst = 0.0;
  for (int n : {8, 16, 32, 64}) {
    const ModelSpec s = build_pure_birth(RateSequence::linear(), n);
    const ExplosionCertificate c = conservativity_verdict(LaplaceContext(s, 1.0));
    worst = std::max(worst, std::abs(c.explosion_mass - 1.0 / (n + 2)));
  }
  const SweepResult r = truncation_sweep(CatalogEntry::parse("pure-birth:linear").family(), 1.0,
                                         {8, 16, 32, 64});
  o.detail << "max |mass - 1/(N+2)| = " << worst << ", trend " << to_string(r.trend);
  o.require(worst <= 1e-10, "1/(N+2) within 1e-10");
  o.require(r.trend == Trend::decaying_to_zero, "trend decaying_to_zero");
  return o;
}

Outcome conservative_control() {
  Outcome o;
  o.detail.precision(3);
  const ModelSpec s = build_bounded_lindblad(4, 7);
  double ell = 0.0, ql = 0.0, pt = 0.0;
  std::string verdicts;
  for (double lambda : kLambdas) {
    const LaplaceContext ctx(s, lambda);
    ell = std::max(ell, linalg::operator_norm(ell_lambda(ctx).matrix()));
    ql = std::max(ql, linalg::operator_norm(q_power_limit(ctx).limit));
    const ExplosionCertificate c = conservativity_verdict(ctx);
    verdicts += std::string(verdicts.empty() ? "" : ",") + to_string(c.verdict);
    o.require(c.verdict == Verdict::conservative, "conservative verdict");
  }
  const std::vector<double> times = {0.5, 2.0, 8.0};
  const EvolutionResult ev = evolve_observable(s, HermitianForm::identity(4), times);
  for (const auto& f : ev.observables)
    pt = std::max(pt, linalg::operator_norm(f.matrix() - Matrix::Identity(4, 4)));
  o.detail << "||l|| " << ell << ", ||lim Q^n(I)|| " << ql << ", max ||P_t(I) - I|| " << pt
           << ", verdicts " << verdicts;
  o.require(ell <= 1e-10, "||l|| <= 1e-10");
  o.require(ql <= 1e-10, "||lim Q^n|| <= 1e-10");
  o.require(pt <= 1e-8, "||P_t(I) - I|| <= 1e-8");
  return o;
}

Outcome resolvent_consistency() {
  Outcome o;
  o.detail.precision(3);
  double worst = 0.0, worst_oracle = 0.0;
  int runs = 0, agree = 0;
  for (const auto& ref : kCatalog) {
    const ModelSpec s = CatalogEntry::parse(ref).build();
    const int n = s.dim();
    for (double lambda : kLambdas) {
      const LaplaceContext ctx(s, lambda);
      const ExplosionCertificate c = conservativity_verdict(ctx);
      const Matrix id = Matrix::Identity(n, n);
      const Matrix r = resolvent_identity_quadrature(ctx);
      worst = std::max(worst, max_abs(r + c.explosion_transform - id / lambda));
      const Matrix ro = oracle::resolvent(s.G(), s.kraus_ops(), lambda, id);
      worst_oracle = std::max(worst_oracle, max_abs(ro + c.explosion_transform - id / lambda));
      const double thr = c.decision_threshold;
      const bool a = c.verdict == Verdict::explosive;
      const bool b = linalg::max_eigenvalue(c.explosion_transform) > thr;
      const bool d = c.ell_norm > thr || c.q_limit_norm > thr;
      ++runs;
      if (a == b && b == d && c.verdict != Verdict::inconclusive) ++agree;
    }
  }
  o.detail << "max |R(I) + E~(I) - I/lambda|: quadrature " << worst << ", exact resolvent "
           << worst_oracle << "; three-way agreement " << agree << "/" << runs;
  o.require(worst <= 1e-6, "quadrature identity within 1e-6");
  o.require(worst_oracle <= 1e-6, "exact-resolvent identity within 1e-6");
  o.require(agree == runs, "three-way agreement");
  return o;
}

Outcome explosion_solution() {
  Outcome o;
  o.detail.precision(3);
  double worst = 0.0;
  int runs = 0;
  for (const auto& q : {RateSequence::quadratic(), RateSequence::linear()})
    for (int n : {8, 16, 64})
      for (double lambda : kLambdas) {
        const LaplaceContext ctx(build_pure_birth(q, n), lambda);
        const ExplosionCertificate c = conservativity_verdict(ctx);
        const ExplosionSolutionReport r = verify_explosion_solution(ctx, c);
        o.require(r.applicable, "explosive verdict");
        worst = std::max(worst, r.residual_on_d);
        ++runs;
      }
  o.detail << "max residual of L(x) - lambda x on D x D over " << runs << " runs: " << worst;
  o.require(worst <= 1e-9, "residual <= 1e-9");
  return o;
}

Outcome annihilator_agreement() {
  Outcome o;
  int runs = 0, agree = 0;
  std::string dims;
  for (const auto& ref : kCatalog) {
    const ModelSpec s = CatalogEntry::parse(ref).build();
    for (double lambda : kLambdas) {
      const LaplaceContext ctx(s, lambda);
      const ExplosionCertificate c = conservativity_verdict(ctx);
      const AnnihilatorResult a = predual_annihilator_check(ctx);
      const bool explosive = c.verdict == Verdict::explosive;
      const bool ok = explosive ? (a.dimension > 0 && a.has_psd_element)
                                : (c.verdict == Verdict::conservative && a.dimension == 0);
      ++runs;
      if (ok && !a.inconclusive) ++agree;
      if (lambda == 1.0)
        dims += (dims.empty() ? "" : " ") + ref + "=" + std::to_string(a.dimension) +
                (a.has_psd_element ? "+" : "");
    }
  }
  o.detail << agree << "/" << runs << " runs agree; dims at lambda=1: " << dims;
  o.require(agree == runs, "annihilator matches verdict");
  return o;
}

Outcome sylvester_vs_quadrature() {
  Outcome o;
  o.detail.precision(3);
  std::mt19937_64 rng(20240611);
  double worst = 0.0, worst_oracle = 0.0, worst_first = 0.0;
  int count = 0;
  for (const char* ref : {"pure-birth:quadratic", "bounded-lindblad:seed=7,dim=4",
                          "tau-f-noise:alpha=0.5"}) {
    const ModelSpec s = CatalogEntry::parse(ref).build();
    const LaplaceContext ctx(s, 1.0);
    for (int i = 0; i < 20; ++i) {
      const Matrix x = oracle::random_psd(s.dim(), rng);
      const HermitianForm hx = HermitianForm::make(x, FormTag::observable);
      const Matrix a = q_lambda(ctx, hx, QMethod::sylvester).matrix();
      const Matrix b = q_lambda(ctx, hx, QMethod::quadrature).matrix();
      worst = std::max(worst, linalg::operator_norm(a - b));
      worst_oracle = std::max(
          worst_oracle, max_abs(a - oracle::q_lambda(s.G(), s.kraus_ops(), 1.0, x)));
      ++count;
    }
    const int n = s.dim();
    for (double lambda : kLambdas) {
      const LaplaceContext c2(s, lambda);
      const Matrix lhs = ell_lambda(c2).matrix() +
                         q_lambda(c2, HermitianForm::identity(n)).matrix() / lambda;
      worst_first = std::max(worst_first, max_abs(lhs - first_iterate_quadrature(c2)));
      worst_first = std::max(worst_first, max_abs(lhs - oracle::first_iterate(s.G(), lambda)));
    }
  }
  o.detail << count << " PSD inputs: max ||Q_syl - Q_quad|| " << worst
           << ", max |Q_syl - Kronecker| " << worst_oracle << "; first-iterate identity "
           << worst_first;
  o.require(worst <= 1e-6, "methods agree within 1e-6");
  o.require(worst_oracle <= 1e-6, "Sylvester matches the Kronecker solve");
  o.require(worst_first <= 1e-6, "first-iterate identity within 1e-6");
  return o;
}

Outcome deficiency_norms() {
  Outcome o;
  o.detail.precision(12);
  for (const char* ref : {"tau-f:alpha=0", "tau-f:alpha=0.5", "tau-f:alpha=1", "tau-f:alpha=1,c1=2"}) {
    const CatalogEntry e = CatalogEntry::parse(ref);
    const TauFModel m = e.tau_f_model();
    const DeficiencyResult d = deficiency_indices_tau_f(m);
    const double expected = m.c1 * m.c1 / 2.0;
    o.detail << ref << ": (" << d.n_plus << "," << d.n_minus << ") ||u+||^2=" << d.norm_plus
             << " ";
    o.require(std::abs(d.norm_plus - expected) <= 1e-8, std::string(ref) + " norm");
    o.require(d.tail_minus == TailClass::divergent, std::string(ref) + " u- divergent");
    o.require(d.n_plus == 1 && d.n_minus == 0, std::string(ref) + " indices (1,0)");
  }
  return o;
}

Outcome cayley_indices() {
  Outcome o;
  for (int m = 1; m <= 4; ++m) {
    const CayleyResult c = cayley_deficiency_from_isometry(build_shift_isometry(m, 16));
    o.detail << "V" << m << ":(" << c.n_plus << "," << c.n_minus << ") dims";
    for (std::size_t i = 0; i < c.dims.size(); ++i)
      o.detail << " " << c.dims[i] << "->(" << c.n_plus_by_dim[i] << "," << c.n_minus_by_dim[i]
               << ")";
    o.detail << "; ";
    o.require(c.n_plus == 0 && c.n_minus == m && c.stabilized, "indices (0,m) stable");
    o.require(c.dims.size() == 2 && c.dims[1] == 2 * c.dims[0], "dims N and 2N");
    if (m == 1)
      o.require(c.n_minus_basis.cols() == 1 && std::abs(c.n_minus_basis(0, 0)) > 1.0 - 1e-10,
                "N_- = span{e_0}");
  }
  return o;
}

Outcome boundary_form_convergence() {
  Outcome o;
  o.detail.precision(3);
  for (const char* ref : {"tau-f:alpha=0,grid=0:20:200", "tau-f:alpha=0.5,grid=0:20:200",
                          "tau-f:alpha=1,grid=0:20:200"}) {
    const Prop42Report p = prop42_certificate(CatalogEntry::parse(ref).tau_f_model());
    o.detail << ref << ": " << p.levels[0].max_residual << " -> " << p.levels[1].max_residual
             << " order " << p.order << "; ";
    o.require(p.levels[1].max_residual < p.levels[0].max_residual, "residual decreases");
    o.require(p.order >= 0.7, "order >= 0.7");
  }
  return o;
}

Outcome monotone_scheme() {
  Outcome o;
  o.detail.precision(3);
  double worst_mono = 0.0, worst_gap = 0.0;
  for (const auto& ref : kCatalog) {
    const ModelSpec s = CatalogEntry::parse(ref).build();
    const int n = s.dim();
    IterationOptions opts;
    opts.n_max = 24;
    opts.stall_tol = 1e-10;
    const double t = 1.0;
    const auto it = minimal_iteration(s, HermitianForm::identity(n), t, opts);
    for (std::size_t k = 1; k < it.size(); ++k)
      worst_mono = std::min(worst_mono,
                            linalg::min_eigenvalue(it[k].matrix() - it[k - 1].matrix()));
    const Matrix exact = oracle::semigroup(s.G(), s.kraus_ops(), t, Matrix::Identity(n, n));
    const double gap = max_abs(it.back().matrix() - exact);
    worst_gap = std::max(worst_gap, gap);
  }
  o.detail << "min eigenvalue of P^(n) - P^(n-1): " << worst_mono
           << "; max |P^(n)_1(I) - exp(L)(I)|: " << worst_gap;
  o.require(worst_mono >= -1e-10, "nondecreasing within 1e-10");
  o.require(worst_gap <= 1e-6, "converges within 1e-6");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"explosive birth oracle", explosive_birth},
      {"conservative birth oracle", conservative_birth},
      {"conservative Lindblad control", conservative_control},
      {"resolvent identity and verdict agreement", resolvent_consistency},
      {"explosion transform solves the eigen-equation on D", explosion_solution},
      {"predual annihilator matches verdicts", annihilator_agreement},
      {"Sylvester vs quadrature Q_lambda", sylvester_vs_quadrature},
      {"deficiency norms and indices", deficiency_norms},
      {"Cayley indices of shifts", cayley_indices},
      {"boundary form residual converges", boundary_form_convergence},
      {"monotone minimal scheme", monotone_scheme},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %2d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", index, name, secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
