#include <random>

#include <gtest/gtest.h>

#include "qdslab/qdslab.hpp"
#include "support/oracles.hpp"

using namespace qdslab;

namespace {

std::vector<std::string> refs() {
  return {"pure-birth:quadratic", "pure-birth:linear,N=6", "tau-f:alpha=0",
          "tau-f-adjoint:alpha=1", "bounded-lindblad:seed=2,dim=3"};
}

}  // namespace

TEST(Resolvent, ContextRefusals) {
  const ModelSpec s = build_bounded_lindblad(3, 1);
  EXPECT_THROW(LaplaceContext(s, 0.0), DomainError);
  EXPECT_THROW(LaplaceContext(s, -1.0), DomainError);
  const ModelSpec bad(TruncatedSpace(1), -Matrix::Identity(1, 1), {}, Subspace::full(1), "g");
  EXPECT_THROW(LaplaceContext(bad, 1.0), RefusalError);
  EXPECT_EQ(LaplaceContext(s, 1.0).max_terms(), 50);
  EXPECT_EQ(LaplaceContext(build_pure_birth(RateSequence::linear(), 9), 1.0).max_terms(), 100);
}

TEST(Resolvent, QLambdaMatchesKronecker) {
  std::mt19937_64 rng(7);
  for (const auto& ref : refs()) {
    const ModelSpec s = CatalogEntry::parse(ref).build();
    const LaplaceContext ctx(s, 0.8);
    const Matrix x = oracle::random_psd(s.dim(), rng);
    const Matrix q = q_lambda(ctx, HermitianForm::make(x, FormTag::observable)).matrix();
    EXPECT_LT(oracle::max_abs(q - oracle::q_lambda(s.G(), s.kraus_ops(), 0.8, x)), 1e-12) << ref;
  }
}

TEST(Resolvent, EllMatchesKronecker) {
  for (const auto& ref : refs()) {
    const ModelSpec s = CatalogEntry::parse(ref).build();
    const int n = s.dim();
    const LaplaceContext ctx(s, 1.3);
    const Matrix li = oracle::superoperator(s.G(), s.kraus_ops()) * oracle::vec(Matrix::Identity(n, n));
    const Matrix z = oracle::lyapunov(s.G(), 1.3, -oracle::unvec(li, n)) / 1.3;
    EXPECT_LT(oracle::max_abs(ell_lambda(ctx).matrix() - z), 1e-12) << ref;
  }
}

TEST(Resolvent, ExplosionTransformIsDefectOfResolvent) {
  for (const auto& ref : refs()) {
    const ModelSpec s = CatalogEntry::parse(ref).build();
    const int n = s.dim();
    for (double lambda : {0.5, 2.0}) {
      const ExplosionCertificate c = conservativity_verdict(LaplaceContext(s, lambda));
      const Matrix id = Matrix::Identity(n, n);
      const Matrix expected = id / lambda - oracle::resolvent(s.G(), s.kraus_ops(), lambda, id);
      EXPECT_LT(oracle::max_abs(c.explosion_transform - expected), 1e-10) << ref;
    }
  }
}

TEST(Resolvent, BirthMassIsEulerProduct) {
  const auto q = [](int k) { return double(k + 1) * (k + 1); };
  for (int n : {4, 16}) {
    for (double lambda : {0.5, 1.0, 3.0}) {
      const ExplosionCertificate c =
          conservativity_verdict(LaplaceContext(build_pure_birth(RateSequence::quadratic(), n), lambda));
      EXPECT_NEAR(c.explosion_mass, oracle::birth_escape_probability(q, n, lambda), 1e-12);
      EXPECT_EQ(c.verdict, Verdict::explosive);
      EXPECT_TRUE(c.series_converged);
      EXPECT_TRUE(c.q_limit_converged);
    }
  }
}

TEST(Resolvent, ConservativeModels) {
  for (const char* ref : {"bounded-lindblad:seed=7,dim=4", "unitary:seed=1,dim=3",
                          "tau-f-adjoint:alpha=0"}) {
    const ExplosionCertificate c =
        conservativity_verdict(LaplaceContext(CatalogEntry::parse(ref).build(), 1.0));
    EXPECT_EQ(c.verdict, Verdict::conservative) << ref << ": " << c.note;
    EXPECT_LT(c.resolvent_gap, c.inconclusive_floor);
  }
}

TEST(Resolvent, InconclusiveBand) {
  // a floor above the observed certificates and a threshold above the mass
  Tolerances t;
  t.decision_threshold = 10.0;
  t.inconclusive_floor = 1e-3;
  const ExplosionCertificate c =
      conservativity_verdict(LaplaceContext(build_pure_birth(RateSequence::linear(), 4), 1.0, t));
  EXPECT_EQ(c.verdict, Verdict::inconclusive);
}

TEST(Resolvent, NonConvergedLimitIsInconclusive) {
  Tolerances t;
  t.stall = 1e-300;
  const ExplosionCertificate c =
      conservativity_verdict(LaplaceContext(build_bounded_lindblad(4, 7), 1.0, t));
  EXPECT_FALSE(c.q_limit_converged);
  EXPECT_EQ(c.verdict, Verdict::inconclusive);
}

TEST(Resolvent, ExplosionSolutionOnD) {
  const LaplaceContext ctx(build_pure_birth(RateSequence::quadratic(), 20), 1.0);
  const ExplosionCertificate c = conservativity_verdict(ctx);
  const ExplosionSolutionReport r = verify_explosion_solution(ctx, c);
  EXPECT_TRUE(r.applicable);
  EXPECT_LT(r.residual_on_d, 1e-10);
  // off D the defect is L(I)/lambda, which is the boundary loss q_N
  EXPECT_NEAR(r.residual_full, 21.0 * 21.0, 1e-6);

  const LaplaceContext cons(build_bounded_lindblad(3, 1), 1.0);
  EXPECT_FALSE(verify_explosion_solution(cons, conservativity_verdict(cons)).applicable);
}

TEST(Resolvent, AnnihilatorDimensions) {
  const LaplaceContext expl(build_pure_birth(RateSequence::quadratic(), 4), 1.0);
  const AnnihilatorResult a = predual_annihilator_check(expl);
  EXPECT_GT(a.dimension, 0);
  EXPECT_TRUE(a.has_psd_element);
  EXPECT_GE(a.psd_min_eigenvalue, -1e-10);
  // the element solves (lambda - L)(x) = 0 on D x D
  const Matrix& x = a.psd_element;
  const ModelSpec& s = expl.spec();
  EXPECT_LT(oracle::max_abs(s.domain().compress(x - apply_generator(s, x))), 1e-8);
  EXPECT_GT(linalg::max_eigenvalue(x), 1e-6);

  const LaplaceContext cons(build_bounded_lindblad(4, 7), 1.0);
  EXPECT_EQ(predual_annihilator_check(cons).dimension, 0);
  EXPECT_THROW(predual_annihilator_check(LaplaceContext(build_bounded_lindblad(33, 1), 1.0)),
               RefusalError);
}

TEST(Resolvent, QuadratureReferences) {
  const ModelSpec s = build_bounded_lindblad(3, 4);
  const LaplaceContext ctx(s, 1.0);
  const Matrix id = Matrix::Identity(3, 3);
  EXPECT_LT(oracle::max_abs(resolvent_identity_quadrature(ctx) -
                            oracle::resolvent(s.G(), s.kraus_ops(), 1.0, id)),
            1e-7);
  EXPECT_LT(oracle::max_abs(first_iterate_quadrature(ctx) - oracle::first_iterate(s.G(), 1.0)),
            1e-9);
  const Matrix qq = q_lambda(ctx, HermitianForm::identity(3), QMethod::quadrature).matrix();
  EXPECT_LT(oracle::max_abs(qq - oracle::q_lambda(s.G(), s.kraus_ops(), 1.0, id)), 1e-9);
}
