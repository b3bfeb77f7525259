#include <cmath>

#include <gtest/gtest.h>

#include "qdslab/qdslab.hpp"
#include "support/oracles.hpp"

using namespace qdslab;

namespace {

TauFModel model(double alpha, const char* grid = "0:20:200", double c1 = 1.0) {
  CatalogEntry e = CatalogEntry::parse("tau-f:alpha=" + std::to_string(alpha) + ",grid=" + grid);
  TauFModel m = e.tau_f_model();
  m.c1 = c1;
  return m;
}

}  // namespace

TEST(Deficiency, VectorsSolveTheEigenEquation) {
  for (double alpha : {0.0, 0.5, 1.0}) {
    const DeficiencyVectors v = deficiency_vectors_tau_f(model(alpha));
    const DeficiencyVectors fine = deficiency_vectors_tau_f(model(alpha, "0:20:400"));
    EXPECT_LT(v.residual_plus, 0.1);
    EXPECT_LT(v.residual_minus, 0.1);
    // first-order difference: halving h about halves the residual
    // (for alpha = 0 the difference quotient of an exponential is exact)
    if (v.residual_plus > 1e-8) EXPECT_LT(fine.residual_plus, 0.6 * v.residual_plus);
    if (v.residual_minus > 1e-8) EXPECT_LT(fine.residual_minus, 0.6 * v.residual_minus);
    // u_+(x) = c1 f^{-1/2} e^{-F(x)}
    const PositiveFunction f = PositiveFunction::power(alpha);
    for (std::size_t j = 0; j < v.x.size(); j += 37)
      EXPECT_NEAR(v.u_plus(j), std::exp(-f.inverse_integral(v.x[j])) / std::sqrt(f(v.x[j])), 1e-12);
  }
}

TEST(Deficiency, CoarseGridIsRejected) {
  EXPECT_THROW(deficiency_vectors_tau_f(model(0.0, "0:20:4")), ConvergenceError);
}

TEST(Deficiency, IndicesAndNorms) {
  for (double alpha : {0.0, 0.5, 1.0})
    for (double c1 : {1.0, 2.0}) {
      const DeficiencyResult d = deficiency_indices_tau_f(model(alpha, "0:4:12", c1));
      EXPECT_EQ(d.n_plus, 1);
      EXPECT_EQ(d.n_minus, 0);
      EXPECT_NEAR(d.norm_plus, c1 * c1 / 2.0, 1e-8);
      EXPECT_DOUBLE_EQ(d.norm_plus_expected, c1 * c1 / 2.0);
      EXPECT_EQ(d.tail_minus, TailClass::divergent);
      for (double r : d.minus_doubling_ratios) EXPECT_GT(r, 1.05);
    }
}

TEST(Deficiency, NormAgreesWithSimpson) {
  const PositiveFunction f = PositiveFunction::power(0.5);
  const double s = oracle::simpson(
      [&](double x) { return std::exp(-2.0 * f.inverse_integral(x)) / f(x); }, 0.0, 200.0, 20000);
  EXPECT_NEAR(deficiency_indices_tau_f(model(0.5)).norm_plus, s, 1e-8);
}

TEST(Deficiency, CayleyShifts) {
  for (int m = 1; m <= 4; ++m) {
    const CayleyResult c = cayley_deficiency_from_isometry(build_shift_isometry(m, 12));
    EXPECT_EQ(c.n_plus, 0);
    EXPECT_EQ(c.n_minus, m);
    EXPECT_TRUE(c.stabilized);
    ASSERT_EQ(c.n_minus_basis.cols(), m);
    // N_- is spanned by e_0, ..., e_{m-1}
    EXPECT_NEAR(c.n_minus_basis.topRows(m).norm(), std::sqrt(double(m)), 1e-10);
  }
}

TEST(Deficiency, CayleyRejectsEigenvalueOne) {
  IsometrySpec id;
  id.explicit_matrix = Matrix::Identity(4, 4);
  id.dim = 4;
  EXPECT_THROW(cayley_deficiency_from_isometry(id), Error);
}

TEST(Deficiency, IsometryVerdict) {
  EXPECT_EQ(isometric_restriction_verdict(0, 1), IsometryVerdict::extends_to_isometry_generator);
  EXPECT_EQ(isometric_restriction_verdict(1, 1), IsometryVerdict::extends_to_isometry_generator);
  EXPECT_EQ(isometric_restriction_verdict(1, 0), IsometryVerdict::does_not);
}

TEST(Deficiency, BoundaryFormResidualConverges) {
  for (double alpha : {0.0, 0.5, 1.0}) {
    const Prop42Report r = prop42_certificate(model(alpha));
    ASSERT_EQ(r.levels.size(), 2u);
    EXPECT_EQ(r.levels[1].intervals, 2 * r.levels[0].intervals);
    EXPECT_LT(r.levels[1].max_residual, r.levels[0].max_residual);
    EXPECT_GE(r.order, 0.7);
  }
  EXPECT_THROW(prop42_certificate(model(0.0), Orientation::adjoint), RefusalError);
}
