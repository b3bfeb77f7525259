#include <gtest/gtest.h>

#include "qdslab/qdslab.hpp"

using namespace qdslab;

TEST(Catalog, RateSequences) {
  EXPECT_DOUBLE_EQ(RateSequence::linear()(0), 1.0);
  EXPECT_DOUBLE_EQ(RateSequence::quadratic()(3), 16.0);
  EXPECT_DOUBLE_EQ(RateSequence::power(1.5)(3), 8.0);
  EXPECT_DOUBLE_EQ(RateSequence::constant(2.5)(7), 2.5);
  const RateSequence l = RateSequence::parse("list:1;2;3");
  EXPECT_DOUBLE_EQ(l(2), 3.0);
  for (const char* t : {"linear", "quadratic", "power:1.5", "constant:2", "list:1;2"})
    EXPECT_EQ(RateSequence::parse(RateSequence::parse(t).describe()).describe(),
              RateSequence::parse(t).describe());
  EXPECT_THROW(RateSequence::parse("cubic"), Error);
}

TEST(Catalog, PureBirthStructure) {
  const ModelSpec s = build_pure_birth(RateSequence::quadratic(), 5);
  EXPECT_EQ(s.dim(), 6);
  EXPECT_EQ(s.domain().dim(), 5);
  ASSERT_EQ(s.kraus_ops().size(), 1u);
  EXPECT_NEAR(std::abs(s.kraus_ops()[0](1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(s.kraus_ops()[0](5, 4)), 5.0, 1e-15);
  EXPECT_NEAR(s.G()(2, 2).real(), 4.5, 1e-15);
  EXPECT_THROW(build_pure_birth(RateSequence::constant(-1.0), 3), Error);
  EXPECT_THROW(build_pure_birth(RateSequence::linear(), 0), Error);
}

TEST(Catalog, ReferencesRoundTrip) {
  for (const char* ref : {"pure-birth:quadratic", "pure-birth:power=1.5,N=12",
                          "pure-birth:rates=1;2;3,N=2", "tau-f:alpha=0.5,grid=0:4:12",
                          "tau-f-adjoint:alpha=1", "tau-f-noise:alpha=0", "bounded-lindblad:seed=7,dim=4",
                          "unitary:seed=2,dim=3", "shift:m=2"}) {
    const CatalogEntry e = CatalogEntry::parse(ref);
    EXPECT_EQ(CatalogEntry::parse(e.ref()).ref(), e.ref()) << ref;
  }
}

TEST(Catalog, RejectsUnknownInput) {
  EXPECT_THROW(CatalogEntry::parse("nope"), Error);
  EXPECT_THROW(CatalogEntry::parse("pure-birth:foo=1"), Error);
  EXPECT_THROW(CatalogEntry::parse("tau-f:alpha=2"), Error);
  EXPECT_THROW(CatalogEntry::parse("tau-f:grid=0:4"), Error);
  EXPECT_THROW(CatalogEntry::parse("bounded-lindblad:seed=x"), Error);
}

TEST(Catalog, LevelsAndBuilds) {
  CatalogEntry e = CatalogEntry::parse("pure-birth:quadratic");
  EXPECT_EQ(e.default_level(), 8);
  e.set_level(20);
  EXPECT_EQ(e.build().dim(), 21);
  CatalogEntry t = CatalogEntry::parse("tau-f:alpha=0");
  EXPECT_EQ(t.default_level(), 12);
  EXPECT_EQ(t.build(24).dim(), 25);
  EXPECT_EQ(t.build().domain().dim(), 11);
  EXPECT_EQ(CatalogEntry::parse("tau-f-adjoint:alpha=0").build().domain().dim(), 13);
  EXPECT_EQ(CatalogEntry::parse("tau-f-noise:alpha=0").build().kraus_ops().size(), 1u);
  EXPECT_EQ(CatalogEntry::parse("unitary:dim=3").build().kraus_ops().size(), 0u);
  EXPECT_FALSE(CatalogEntry::parse("shift:m=1").is_model());
  EXPECT_EQ(CatalogEntry::parse("tau-f-adjoint:alpha=0").orientation(), Orientation::adjoint);
}

TEST(Catalog, SeededModelsAreDeterministic) {
  const ModelSpec a = build_bounded_lindblad(4, 7);
  const ModelSpec b = build_bounded_lindblad(4, 7);
  const ModelSpec c = build_bounded_lindblad(4, 8);
  EXPECT_EQ(a.G(), b.G());
  EXPECT_NE(a.G(), c.G());
  EXPECT_TRUE(validate_model(a).admissible());
  EXPECT_LT(linalg::operator_norm(apply_generator(a, Matrix::Identity(4, 4))), 1e-12);
}

TEST(Catalog, EveryModelIsAdmissible) {
  for (const auto& s : list_catalog()) {
    if (s.kind == CatalogKind::shift_isometry) continue;
    const ModelSpec m = CatalogEntry::parse(s.prefix).build();
    EXPECT_TRUE(validate_model(m).admissible()) << s.prefix;
  }
}

TEST(Catalog, ShiftIsometry) {
  const IsometrySpec v = build_shift_isometry(2, 10);
  const Matrix m = v.matrix();
  EXPECT_EQ(m.rows(), 10);
  EXPECT_NEAR(std::abs(m(2, 0)), 1.0, 1e-15);
  EXPECT_NO_THROW(v.validate());
  EXPECT_THROW(build_shift_isometry(0, 10), Error);
  EXPECT_THROW(build_shift_isometry(3, 6), Error);
}

TEST(Catalog, GridWeightsSumToLength) {
  const std::vector<double> g = uniform_grid(0.0, 3.0, 6);
  EXPECT_NEAR(grid_weights(g).sum(), 3.0, 1e-14);
}

TEST(Catalog, SkewOperatorIsAntisymmetric) {
  TauFModel m;
  m.f = PositiveFunction::power(0.5);
  m.grid = uniform_grid(0.0, 4.0, 10);
  const RealMatrix k = tau_f_skew_operator(m);
  EXPECT_LT((k + k.transpose()).cwiseAbs().maxCoeff(), 1e-14);
}
