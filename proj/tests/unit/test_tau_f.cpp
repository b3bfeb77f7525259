#include <cmath>

#include <gtest/gtest.h>

#include "qdslab/tau_f.hpp"
#include "support/oracles.hpp"

using namespace qdslab;

TEST(TauF, PowerFunctionIntegrals) {
  const PositiveFunction c = PositiveFunction::power(0.0);
  EXPECT_DOUBLE_EQ(c(3.0), 1.0);
  EXPECT_DOUBLE_EQ(c.inverse_integral(3.0), 3.0);
  const PositiveFunction one = PositiveFunction::power(1.0);
  EXPECT_NEAR(one.inverse_integral(3.0), std::log(4.0), 1e-14);
  const PositiveFunction half = PositiveFunction::power(0.5);
  EXPECT_NEAR(half.inverse_integral(3.0), 2.0 * (2.0 - 1.0), 1e-14);
  EXPECT_NEAR(half.derivative(3.0), 0.25, 1e-14);
  const double numeric = oracle::simpson([&](double x) { return 1.0 / half(x); }, 0.0, 3.0, 200);
  EXPECT_NEAR(half.inverse_integral(3.0), numeric, 1e-10);
  EXPECT_THROW(PositiveFunction::power(1.5), DomainError);
  EXPECT_THROW(PositiveFunction::power(-0.1), DomainError);
}

TEST(TauF, SampledFunction) {
  const PositiveFunction f = PositiveFunction::sampled({0.0, 1.0, 2.0}, {1.0, 2.0, 2.0});
  EXPECT_DOUBLE_EQ(f(0.5), 1.5);
  EXPECT_FALSE(f.closed_form());
  EXPECT_DOUBLE_EQ(f.domain_end(), 2.0);
  // int_0^1 dx / (1 + x) + int_1^2 dx / 2
  EXPECT_NEAR(f.inverse_integral(2.0), std::log(2.0) + 0.5, 1e-14);
  EXPECT_THROW(PositiveFunction::sampled({0.0, 1.0}, {1.0, -1.0}), DomainError);
  EXPECT_THROW(PositiveFunction::sampled({0.5, 1.0}, {1.0, 1.0}), DomainError);
}

TEST(TauF, Grids) {
  const auto g = uniform_grid(0.0, 2.0, 4);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g[2], 1.0);
  const auto r = refine_grid(g);
  ASSERT_EQ(r.size(), 9u);
  EXPECT_DOUBLE_EQ(r[1], 0.25);
  EXPECT_THROW(uniform_grid(1.0, 2.0, 4), DomainError);
  EXPECT_THROW(uniform_grid(0.0, 2.0, 1), DomainError);
}

TEST(TauF, ModelValidation) {
  TauFModel m;
  m.grid = uniform_grid(0.0, 4.0, 8);
  EXPECT_NO_THROW(m.validate());
  EXPECT_EQ(m.intervals(), 8);
  EXPECT_NEAR(m.divergence_integral(), 4.0, 1e-14);
  m.c1 = 0.0;
  EXPECT_THROW(m.validate(), DomainError);
}
