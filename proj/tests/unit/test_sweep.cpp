#include <cstdlib>

#include <gtest/gtest.h>

#include "qdslab/qdslab.hpp"
#include "support/oracles.hpp"

using namespace qdslab;

TEST(Sweep, QuadraticBirthStabilizes) {
  const SweepResult r =
      truncation_sweep(CatalogEntry::parse("pure-birth:quadratic").family(), 1.0, {8, 16, 32});
  ASSERT_EQ(r.observable_trace.size(), 3u);
  EXPECT_EQ(r.trend, Trend::stabilizing_positive);
  const auto q = [](int k) { return double(k + 1) * (k + 1); };
  for (std::size_t i = 0; i < r.dims.size(); ++i)
    EXPECT_NEAR(r.observable_trace[i], oracle::birth_escape_probability(q, r.dims[i], 1.0), 1e-12);
  ASSERT_TRUE(r.extrapolated_limit.has_value());
  EXPECT_NEAR(*r.extrapolated_limit, oracle::pi_over_sinh_pi(), 2e-3);
}

TEST(Sweep, LinearBirthDecays) {
  const SweepResult r =
      truncation_sweep(CatalogEntry::parse("pure-birth:linear").family(), 1.0, {8, 16, 32, 64});
  EXPECT_EQ(r.trend, Trend::decaying_to_zero);
  for (std::size_t i = 0; i < r.dims.size(); ++i)
    EXPECT_NEAR(r.observable_trace[i], 1.0 / (r.dims[i] + 2), 1e-12);
}

TEST(Sweep, ConservativeFamilyDecays) {
  const SweepResult r = truncation_sweep(
      CatalogEntry::parse("bounded-lindblad:seed=7").family(), 1.0, {3, 4, 6});
  EXPECT_EQ(r.trend, Trend::decaying_to_zero);
  for (const auto& c : r.certificates) EXPECT_EQ(c.verdict, Verdict::conservative);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  const auto fam = CatalogEntry::parse("pure-birth:quadratic").family();
  const SweepResult a = truncation_sweep(fam, 0.7, {4, 8, 16}, {}, 1);
  const SweepResult b = truncation_sweep(fam, 0.7, {4, 8, 16}, {}, 3);
  EXPECT_EQ(a.observable_trace, b.observable_trace);
}

TEST(Sweep, RejectsBadLevels) {
  const auto fam = CatalogEntry::parse("pure-birth:quadratic").family();
  EXPECT_THROW(truncation_sweep(fam, 1.0, {8, 8}), Error);
  EXPECT_THROW(truncation_sweep(fam, 1.0, {}), Error);
}

TEST(Sweep, ThreadsFromEnvironment) {
  ::setenv("QDSLAB_THREADS", "3", 1);
  EXPECT_EQ(default_thread_count(), 3);
  ::setenv("QDSLAB_THREADS", "junk", 1);
  EXPECT_GE(default_thread_count(), 1);
  ::unsetenv("QDSLAB_THREADS");
}
