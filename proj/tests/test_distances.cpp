#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace hstcut;

TEST(Distance, Families) {
  EXPECT_EQ(DistanceFn::truncated_linear(10, 5).eval(2, 9), 5.0);
  EXPECT_EQ(DistanceFn::truncated_linear(10, 5).eval(2, 4), 2.0);
  EXPECT_EQ(DistanceFn::truncated_quadratic(10, 10).eval(1, 3), 4.0);
  EXPECT_EQ(DistanceFn::truncated_quadratic(10, 10).eval(1, 8), 10.0);
  const DistanceFn u = DistanceFn::uniform(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(u.eval(i, j), i == j ? 0.0 : 1.0);
  EXPECT_THROW(u.eval(0, 4), std::out_of_range);
}

TEST(Distance, Symmetry) {
  std::mt19937_64 rng(1);
  const std::vector<DistanceFn> all{DistanceFn::truncated_linear(6, 2.5), DistanceFn::truncated_quadratic(6, 7),
                                    DistanceFn::uniform(6), DistanceFn::matrix(oracle::random_symmetric(6, rng))};
  for (const DistanceFn& d : all)
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) EXPECT_EQ(d.eval(i, j), d.eval(j, i));
}

TEST(Distance, RejectsNonPositiveTruncation) {
  EXPECT_THROW(DistanceFn::truncated_linear(4, 0.0), std::invalid_argument);
  EXPECT_THROW(DistanceFn::truncated_quadratic(4, -1.0), std::invalid_argument);
}

TEST(Validate, Examples) {
  EXPECT_FALSE(validate_semimetric(LabelMatrix(2, {0, 1, 1, 0})));
  const auto asym = validate_semimetric(LabelMatrix(2, {0, 1, 2, 0}));
  ASSERT_TRUE(asym);
  EXPECT_EQ(asym->i, 0);
  EXPECT_EQ(asym->j, 1);
  EXPECT_TRUE(validate_semimetric(LabelMatrix(2, {0, 0, 0, 0})));
  EXPECT_TRUE(validate_semimetric(LabelMatrix(2, {1, 1, 1, 0})));
  EXPECT_THROW(DistanceFn::matrix(LabelMatrix(2, {0, 1, 2, 0})), std::invalid_argument);
}

TEST(Closure, Examples) {
  const LabelMatrix m(3, {0, 1, 10, 1, 0, 1, 10, 1, 0});
  const LabelMatrix c = metric_closure(m);
  EXPECT_EQ(c(0, 2), 2.0);
  EXPECT_EQ(metric_closure(c), c);
}

TEST(Closure, MatchesExhaustivePaths) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const LabelMatrix m = oracle::random_symmetric(8, rng);
    const LabelMatrix c = metric_closure(m);
    const LabelMatrix o = oracle::path_closure(m);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        EXPECT_NEAR(c(i, j), o(i, j), 1e-12);
        EXPECT_LE(c(i, j), m(i, j));
      }
    const LabelMatrix twice = metric_closure(c);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) EXPECT_NEAR(twice(i, j), c(i, j), 1e-12);
    EXPECT_NEAR(gamma(c), 1.0, 1e-12);
  }
}

TEST(Gamma, Examples) {
  EXPECT_DOUBLE_EQ(gamma(LabelMatrix(3, {0, 1, 10, 1, 0, 1, 10, 1, 0})), 9.0);
  EXPECT_EQ(gamma(DistanceFn::uniform(5)), 1.0);
  EXPECT_EQ(gamma(DistanceFn::truncated_linear(7, 3)), 1.0);
}

TEST(Gamma, MatchesTripleEnumeration) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const LabelMatrix m = oracle::random_symmetric(6, rng);
    EXPECT_NEAR(gamma(m), oracle::gamma(m), 1e-12);
  }
}

TEST(Gamma, TruncatedQuadraticIsNotMetric) {
  const DistanceFn d = DistanceFn::truncated_quadratic(5, 100);
  EXPECT_GT(gamma(d), 1.0);
  EXPECT_FALSE(is_metric(d));
}

TEST(Distance, SingleLabel) {
  const DistanceFn d = DistanceFn::uniform(1);
  EXPECT_EQ(d.num_labels(), 1);
  EXPECT_EQ(d.eval(0, 0), 0.0);
  EXPECT_EQ(gamma(d), 1.0);
}
