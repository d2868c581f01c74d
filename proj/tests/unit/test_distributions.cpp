#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "finelens/distributions.hpp"
#include "oracles.hpp"

using namespace finelens;

TEST(TQuantile, PublishedTableValues) {
  const std::pair<double, double> table[] = {{1, 12.7062}, {5, 2.5706}, {10, 2.2281}, {30, 2.0423}, {100, 1.9840}};
  for (auto [df, q] : table) EXPECT_NEAR(t_quantile(0.975, df), q, 1e-3) << "df=" << df;
  EXPECT_NEAR(t_quantile(0.95, 10), 1.8125, 1e-3);
  EXPECT_NEAR(t_quantile(0.995, 5), 4.0321, 1e-3);
}

TEST(TQuantile, SymmetryAndMedian) {
  for (double df : {1.0, 3.0, 17.0, 250.0}) {
    EXPECT_NEAR(t_quantile(0.5, df), 0.0, 1e-12);
    EXPECT_NEAR(t_quantile(0.1, df), -t_quantile(0.9, df), 1e-9);
  }
}

TEST(TQuantile, InvertsCdf) {
  for (double df : {1.0, 2.0, 7.0, 60.0})
    for (double p : {0.001, 0.025, 0.3, 0.7, 0.975, 0.999}) EXPECT_NEAR(t_cdf(t_quantile(p, df), df), p, 1e-9);
}

TEST(TQuantile, DomainErrors) {
  EXPECT_THROW(t_quantile(0.0, 5), std::domain_error);
  EXPECT_THROW(t_quantile(1.0, 5), std::domain_error);
  EXPECT_THROW(t_quantile(0.5, 0.5), std::domain_error);
}

TEST(TCdf, CauchyClosedForm) {
  // df = 1 is the Cauchy distribution.
  for (double t : {-5.0, -1.0, 0.0, 0.3, 2.0, 40.0}) EXPECT_NEAR(t_cdf(t, 1), 0.5 + std::atan(t) / M_PI, 1e-12);
  EXPECT_NEAR(t_two_sided_pvalue(1.0, 1), 0.5, 1e-12);
  EXPECT_NEAR(t_two_sided_pvalue(0.0, 9), 1.0, 1e-12);
}

TEST(IncompleteBeta, ClosedForms) {
  for (double x : {0.0, 0.1, 0.5, 0.93, 1.0}) {
    EXPECT_NEAR(incomplete_beta(1, 1, x), x, 1e-14);
    EXPECT_NEAR(incomplete_beta(2, 1, x), x * x, 1e-14);
    EXPECT_NEAR(incomplete_beta(1, 3, x), 1 - std::pow(1 - x, 3), 1e-14);
  }
  EXPECT_NEAR(incomplete_beta(2.5, 4.0, 0.4) + incomplete_beta(4.0, 2.5, 0.6), 1.0, 1e-13);
}

TEST(FPvalue, BoundaryAndRelationToT) {
  EXPECT_EQ(f_pvalue(0.0, 3, 10), 1.0);
  EXPECT_EQ(f_pvalue(-1.0, 3, 10), 1.0);
  EXPECT_EQ(f_pvalue(INFINITY, 3, 10), 0.0);
  // F(1, d) = T(d)^2
  for (double t : {0.5, 1.7, 3.2}) EXPECT_NEAR(f_pvalue(t * t, 1, 12), t_two_sided_pvalue(t, 12), 1e-12);
}

TEST(FPvalue, MatchesQuadratureOfDensity) {
  for (double d1 : {1.0, 2.0, 5.0, 12.0})
    for (double d2 : {3.0, 10.0, 40.0})
      for (double f : {0.2, 1.0, 2.5, 6.0})
        EXPECT_NEAR(f_pvalue(f, d1, d2), oracle::f_upper_tail_by_quadrature(f, d1, d2), 1e-5)
            << d1 << "," << d2 << "," << f;
}
