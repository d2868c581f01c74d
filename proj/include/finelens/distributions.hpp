#pragma once

namespace finelens {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

double t_cdf(double t, double df);
// Inverse Student-t CDF. Throws std::domain_error unless 0 < p < 1 and df >= 1.
double t_quantile(double p, double df);
// P(|T| >= |t|).
double t_two_sided_pvalue(double t, double df);

// Upper tail P(F >= f) of the F(df1, df2) distribution.
double f_pvalue(double f, double df1, double df2);

}  // namespace finelens
