#pragma once

namespace roadhawk {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Quantile of Beta(a, b): inverts incomplete_beta by bisection to 1e-10.
double beta_quantile(double a, double b, double prob);

// P(sup |B(t)| > x) for the Brownian bridge: 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_tail(double x);

// c with kolmogorov_tail(c) = alpha; the asymptotic KS band is c / sqrt(n).
double kolmogorov_critical(double alpha);

// Regularized incomplete gamma P(s, x) and the chi-square upper tail.
double incomplete_gamma_p(double s, double x);
double chi_square_tail(double statistic, int dof);

} // namespace roadhawk
