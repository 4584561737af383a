// SPDX-License-Identifier: Apache-2.0
#ifndef DEPTHCOV_SPECIAL_HPP
#define DEPTHCOV_SPECIAL_HPP

namespace depthcov {

double normal_cdf(double x);
double normal_pdf(double x);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double beta_inc(double a, double b, double x);

// Chi-squared CDF with dof degrees of freedom.
double chi_squared_cdf(double dof, double x);

// Student-t CDF with dof degrees of freedom.
double student_t_cdf(double dof, double t);

// Upper quantile: smallest t with student_t_cdf(dof, t) >= q, q in (0, 1).
double student_t_quantile(double dof, double q);

}  // namespace depthcov

#endif  // DEPTHCOV_SPECIAL_HPP
