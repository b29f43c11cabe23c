#pragma once

namespace psgarch::dist {

double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
// separately keeps precision when x is close to one.
double incomplete_beta(double a, double b, double x, double y);
double incomplete_beta(double a, double b, double x);

// Student-t with nu > 0 degrees of freedom (location 0, scale 1).
double student_t_pdf(double x, double nu);
double student_t_log_pdf(double x, double nu);
double student_t_cdf(double x, double nu);
// Inverse of student_t_cdf by bracketing and Illinois-type secant steps.
double student_t_quantile(double p, double nu);

}  // namespace psgarch::dist
