#pragma once

namespace vthink::scoring::stats {

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
/// Continued-fraction evaluation (modified Lentz), using the symmetry
/// I_x(a,b) = 1 - I_{1-x}(b,a) where the fraction converges slowly.
double incomplete_beta(double a, double b, double x);

double student_t_pdf(double t, double df);
double student_t_cdf(double t, double df);

/// Two-sided tail probability P(|T| >= |t|), computed directly from the
/// incomplete beta so small p-values keep their relative precision.
double student_t_two_sided_p(double t, double df);

/// Inverse CDF for p in (0, 1).
double student_t_quantile(double p, double df);

}  // namespace vthink::scoring::stats
