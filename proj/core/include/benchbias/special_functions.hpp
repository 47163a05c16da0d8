#ifndef BENCHBIAS_SPECIAL_FUNCTIONS_HPP
#define BENCHBIAS_SPECIAL_FUNCTIONS_HPP

namespace benchbias {

/// I_x(a, b), continued-fraction evaluation. a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided_pvalue(double t, double df);

/// Survival function of the limiting Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

}  // namespace benchbias

#endif  // BENCHBIAS_SPECIAL_FUNCTIONS_HPP
