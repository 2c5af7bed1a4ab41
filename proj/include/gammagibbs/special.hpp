#pragma once

#include <functional>
#include <span>

namespace gammagibbs::special {

/// Exponential integral E_1(x) = int_x^inf e^{-t}/t dt, x > 0.
double expint_e1(double x);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Survival function of the chi-square law with `dof` degrees of freedom.
double chi_square_sf(double statistic, double dof);

/// Asymptotic Kolmogorov survival P(K > t) = 2 sum (-1)^{k-1} e^{-2 k^2 t^2}.
double kolmogorov_sf(double t);

/// Two-sided one-sample KS statistic D_n of `sample` against `cdf`.
/// The sample is copied and sorted.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);

/// p-value of D_n with Stephens' finite-n correction.
double ks_pvalue(double d, std::size_t n);

/// Adaptive Gauss-Kronrod integral of f over [a, b] (b may be +inf).
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12);

}  // namespace gammagibbs::special
