#include "gammagibbs/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace gammagibbs::special {

double expint_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("expint_e1 requires x > 0");
    if (std::isinf(x)) return 0.0;
    return boost::math::expint(1, x);
}

double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(a, x);
}

double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(a, x);
}

double chi_square_sf(double statistic, double dof) {
    if (!(dof > 0.0)) throw std::domain_error("chi_square_sf requires dof > 0");
    return gamma_q(dof / 2.0, statistic / 2.0);
}

double kolmogorov_sf(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * t * t);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, rel_tol, &err);
}

}  // namespace gammagibbs::special
