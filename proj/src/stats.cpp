#include "gammagibbs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gammagibbs/special.hpp"

namespace gammagibbs {

Estimate Estimate::exact(double value) { return {value, 0.0, std::numeric_limits<double>::infinity(), 0}; }

double sample_variance(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(n - 1);
}

Estimate iid_estimate(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("estimate of an empty sample");
    const auto n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    return {mean, std::sqrt(sample_variance(xs) / n), n, xs.size()};
}

double effective_sample_size(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 4) return static_cast<double>(n);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    auto acov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += (xs[i] - mean) * (xs[i + lag] - mean);
        return s / static_cast<double>(n);
    };
    const double c0 = acov(0);
    if (!(c0 > 0.0)) return static_cast<double>(n);
    // Pair sums Gamma_m = rho(2m) + rho(2m+1) are positive and decreasing for
    // a reversible chain; stop at the first nonpositive one.
    double tau = -1.0;  // tau = -1 + 2 sum_m Gamma_m
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
        double pair = (acov(2 * m) + acov(2 * m + 1)) / c0;
        if (pair <= 0.0) break;
        pair = std::min(pair, prev);
        tau += 2.0 * pair;
        prev = pair;
    }
    tau = std::max(tau, 1.0 / static_cast<double>(n));
    return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

Estimate chain_estimate(std::span<const double> xs) {
    Estimate e = iid_estimate(xs);
    const double ess = effective_sample_size(xs);
    e.n_effective = ess;
    e.stderr_ = std::sqrt(sample_variance(xs) / ess);
    return e;
}

double z_independent(const Estimate& a, const Estimate& b) {
    return safe_z(a.mean - b.mean, std::hypot(a.se(), b.se()));
}

double safe_z(double diff, double se) {
    if (se > 0.0) return diff / se;
    if (diff == 0.0) return 0.0;
    return std::copysign(1e300, diff);
}

CovarianceEstimate covariance(std::span<const double> f, std::span<const double> g) {
    if (f.size() != g.size() || f.size() < 2) throw std::invalid_argument("covariance: need paired samples");
    const auto n = static_cast<double>(f.size());
    double mf = 0.0, mg = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        mf += f[i];
        mg += g[i];
    }
    mf /= n;
    mg /= n;
    std::vector<double> u(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) u[i] = (f[i] - mf) * (g[i] - mg);
    double cov = 0.0;
    for (double v : u) cov += v;
    cov /= (n - 1.0);
    return {cov, std::sqrt(sample_variance(u) / n)};
}

ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> counts, double mean) {
    if (counts.empty()) throw std::invalid_argument("chi-square of an empty sample");
    if (!(mean > 0.0)) throw std::invalid_argument("chi-square: Poisson mean must be positive");
    const auto n = static_cast<double>(counts.size());
    const std::uint64_t kmax = *std::max_element(counts.begin(), counts.end());
    std::vector<double> observed(kmax + 1, 0.0);
    for (auto c : counts) observed[c] += 1.0;

    std::vector<double> pmf(kmax + 1);
    pmf[0] = std::exp(-mean);
    for (std::uint64_t k = 1; k <= kmax; ++k) pmf[k] = pmf[k - 1] * mean / static_cast<double>(k);

    // Pool from the left until expected >= 5, and fold everything from the
    // last cut upward (including P(K > kmax)) into one upper tail bin.
    std::vector<double> obs_b, exp_b;
    double o = 0.0, e = 0.0, cum = 0.0;
    for (std::uint64_t k = 0; k <= kmax; ++k) {
        o += observed[k];
        e += n * pmf[k];
        cum += pmf[k];
        const double rest = n * (1.0 - cum);
        if (e >= 5.0 && rest >= 5.0) {
            obs_b.push_back(o);
            exp_b.push_back(e);
            o = e = 0.0;
        }
    }
    e += n * std::max(0.0, 1.0 - cum);
    if (!exp_b.empty() && e < 5.0) {
        obs_b.back() += o;
        exp_b.back() += e;
    } else {
        obs_b.push_back(o);
        exp_b.push_back(e);
    }
    ChiSquareResult r;
    r.bins = static_cast<int>(obs_b.size());
    for (std::size_t i = 0; i < obs_b.size(); ++i) r.statistic += (obs_b[i] - exp_b[i]) * (obs_b[i] - exp_b[i]) / exp_b[i];
    r.dof = static_cast<double>(r.bins - 1);
    r.p_value = r.dof > 0 ? special::chi_square_sf(r.statistic, r.dof) : 1.0;
    return r;
}

}  // namespace gammagibbs
