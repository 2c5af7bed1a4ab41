#pragma once

// Monte Carlo estimates with standard errors, effective sample sizes and the
// few goodness-of-fit statistics the checks need.

#include <cstdint>
#include <span>
#include <vector>

namespace gammagibbs {

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    double n_effective = 0.0;
    std::uint64_t raw_n = 0;

    double se() const { return stderr_; }
    static Estimate exact(double value);
};

/// i.i.d. estimate: sample mean and sd / sqrt(n).
Estimate iid_estimate(std::span<const double> xs);

/// Autocorrelated series: variance inflated by the integrated autocorrelation
/// time from Geyer's initial positive sequence.
Estimate chain_estimate(std::span<const double> xs);

/// Effective sample size by Geyer's initial positive sequence, capped at n.
double effective_sample_size(std::span<const double> xs);

double sample_variance(std::span<const double> xs);

/// z = (a - b) / sqrt(se_a^2 + se_b^2) for independent estimates.
double z_independent(const Estimate& a, const Estimate& b);

/// Signed z of diff against its standard error; 0 when both vanish and a huge
/// finite value of the right sign when only the error vanishes.
double safe_z(double diff, double se);

struct CovarianceEstimate {
    double cov = 0.0;
    double se = 0.0;
};
/// Sample covariance with a delta-method standard error.
CovarianceEstimate covariance(std::span<const double> f, std::span<const double> g);

struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
    int bins = 0;
};
/// Pearson chi-square of integer counts against Poisson(mean); tail bins are
/// pooled until every expected count is at least 5.
ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> counts, double mean);

}  // namespace gammagibbs
