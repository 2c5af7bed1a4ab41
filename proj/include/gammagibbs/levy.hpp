#pragma once

// Levy intensities on the mark axis and the compound-Poisson sampler that
// turns them into random discrete measures on bounded windows.

#include <functional>
#include <stdexcept>
#include <memory>
#include <vector>

#include "gammagibbs/lattice.hpp"
#include "gammagibbs/measure.hpp"

namespace gammagibbs {

class Rng;

enum class LevyKind { Gamma, Generic };

/// Mark intensity lambda(ds) with a small-mark truncation threshold.
///
/// Gamma kind: lambda_theta(ds) = theta e^{-s}/s ds. Generic kind: any density
/// with infinite total mass and finite first two moments; marks are then drawn
/// by inverting a tabulated CDF.
class LevySpec {
public:
    static LevySpec gamma(double theta, double trunc);
    /// Validates the supplied moments against quadrature (1e-6 relative) and
    /// builds the inversion table when trunc > 0.
    static LevySpec generic(std::function<double(double)> density, double first_moment, double second_moment,
                            double trunc);

    LevyKind kind() const { return kind_; }
    bool is_gamma() const { return kind_ == LevyKind::Gamma; }
    double theta() const { return theta_; }
    double trunc() const { return trunc_; }
    double density(double s) const;
    double first_moment() const { return first_moment_; }
    double second_moment() const { return second_moment_; }

    /// Same intensity with a different threshold.
    LevySpec with_trunc(double trunc) const;
    /// Same kind with the intensity multiplied by `factor` (used by negative controls).
    LevySpec scaled(double factor) const;

    /// Mass beyond the tabulated range that generic sampling drops (0 for Gamma).
    double table_tail_loss() const;
    /// Max |table CDF - quadrature CDF| at interval midpoints (0 for Gamma).
    double table_max_error() const;

    struct InversionTable;

private:
    LevyKind kind_ = LevyKind::Gamma;
    double theta_ = 1.0;
    double trunc_ = 0.0;
    double first_moment_ = 1.0;
    double second_moment_ = 1.0;
    double scale_ = 1.0;
    double p_head_ = 0.0;      // gamma sampler: probability of the [trunc, 1] piece
    double mass_cache_ = 0.0;  // gamma: theta E_1(trunc)
    std::function<double(double)> density_;
    std::shared_ptr<const InversionTable> table_;

    friend double truncated_mass(const LevySpec&);
    friend double sample_mark(const LevySpec&, Rng&);
};

struct TruncationBias {
    double mean_loss = 0.0;
    double variance_loss = 0.0;
};

class InfiniteMassError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// int_{trunc}^inf lambda(ds); throws InfiniteMassError for trunc = 0.
double truncated_mass(const LevySpec& spec);

/// Mean and variance of the mass removed by truncation on a window of volume m(Delta).
TruncationBias truncation_bias(const LevySpec& spec, double window_volume);
TruncationBias truncation_bias(const LevySpec& spec, const Window& window);

/// One mark from lambda restricted to [trunc, inf), normalized.
double sample_mark(const LevySpec& spec, Rng& rng);

/// One mark from the size-biased law s lambda(ds) on [trunc, inf), normalized.
/// Gamma kind only: this is the unit exponential shifted to the threshold.
double sample_size_biased_mark(const LevySpec& spec, Rng& rng);
/// int_{trunc}^inf s lambda(ds).
double truncated_first_moment(const LevySpec& spec);

/// Marked Poisson process with intensity lambda_trunc (x) Lebesgue on the
/// window, mapped to a discrete measure.
DiscreteMeasure sample_gamma_measure(const LevySpec& spec, const Window& window, Rng& rng);

}  // namespace gammagibbs
