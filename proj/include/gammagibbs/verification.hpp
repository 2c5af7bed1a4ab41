#pragma once

// Statistical checks of the identities and bounds satisfied by Gamma random
// measures and their Gibbs perturbations. Every check returns a CheckReport.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gammagibbs/gibbs.hpp"
#include "gammagibbs/interaction.hpp"
#include "gammagibbs/levy.hpp"
#include "gammagibbs/stats.hpp"

namespace gammagibbs {

struct CheckReport {
    std::string name;
    Estimate lhs;
    Estimate rhs;
    double diff = 0.0;
    double diff_se = 0.0;
    double z = 0.0;
    double threshold = 3.0;
    double bias_budget = 0.0;
    /// Negative controls pass when the discrepancy is detected (|z| beyond
    /// threshold after removing the bias budget).
    bool negative_control = false;
    bool pass = false;
    std::string note;
};

/// Fills z and pass from diff, diff_se, threshold and bias_budget.
void finalize(CheckReport& r);

/// F(x, eta) for Mecke/GNZ checks, with a certified bound |F| <= sup.
struct PointFunctional {
    std::string name;
    std::function<double(std::span<const double>, const DiscreteMeasure&)> f;
    double sup = 0.0;
};

class FunctionalError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// F(x, eta) = 1_Delta(x).
PointFunctional indicator_functional(const Window& window);
/// F(x, eta) = 1_Delta(x) e^{-eta(Delta)}.
PointFunctional indicator_exp_mass_functional(const Window& window);
PointFunctional zero_functional();

struct MeckeOptions {
    double threshold = 3.0;
    /// Negative control: the right-hand side uses lambda scaled by this factor.
    double rhs_intensity_scale = 1.0;
    /// Adds the closed-form oracle for F = 1_Delta e^{-eta(Delta)} as a second line.
    bool closed_form = false;
};

/// E[sum_x s_x F(x, eta)] vs E[int int s F(x, eta + s delta_x) lambda(ds) dx]; the
/// right-hand side augments each sample by one atom (x*, s*) with x* uniform on
/// the window and s* size-biased (Gamma) or drawn from the truncated law and
/// reweighted (generic). Paired per sample.
std::vector<CheckReport> mecke_check(const LevySpec& levy, const Window& window, const PointFunctional& F,
                                     std::size_t n_samples, Rng& rng, const MeckeOptions& options = {});

enum class GnzMode { Weighted, Unweighted };

struct GnzOptions {
    GnzWeight weight = GnzWeight::Literal;
    GnzMode mode = GnzMode::Weighted;
    double threshold = 4.0;
};

class ConfigMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// GNZ identity on chain samples: the Mecke augmentation weighted by
/// exp(-W((s*, x*); eta)). The Phi weight is only consistent with a
/// Hamiltonian without the self-pair term; asking for it otherwise throws.
CheckReport gnz_check(const std::vector<DiscreteMeasure>& samples, const ChainConfig& config, const PointFunctional& F,
                      Rng& rng, const GnzOptions& options = {});

/// Increasing functional of the form f(<phi_1, eta>, ...), phi_i >= 0, f
/// coordinatewise increasing. Only certified ones are accepted by fkg_check.
struct MonotoneFunctional {
    std::string name;
    std::function<double(const DiscreteMeasure&)> f;
    bool certified_increasing = false;

    /// min(eta(window), cap): certified.
    static MonotoneFunctional capped_mass(const Window& window, double cap);
};

struct FkgResult {
    CheckReport report;
    bool strictly_positive = false;  // cov > 3 SE
};

/// One-sided association test Cov(F, G) >= -3 SE on direct Gamma samples.
FkgResult fkg_check(const LevySpec& levy, const Window& sampling_window, const MonotoneFunctional& F,
                    const MonotoneFunctional& G, std::size_t n_samples, Rng& rng);

/// E[e^{-t eta(Delta)}] vs the Laplace transform; bias budget is the exact
/// effect of truncation on the target.
CheckReport laplace_check(const LevySpec& levy, const Window& window, double t, std::size_t n_samples, Rng& rng);

/// E[eta(Delta)^n] vs the exact n-th moment (Gamma kind).
CheckReport moment_check(const LevySpec& levy, const Window& window, int order, std::size_t n_samples, Rng& rng);
/// Empirical E[eta(Delta)^n] against n! (theta m)^n (the stated polynomial bound
/// with phi = 1_Delta); one-sided.
CheckReport moment_bound_check(const LevySpec& levy, const Window& window, int order, std::size_t n_samples, Rng& rng);
/// Var(eta(Delta)) vs theta m(Delta), truncation-corrected.
CheckReport variance_check(const LevySpec& levy, const Window& window, std::size_t n_samples, Rng& rng);

/// Cov(f(eta(A)), g(eta(B))) for disjoint A, B with f = g = e^{-x}; target 0.
CheckReport independence_check(const LevySpec& levy, const Window& a, const Window& b, const Window& sampling_window,
                               std::size_t n_samples, Rng& rng);

/// KS test of eta(Delta) against Gamma(theta m(Delta), 1); pass iff p > level.
CheckReport marginal_ks_check(const LevySpec& levy, const Window& window, std::size_t n_samples, Rng& rng,
                              double level = 0.01);

struct SuiteReport {
    std::string suite;
    std::vector<CheckReport> checks;
    bool all_pass() const;
};

/// Parameters shared by the suites; the CLI fills these from the config file.
struct SuiteConfig {
    double theta = 1.0;
    double trunc = 1e-6;
    int dimension = 1;
    double delta = 1.0;
    double range = 1.0;
    PairPotential potential = PairPotential::core_shell(10.0, 1.0, 1.0, 1.0);
    std::uint64_t seed = 20240601;
    std::size_t n_samples = 100000;
    std::uint64_t chain_steps = 400000;
    std::uint64_t thinning = 20;
};

class UnknownSuiteError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Suites: "free-measure", "gibbs", "bounds", "negative-control", "all".
SuiteReport run_suite(const std::string& name, const SuiteConfig& config);
std::vector<std::string> suite_names();

}  // namespace gammagibbs
