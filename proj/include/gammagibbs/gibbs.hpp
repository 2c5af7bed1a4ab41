#pragma once

// Finite-volume Gibbs kernels pi_Delta(.|xi): a birth/death/resize
// Metropolis-Hastings chain targeting e^{-H_Delta(eta|xi)} relative to the
// truncated Gamma reference, partition-function estimates, and the
// nested-window diagnostics built on top of the chain.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gammagibbs/interaction.hpp"
#include "gammagibbs/levy.hpp"
#include "gammagibbs/measure.hpp"
#include "gammagibbs/rng.hpp"
#include "gammagibbs/stats.hpp"

namespace gammagibbs {

struct MoveMix {
    double birth = 0.4;
    double death = 0.4;
    double resize = 0.2;
};

struct ChainConfig {
    ChainConfig(LevySpec levy, PotentialSpec potential, Window window, DiscreteMeasure boundary = {});

    std::uint64_t n_steps = 100000;
    std::uint64_t burn_in = 20000;
    std::uint64_t thinning = 10;
    MoveMix move_mix;
    std::uint64_t seed = 1;
    LevySpec levy;
    PotentialSpec potential;
    Window window;
    DiscreteMeasure boundary;

    std::uint64_t audit_every = 10000;
    /// Assert H >= the stability bound on every retained sample.
    bool check_stability = true;
    /// b_log in the K^s support diagnostic.
    double support_b_log = 1.0;

    /// Sets burn_in to 20% of n_steps.
    void default_burn_in() { burn_in = n_steps / 5; }
    void validate() const;
};

struct MoveCounters {
    std::uint64_t proposed = 0;
    std::uint64_t accepted = 0;
    double rate() const { return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0; }
};

struct ChainState {
    DiscreteMeasure eta;
    double energy = 0.0;
    std::uint64_t step = 0;
    MoveCounters birth, death, resize;
};

class EnergyAuditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StabilityViolation : public std::runtime_error {
public:
    StabilityViolation(const std::string& what, DiscreteMeasure witness)
        : std::runtime_error(what), witness_(std::move(witness)) {}
    const DiscreteMeasure& witness() const { return witness_; }

private:
    DiscreteMeasure witness_;
};

struct AuditSummary {
    std::uint64_t audits = 0;
    double max_relative_error = 0.0;
    bool passed = true;
};

/// One chain: its state, RNG stream and spatial index.
class GibbsChain {
public:
    static constexpr double kAuditTolerance = 1e-8;

    explicit GibbsChain(ChainConfig config, std::optional<DiscreteMeasure> initial = {});

    const ChainConfig& config() const { return config_; }
    const ChainState& state() const { return state_; }
    const LocalEnergy& energy() const { return energy_; }
    /// nu(Delta) = truncated mass times m(Delta).
    double reference_mass() const { return nu_; }
    const AuditSummary& audit_summary() const { return audit_; }

    /// One Metropolis-Hastings step; audits the cached energy on schedule.
    void step();
    /// Recomputes H and compares it with the cache; throws EnergyAuditError
    /// beyond kAuditTolerance (relative), otherwise resynchronizes the cache.
    void audit();

    /// Advances the chain and returns the kind of move that was proposed
    /// (0 birth, 1 death, 2 resize) and whether it was accepted.
    std::pair<int, bool> step_detailed();

private:
    ChainConfig config_;
    Rng rng_;
    LocalEnergy energy_;
    ChainState state_;
    double nu_;
    double log_birth_ratio_;  // log(p_death / p_birth)
    AuditSummary audit_;
};

/// Single MH step from an arbitrary state (rebuilds the energy index; the
/// chain class is the efficient path).
ChainState mh_step(const ChainState& state, const ChainConfig& config, Rng& rng);

struct FluxReport {
    std::vector<double> bin_edges;  // on eta(Delta)
    std::vector<std::vector<std::uint64_t>> counts;
    double max_abs_z = 0.0;
    bool symmetric = true;  // max |z| <= 4
};

struct ChainDiagnostics {
    MoveCounters birth, death, resize;
    double ess_mass = 0.0;  // ESS of eta(Delta) over retained samples
    AuditSummary audit;
    FluxReport flux;
    double support_fraction = 0.0;  // mean fraction of cubes with eta(Q_k)^2 > b_log log(1+|k|)
    std::uint64_t stability_checks = 0;
    std::uint64_t stability_violations = 0;
    std::size_t retained = 0;
};

struct SpecificationRun {
    std::vector<DiscreteMeasure> samples;
    ChainDiagnostics diagnostics;
};

SpecificationRun run_specification(const ChainConfig& config, std::optional<DiscreteMeasure> initial = {});

/// Z_Delta(xi) by plain Monte Carlo over the truncated Gamma reference.
/// Throws if the estimate is not positive, or exceeds 1 + 3 SE when phi >= 0.
Estimate estimate_partition_function(const Window& window, const DiscreteMeasure& xi, const PotentialSpec& spec,
                                     const LevySpec& levy, std::size_t n_samples, Rng& rng);

/// Local functional of a configuration, evaluated on a sub-window.
struct LocalFunctional {
    std::string name;
    std::function<double(const DiscreteMeasure&)> f;
};

struct ConsistencyLine {
    std::string name;
    Estimate direct;
    Estimate resampled;
    double z = 0.0;
};

struct ConsistencyReport {
    std::vector<ConsistencyLine> lines;
    double max_abs_z = 0.0;
    bool pass = false;  // all |z| <= 4
};

struct ConsistencyOptions {
    std::uint64_t inner_steps = 200;
    /// Multiplies the inner Hamiltonian (1 = the correct kernel; 2 = the
    /// deliberately wrong kernel of the negative control).
    double inner_energy_scale = 1.0;
    /// Threshold c of the indicator functional 1{eta(small) <= c}.
    double indicator_level = 0.5;
};

/// Compares E[f(eta_small)] under direct pi_big sampling with the same
/// expectation after resampling the small window by pi_small, with the rest
/// of the big-window state as boundary. Two independent chains feed the two
/// pipelines.
ConsistencyReport consistency_check(const Window& small, const Window& big, const DiscreteMeasure& xi,
                                    const ChainConfig& config, const ConsistencyOptions& options = {});

/// E[exp(lambda eta(Q_k)^2)] over chain samples (autocorrelation-aware SE).
Estimate exp_moment(const std::vector<DiscreteMeasure>& samples, double lambda, const CubeIndex& cube,
                    const CubeGrid& grid);

struct SweepLine {
    std::string statistic;
    std::vector<Estimate> per_window;
    std::vector<double> successive_z;
};

struct SweepReport {
    std::vector<std::string> windows;
    std::vector<double> window_volumes;
    std::vector<SweepLine> lines;
    double max_abs_z = 0.0;
    bool stabilized = false;  // last two windows within 4 combined SE for every statistic
    bool all_within = false;  // every successive pair within 4 combined SE
};

struct SweepOptions {
    Window observation;
    CubeIndex cube;  // for the exp-moment statistic
    double lambda = 0.0;
};

/// Runs one independent chain per window and tracks E[eta(obs)],
/// E[e^{-eta(obs)}], E[exp(lambda eta(Q_cube)^2)] across the sequence.
SweepReport thermodynamic_sweep(const std::vector<Window>& windows, const DiscreteMeasure& xi,
                                const ChainConfig& config, const SweepOptions& options);

}  // namespace gammagibbs
