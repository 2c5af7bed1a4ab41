#pragma once

// Run configuration: one JSON file describing the Levy intensity, grid,
// potential, window, chain and verification parameters.
//
// Every key is optional. Defaults:
//   levy:      {"kind": "gamma", "theta": 1, "trunc": 1e-6}
//   grid:      {"dimension": 1, "delta": 1, "range": delta}
//   potential: {"family": "core-shell", "A": 10, "b": 1, "core": delta,
//               "range": grid.range, "include_diagonal": true}
//              step: "A", "radius" (= delta); zero: no parameters
//   window:    {"half_width": 0} (centered block of 2w+1 cubes per axis)
//              or {"lo": [...], "hi": [...]}
//   chain:     {"n_steps": 1e5, "burn_in": n_steps/5, "thinning": 10,
//               "move_mix": {"birth": .4, "death": .4, "resize": .2},
//               "audit_every": 1e4, "check_stability": true, "support_b_log": 1}
//   verify:    {"n_samples": 1e5, "chain_steps": 4e5, "thinning": 20}
//   sweep:     {"max_half_width": 2, "lambda_fraction": 0.5}
//   constants: {"eps_h": default, "delta_fraction": midpoint,
//               "lambda_fractions": [0.25, 0.5, 1]}
//   samples: 1, seed: 20240601, suites: ["all"], out_dir: "." (or $GAMMAGIBBS_OUT_DIR)

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gammagibbs/gibbs.hpp"
#include "gammagibbs/interaction.hpp"
#include "gammagibbs/levy.hpp"
#include "gammagibbs/verification.hpp"

namespace gammagibbs {

/// Parse or validation failure; `path` is the JSON key path ("/chain/thinning").
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct ChainParams {
    std::uint64_t n_steps = 100000;
    std::optional<std::uint64_t> burn_in;
    std::uint64_t thinning = 10;
    MoveMix move_mix;
    std::uint64_t audit_every = 10000;
    bool check_stability = true;
    double support_b_log = 1.0;
};

struct SweepParams {
    int max_half_width = 2;
    double lambda_fraction = 0.5;
};

struct ConstantsParams {
    std::optional<double> eps_h;
    std::optional<double> delta_fraction;
    std::vector<double> lambda_fractions{0.25, 0.5, 1.0};
};

struct RunConfig {
    LevySpec levy = LevySpec::gamma(1.0, 1e-6);
    CubeGrid grid{1, 1.0, 1.0};
    PotentialSpec potential = certify_or_throw(PairPotential::core_shell(10.0, 1.0, 1.0, 1.0), CubeGrid(1, 1.0, 1.0));
    Window window = Window::centered_block(CubeGrid(1, 1.0, 1.0), 0);
    ChainParams chain;
    std::size_t n_samples = 100000;  // verify: free-measure sample count
    std::uint64_t chain_steps = 400000;
    std::uint64_t verify_thinning = 20;
    SweepParams sweep;
    ConstantsParams constants;
    std::size_t samples = 1;  // sample-gamma: number of independent draws
    std::uint64_t seed = 20240601;
    std::vector<std::string> suites{"all"};
    std::string out_dir;

    ChainConfig chain_config() const;
    SuiteConfig suite_config() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);
/// Configuration with every default applied.
RunConfig default_config();

/// $GAMMAGIBBS_OUT_DIR if set, otherwise ".".
std::string default_out_dir();

}  // namespace gammagibbs
