// gammagibbs: sampling, verification and bound tables from one config file.
//
//   gammagibbs sample-gamma  [--config f] [--seed n] [--samples n] [--out dir]
//   gammagibbs sample-gibbs  [--config f] [--seed n] [--out dir]
//   gammagibbs verify        [--suite name] [--config f] [--seed n] [--out report.json]
//   gammagibbs sweep         [--config f] [--seed n] [--out sweep.csv]
//   gammagibbs constants     [--config f] [--json]
//
// Exit codes: 0 success, 1 a check failed, 2 configuration or usage error.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "gammagibbs/config.hpp"
#include "gammagibbs/io.hpp"
#include "gammagibbs/kernels.hpp"

namespace fs = std::filesystem;
using namespace gammagibbs;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

RunConfig load(const Common& c) {
    RunConfig rc = c.config.empty() ? default_config() : parse_config(c.config);
    if (c.seed) rc.seed = *c.seed;
    return rc;
}

std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_file(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << content;
}

SampleMetadata metadata(const RunConfig& rc, std::size_t n, const std::string& generator) {
    SampleMetadata m;
    m.kind = "gamma";
    m.theta = rc.levy.theta();
    m.trunc = rc.levy.trunc();
    m.dimension = rc.grid.dimension();
    m.window = rc.window.describe();
    if (rc.window.is_cube_aligned()) {
        for (int i = 0; i < m.dimension; ++i) {
            double lo = INFINITY, hi = -INFINITY;
            for (const auto& k : rc.window.cubes()) {
                lo = std::min(lo, rc.grid.lower(k, i));
                hi = std::max(hi, rc.grid.upper(k, i));
            }
            m.window_lo.push_back(lo);
            m.window_hi.push_back(hi);
        }
    } else {
        m.window_lo = rc.window.lo();
        m.window_hi = rc.window.hi();
    }
    m.seed = rc.seed;
    m.n_samples = n;
    m.generator = generator;
    m.timestamp = now_utc();
    return m;
}

void dump_samples(const fs::path& dir, const RunConfig& rc, const std::vector<DiscreteMeasure>& samples,
                  const std::string& generator) {
    fs::create_directories(dir);
    std::ofstream csv(dir / "samples.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "samples.csv").string());
    write_samples_csv(csv, samples, rc.grid.dimension());
    write_file(dir / "samples.meta.json", metadata_json(metadata(rc, samples.size(), generator)));
}

fs::path out_dir(const Common& c, const RunConfig& rc) { return c.out.empty() ? fs::path(rc.out_dir) : fs::path(c.out); }

int cmd_sample_gamma(const Common& c, std::size_t n_override) {
    RunConfig rc = load(c);
    const std::size_t n = n_override ? n_override : rc.samples;
    Rng rng(rc.seed, 0);
    std::vector<DiscreteMeasure> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) samples.push_back(sample_gamma_measure(rc.levy, rc.window, rng));
    const auto dir = out_dir(c, rc);
    dump_samples(dir, rc, samples, "direct");
    std::cout << "wrote " << n << " samples to " << (dir / "samples.csv").string() << "\n";
    return kOk;
}

int cmd_sample_gibbs(const Common& c) {
    RunConfig rc = load(c);
    const auto run = run_specification(rc.chain_config());
    const auto dir = out_dir(c, rc);
    dump_samples(dir, rc, run.samples, "gibbs");
    write_file(dir / "diagnostics.json", diagnostics_json(run.diagnostics));
    if (rc.potential.certified) {
        const auto t = constants_table(rc.potential, rc.levy.theta(), rc.constants.eps_h, rc.constants.lambda_fractions,
                                       rc.constants.delta_fraction, rc.window);
        write_file(dir / "constants.json", constants_json(t));
    }
    const auto& d = run.diagnostics;
    std::cout << "retained " << d.retained << " samples; acceptance birth " << d.birth.rate() << ", death "
              << d.death.rate() << ", resize " << d.resize.rate() << "; ESS(mass) " << d.ess_mass << "\n"
              << "wrote " << dir.string() << "\n";
    return d.audit.passed && d.stability_violations == 0 ? kOk : kCheckFailed;
}

int cmd_verify(const Common& c, const std::string& suite) {
    RunConfig rc = load(c);
    std::vector<std::string> suites = suite.empty() ? rc.suites : std::vector<std::string>{suite};
    bool ok = true;
    for (const auto& name : suites) {
        const auto rep = run_suite(name, rc.suite_config());
        std::cout << report_table(rep);
        fs::path p = c.out.empty() ? fs::path(rc.out_dir) / ("report-" + name + ".json") : fs::path(c.out);
        if (!c.out.empty() && suites.size() > 1) p = p.parent_path() / (p.stem().string() + "-" + name + ".json");
        write_file(p, report_json(rep, rc.seed));
        std::cout << "report: " << p.string() << "\n";
        ok = ok && rep.all_pass();
    }
    return ok ? kOk : kCheckFailed;
}

int cmd_sweep(const Common& c) {
    RunConfig rc = load(c);
    if (!rc.window.is_cube_aligned()) throw ConfigError("/window", "sweep needs a cube-aligned window");
    std::vector<Window> windows;
    for (int w = 0; w <= rc.sweep.max_half_width; ++w) windows.push_back(Window::centered_block(rc.grid, w));
    SweepOptions opt{Window::centered_block(rc.grid, 0), rc.grid.origin(), 0.0};
    if (rc.potential.certified)
        opt.lambda = rc.sweep.lambda_fraction *
                     bound_constants(rc.potential, rc.levy.theta(), default_eps_h(rc.potential, rc.levy.theta()),
                                     windows.front())
                         .lambda0;
    const auto rep = thermodynamic_sweep(windows, DiscreteMeasure(rc.grid.dimension()), rc.chain_config(), opt);
    const fs::path p = c.out.empty() ? fs::path(rc.out_dir) / "sweep.csv" : fs::path(c.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    write_sweep_csv(f, rep);
    std::cout << "max |z| between successive windows " << rep.max_abs_z << "; "
              << (rep.all_within ? "stabilized" : "NOT stabilized") << "\nwrote " << p.string() << "\n";
    return rep.all_within ? kOk : kCheckFailed;
}

int cmd_constants(const Common& c, bool as_json) {
    RunConfig rc = load(c);
    const auto t = constants_table(rc.potential, rc.levy.theta(), rc.constants.eps_h, rc.constants.lambda_fractions,
                                   rc.constants.delta_fraction, rc.window);
    std::cout << (as_json ? constants_json(t) : constants_text(t));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gamma random measures and their Gibbs perturbations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "gammagibbs 1.0 (" + std::string(kernels::isa_name(kernels::active_isa())) + ")");

    Common common;
    auto add_common = [&](CLI::App* sub, const char* out_help) {
        sub->add_option("--config", common.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "override the configured seed");
        sub->add_option("--out", common.out, out_help);
    };

    std::size_t n_samples = 0;
    auto* sg = app.add_subcommand("sample-gamma", "draw Gamma random measures on the window");
    add_common(sg, "output directory (default $GAMMAGIBBS_OUT_DIR or .)");
    sg->add_option("--samples", n_samples, "number of draws (overrides the config)");

    auto* sb = app.add_subcommand("sample-gibbs", "run the Metropolis-Hastings chain on the window");
    add_common(sb, "output directory (default $GAMMAGIBBS_OUT_DIR or .)");

    std::string suite;
    auto* sv = app.add_subcommand("verify", "run a verification suite");
    add_common(sv, "report path (default <out_dir>/report-<suite>.json)");
    sv->add_option("--suite", suite, "suite name")->check(CLI::IsMember(suite_names()));

    auto* ss = app.add_subcommand("sweep", "thermodynamic sweep over nested windows");
    add_common(ss, "CSV path (default <out_dir>/sweep.csv)");

    bool as_json = false;
    auto* sc = app.add_subcommand("constants", "print the bound constants table");
    sc->add_option("--config", common.config, "JSON run configuration")->check(CLI::ExistingFile);
    sc->add_flag("--json", as_json, "emit JSON instead of a table");

    if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
        std::cerr << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
        return kConfigError;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kConfigError;
    }

    try {
        if (*sg) return cmd_sample_gamma(common, n_samples);
        if (*sb) return cmd_sample_gibbs(common);
        if (*sv) return cmd_verify(common, suite);
        if (*ss) return cmd_sweep(common);
        if (*sc) return cmd_constants(common, as_json);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const BoundsError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
    return kConfigError;
}
