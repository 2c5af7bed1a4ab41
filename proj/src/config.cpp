#include "gammagibbs/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gammagibbs {

using nlohmann::json;

namespace {

// Tracks object keys during parsing so duplicates are caught before the
// parser silently keeps the last one.
class DuplicateGuard {
public:
    bool operator()(int depth, json::parse_event_t event, json& parsed) {
        switch (event) {
            case json::parse_event_t::object_start:
                keys_.emplace_back();
                break;
            case json::parse_event_t::object_end:
                keys_.pop_back();
                break;
            case json::parse_event_t::key: {
                const auto k = parsed.get<std::string>();
                path_.resize(static_cast<std::size_t>(depth - 1));
                path_.push_back(k);
                if (!keys_.back().insert(k).second) throw ConfigError(path(), "duplicate key '" + k + "'");
                break;
            }
            default:
                break;
        }
        return true;
    }

private:
    std::string path() const {
        std::string p;
        for (const auto& k : path_) p += "/" + k;
        return p;
    }
    std::vector<std::set<std::string>> keys_;
    std::vector<std::string> path_;
};

class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

    void allow(std::initializer_list<const char*> keys) const {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool known = false;
            for (const char* k : keys) known = known || it.key() == k;
            if (!known) throw ConfigError(path_ + "/" + it.key(), "unknown key");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    Node child(const char* key) const { return {j_.at(key), path_ + "/" + key}; }

    double number(const char* key, double fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(path_ + "/" + key, "expected a number");
        return v.get<double>();
    }
    double positive(const char* key, double fallback) const {
        const double v = number(key, fallback);
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(path_ + "/" + key, "must be positive and finite");
        return v;
    }
    std::uint64_t count(const char* key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
        }
        throw ConfigError(path_ + "/" + key, "expected a non-negative integer");
    }
    bool boolean(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(path_ + "/" + key, "expected true or false");
        return v.get<bool>();
    }
    std::string string(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(path_ + "/" + key, "expected a string");
        return v.get<std::string>();
    }
    std::vector<double> numbers(const char* key) const {
        const auto& v = j_.at(key);
        if (!v.is_array()) throw ConfigError(path_ + "/" + key, "expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(path_ + "/" + key, "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

private:
    const json& j_;
    std::string path_;
};

void parse_chain(const Node& n, ChainParams& c) {
    n.allow({"n_steps", "burn_in", "thinning", "move_mix", "audit_every", "check_stability", "support_b_log"});
    c.n_steps = n.count("n_steps", c.n_steps);
    if (n.has("burn_in")) c.burn_in = n.count("burn_in", 0);
    c.thinning = n.count("thinning", c.thinning);
    c.audit_every = n.count("audit_every", c.audit_every);
    c.check_stability = n.boolean("check_stability", c.check_stability);
    c.support_b_log = n.number("support_b_log", c.support_b_log);
    if (n.has("move_mix")) {
        const Node m = n.child("move_mix");
        m.allow({"birth", "death", "resize"});
        c.move_mix = {m.number("birth", c.move_mix.birth), m.number("death", c.move_mix.death),
                      m.number("resize", c.move_mix.resize)};
    }
    if (c.n_steps == 0) throw ConfigError(n.path() + "/n_steps", "must be positive");
    if (c.thinning == 0) throw ConfigError(n.path() + "/thinning", "must be positive");
    if (c.burn_in && *c.burn_in >= c.n_steps) throw ConfigError(n.path() + "/burn_in", "must be smaller than n_steps");
}

}  // namespace

ChainConfig RunConfig::chain_config() const {
    ChainConfig c(levy, potential, window);
    c.n_steps = chain.n_steps;
    c.default_burn_in();
    if (chain.burn_in) c.burn_in = *chain.burn_in;
    c.thinning = chain.thinning;
    c.move_mix = chain.move_mix;
    c.seed = seed;
    c.audit_every = chain.audit_every;
    c.check_stability = chain.check_stability;
    c.support_b_log = chain.support_b_log;
    return c;
}

SuiteConfig RunConfig::suite_config() const {
    SuiteConfig s;
    s.theta = levy.theta();
    s.trunc = levy.trunc();
    s.dimension = grid.dimension();
    s.delta = grid.delta();
    s.range = grid.range();
    s.potential = potential.potential;
    s.seed = seed;
    s.n_samples = n_samples;
    s.chain_steps = chain_steps;
    s.thinning = verify_thinning;
    return s;
}

std::string default_out_dir() {
    const char* env = std::getenv("GAMMAGIBBS_OUT_DIR");
    return env && *env ? std::string(env) : std::string(".");
}

RunConfig default_config() { return parse_config_text("{}"); }

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text, DuplicateGuard{});
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("parse error: ") + e.what());
    }
    const Node top(root, "");
    top.allow({"levy", "grid", "potential", "window", "chain", "verify", "sweep", "constants", "samples", "seed",
               "suites", "out_dir"});
    RunConfig rc;

    // levy
    double theta = 1.0, trunc = 1e-6;
    if (top.has("levy")) {
        const Node n = top.child("levy");
        n.allow({"kind", "theta", "trunc"});
        if (n.string("kind", "gamma") != "gamma")
            throw ConfigError("/levy/kind", "only the gamma kind is configurable from a file");
        theta = n.positive("theta", theta);
        trunc = n.positive("trunc", trunc);
    }
    rc.levy = LevySpec::gamma(theta, trunc);

    // grid
    int dim = 1;
    double delta = 1.0, range = 1.0;
    {
        std::optional<double> r;
        if (top.has("grid")) {
            const Node n = top.child("grid");
            n.allow({"dimension", "delta", "range"});
            const auto d = n.count("dimension", 1);
            if (d < 1 || d > 8) throw ConfigError("/grid/dimension", "must be between 1 and 8");
            dim = static_cast<int>(d);
            delta = n.positive("delta", delta);
            if (n.has("range")) r = n.positive("range", 1.0);
        }
        range = r.value_or(delta);
        if (range < delta) throw ConfigError("/grid/range", "must be at least delta");
    }
    rc.grid = CubeGrid(dim, delta, range);

    // potential
    {
        std::string family = "core-shell";
        PairPotential pot = PairPotential::core_shell(10.0, 1.0, delta, range);
        bool diag = true;
        if (top.has("potential")) {
            const Node n = top.child("potential");
            family = n.string("family", family);
            diag = n.boolean("include_diagonal", true);
            if (family == "core-shell") {
                n.allow({"family", "A", "b", "core", "range", "include_diagonal"});
                const double b = n.number("b", 1.0);
                if (b < 0.0) throw ConfigError("/potential/b", "attraction depth must be non-negative");
                pot = PairPotential::core_shell(n.positive("A", 10.0), b, n.positive("core", delta),
                                                n.positive("range", range));
            } else if (family == "step") {
                n.allow({"family", "A", "radius", "include_diagonal"});
                pot = PairPotential::step(n.positive("A", 10.0), n.positive("radius", delta));
            } else if (family == "zero") {
                n.allow({"family", "include_diagonal"});
                pot = PairPotential::zero();
            } else {
                throw ConfigError("/potential/family", "unknown family '" + family +
                                                           "' (expected core-shell, step or zero)");
            }
        }
        if (pot.support() > range)
            throw ConfigError("/potential", "support " + std::to_string(pot.support()) + " exceeds grid range " +
                                                std::to_string(range));
        if (pot.family() == PotentialFamily::Zero) {
            rc.potential = uncertified(pot, rc.grid);
        } else {
            auto result = certify(pot, rc.grid);
            if (auto* rej = std::get_if<Rejection>(&result))
                throw ConfigError("/potential", rej->clause + ": " + rej->message);
            rc.potential = std::get<PotentialSpec>(result);
        }
        rc.potential.include_diagonal = diag;
    }

    // window
    rc.window = Window::centered_block(rc.grid, 0);
    if (top.has("window")) {
        const Node n = top.child("window");
        n.allow({"half_width", "lo", "hi"});
        const bool box = n.has("lo") || n.has("hi");
        if (box && n.has("half_width")) throw ConfigError("/window", "give either half_width or lo/hi, not both");
        if (box) {
            if (!n.has("lo") || !n.has("hi")) throw ConfigError("/window", "lo and hi must be given together");
            auto lo = n.numbers("lo"), hi = n.numbers("hi");
            if (lo.size() != static_cast<std::size_t>(dim) || hi.size() != lo.size())
                throw ConfigError("/window", "lo and hi must have grid.dimension entries");
            for (std::size_t i = 0; i < lo.size(); ++i)
                if (!(lo[i] < hi[i])) throw ConfigError("/window", "lo must be below hi on every axis");
            rc.window = Window::box(std::move(lo), std::move(hi));
        } else {
            const auto w = n.count("half_width", 0);
            if (w > 1000) throw ConfigError("/window/half_width", "too large");
            rc.window = Window::centered_block(rc.grid, static_cast<int>(w));
        }
    }

    if (top.has("chain")) parse_chain(top.child("chain"), rc.chain);

    if (top.has("verify")) {
        const Node n = top.child("verify");
        n.allow({"n_samples", "chain_steps", "thinning"});
        rc.n_samples = n.count("n_samples", rc.n_samples);
        rc.chain_steps = n.count("chain_steps", rc.chain_steps);
        rc.verify_thinning = n.count("thinning", rc.verify_thinning);
        if (rc.n_samples < 2) throw ConfigError("/verify/n_samples", "must be at least 2");
        if (rc.verify_thinning == 0) throw ConfigError("/verify/thinning", "must be positive");
        if (rc.chain_steps < 5 * rc.verify_thinning) throw ConfigError("/verify/chain_steps", "too few steps");
    }

    if (top.has("sweep")) {
        const Node n = top.child("sweep");
        n.allow({"max_half_width", "lambda_fraction"});
        const auto w = n.count("max_half_width", 2);
        if (w < 1 || w > 50) throw ConfigError("/sweep/max_half_width", "must be between 1 and 50");
        rc.sweep.max_half_width = static_cast<int>(w);
        rc.sweep.lambda_fraction = n.positive("lambda_fraction", rc.sweep.lambda_fraction);
    }

    if (top.has("constants")) {
        const Node n = top.child("constants");
        n.allow({"eps_h", "delta_fraction", "lambda_fractions"});
        if (n.has("eps_h")) rc.constants.eps_h = n.positive("eps_h", 1.0);
        if (n.has("delta_fraction")) {
            const double f = n.number("delta_fraction", 0.5);
            if (!(f > 0.0 && f < 1.0)) throw ConfigError("/constants/delta_fraction", "must lie in (0, 1)");
            rc.constants.delta_fraction = f;
        }
        if (n.has("lambda_fractions")) {
            rc.constants.lambda_fractions = n.numbers("lambda_fractions");
            for (double f : rc.constants.lambda_fractions)
                if (!(f > 0.0)) throw ConfigError("/constants/lambda_fractions", "fractions must be positive");
        }
    }

    rc.samples = top.count("samples", rc.samples);
    if (rc.samples == 0) throw ConfigError("/samples", "must be positive");
    rc.seed = top.count("seed", rc.seed);
    rc.out_dir = top.string("out_dir", default_out_dir());
    if (top.has("suites")) {
        const auto& s = root.at("suites");
        if (!s.is_array()) throw ConfigError("/suites", "expected an array of suite names");
        rc.suites.clear();
        const auto names = suite_names();
        for (const auto& e : s) {
            if (!e.is_string()) throw ConfigError("/suites", "expected an array of suite names");
            const auto name = e.get<std::string>();
            if (std::find(names.begin(), names.end(), name) == names.end())
                throw ConfigError("/suites", "unknown suite '" + name + "'");
            rc.suites.push_back(name);
        }
    }

    try {
        rc.chain_config().validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("/chain", e.what());
    }
    return rc;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace gammagibbs
