#include "gammagibbs/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace gammagibbs {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, std::size_t line) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw FormatError("line " + std::to_string(line) + ": cannot parse number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Non-finite values become null so the output stays valid JSON.
ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }
double from_num(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

ordered_json estimate_json(const Estimate& e) {
    return {{"mean", num(e.mean)}, {"se", num(e.se())}, {"n_effective", num(e.n_effective)}, {"n", e.raw_n}};
}

Estimate estimate_from(const json& j) {
    Estimate e;
    e.mean = from_num(j.at("mean"));
    e.stderr_ = from_num(j.at("se"));
    e.n_effective = from_num(j.at("n_effective"));
    e.raw_n = j.at("n").get<std::uint64_t>();
    return e;
}

}  // namespace

void write_samples_csv(std::ostream& out, const std::vector<DiscreteMeasure>& samples, int dimension) {
    out << "sample_id,atom_id";
    for (int i = 1; i <= dimension; ++i) out << ",x_" << i;
    out << ",mark\n";
    std::vector<double> x(static_cast<std::size_t>(dimension));
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& eta = samples[s];
        if (eta.dimension() != dimension) throw FormatError("sample dimension differs from the dump dimension");
        for (std::size_t a = 0; a < eta.size(); ++a) {
            eta.position(a, x);
            out << s << ',' << a;
            for (double v : x) out << ',' << g17(v);
            out << ',' << g17(eta.mark(a)) << '\n';
        }
    }
}

std::vector<DiscreteMeasure> read_samples_csv(std::istream& in, std::optional<std::size_t> n_samples) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty sample dump");
    const auto header = split(line);
    if (header.size() < 4 || header[0] != "sample_id" || header[1] != "atom_id" || header.back() != "mark")
        throw FormatError("unexpected header '" + line + "'");
    const int dim = static_cast<int>(header.size()) - 3;
    for (int i = 0; i < dim; ++i)
        if (header[static_cast<std::size_t>(2 + i)] != "x_" + std::to_string(i + 1))
            throw FormatError("unexpected header '" + line + "'");

    std::vector<DiscreteMeasure> out;
    std::vector<double> x(static_cast<std::size_t>(dim));
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != header.size())
            throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                              " fields");
        const auto sid = static_cast<std::size_t>(parse_double(f[0], lineno));
        const auto aid = static_cast<std::size_t>(parse_double(f[1], lineno));
        if (sid + 1 < out.size()) throw FormatError("line " + std::to_string(lineno) + ": sample ids not ascending");
        while (out.size() <= sid) out.emplace_back(dim);
        if (aid != out[sid].size())
            throw FormatError("line " + std::to_string(lineno) + ": atom ids must be consecutive");
        for (int i = 0; i < dim; ++i) x[static_cast<std::size_t>(i)] = parse_double(f[static_cast<std::size_t>(2 + i)], lineno);
        out[sid].add(x, parse_double(f.back(), lineno));
    }
    if (n_samples) {
        if (out.size() > *n_samples) throw FormatError("dump holds more samples than the metadata records");
        while (out.size() < *n_samples) out.emplace_back(dim);
    }
    return out;
}

std::string metadata_json(const SampleMetadata& m) {
    ordered_json j;
    j["kind"] = m.kind;
    j["theta"] = m.theta;
    j["trunc"] = m.trunc;
    j["dimension"] = m.dimension;
    j["window"] = {{"description", m.window}, {"lo", m.window_lo}, {"hi", m.window_hi}};
    j["seed"] = m.seed;
    j["n_samples"] = m.n_samples;
    j["generator"] = m.generator;
    j["timestamp"] = m.timestamp;
    return j.dump(2) + "\n";
}

SampleMetadata parse_metadata_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        SampleMetadata m;
        m.kind = j.at("kind").get<std::string>();
        m.theta = j.at("theta").get<double>();
        m.trunc = j.at("trunc").get<double>();
        m.dimension = j.at("dimension").get<int>();
        m.window = j.at("window").at("description").get<std::string>();
        m.window_lo = j.at("window").at("lo").get<std::vector<double>>();
        m.window_hi = j.at("window").at("hi").get<std::vector<double>>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.n_samples = j.at("n_samples").get<std::size_t>();
        m.generator = j.at("generator").get<std::string>();
        m.timestamp = j.value("timestamp", "");
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("metadata: ") + e.what());
    }
}

std::string report_json(const SuiteReport& report, std::uint64_t seed) {
    ordered_json j;
    j["schema"] = "gammagibbs.report";
    j["version"] = kReportSchemaVersion;
    j["suite"] = report.suite;
    j["seed"] = seed;
    j["all_pass"] = report.all_pass();
    j["checks"] = ordered_json::array();
    for (const auto& c : report.checks) {
        j["checks"].push_back({{"name", c.name},
                               {"lhs", estimate_json(c.lhs)},
                               {"rhs", estimate_json(c.rhs)},
                               {"diff", num(c.diff)},
                               {"diff_se", num(c.diff_se)},
                               {"z", num(c.z)},
                               {"threshold", num(c.threshold)},
                               {"bias_budget", num(c.bias_budget)},
                               {"negative_control", c.negative_control},
                               {"pass", c.pass},
                               {"note", c.note}});
    }
    return j.dump(2) + "\n";
}

SuiteReport parse_report_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        if (j.at("schema").get<std::string>() != "gammagibbs.report") throw FormatError("not a gammagibbs report");
        if (j.at("version").get<int>() != kReportSchemaVersion)
            throw FormatError("unsupported report version " + std::to_string(j.at("version").get<int>()));
        SuiteReport r;
        r.suite = j.at("suite").get<std::string>();
        for (const auto& c : j.at("checks")) {
            CheckReport k;
            k.name = c.at("name").get<std::string>();
            k.lhs = estimate_from(c.at("lhs"));
            k.rhs = estimate_from(c.at("rhs"));
            k.diff = from_num(c.at("diff"));
            k.diff_se = from_num(c.at("diff_se"));
            k.z = from_num(c.at("z"));
            k.threshold = from_num(c.at("threshold"));
            k.bias_budget = from_num(c.at("bias_budget"));
            k.negative_control = c.at("negative_control").get<bool>();
            k.pass = c.at("pass").get<bool>();
            k.note = c.at("note").get<std::string>();
            r.checks.push_back(std::move(k));
        }
        return r;
    } catch (const json::exception& e) {
        throw FormatError(std::string("report: ") + e.what());
    }
}

std::string report_table(const SuiteReport& report) {
    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-48s %14s %14s %10s %6s  %s\n", "check", "lhs", "rhs", "z", "result", "note");
    out += buf;
    for (const auto& c : report.checks) {
        std::snprintf(buf, sizeof buf, "%-48s %14.6g %14.6g %10.3g %6s  %s\n", c.name.c_str(), c.lhs.mean, c.rhs.mean,
                      c.z, c.pass ? "PASS" : "FAIL", c.note.c_str());
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "%s: %s\n", report.suite.c_str(), report.all_pass() ? "all checks passed" : "FAILED");
    out += buf;
    return out;
}

std::string diagnostics_json(const ChainDiagnostics& d) {
    auto counters = [](const MoveCounters& m) {
        return ordered_json{{"proposed", m.proposed}, {"accepted", m.accepted}, {"rate", num(m.rate())}};
    };
    ordered_json j;
    j["acceptance"] = {{"birth", counters(d.birth)}, {"death", counters(d.death)}, {"resize", counters(d.resize)}};
    j["ess_mass"] = num(d.ess_mass);
    j["retained"] = d.retained;
    j["energy_audit"] = {
        {"audits", d.audit.audits}, {"max_relative_error", num(d.audit.max_relative_error)}, {"passed", d.audit.passed}};
    j["flux"] = {{"bin_edges", d.flux.bin_edges},
                 {"counts", d.flux.counts},
                 {"max_abs_z", num(d.flux.max_abs_z)},
                 {"symmetric", d.flux.symmetric}};
    j["support_fraction"] = num(d.support_fraction);
    j["stability"] = {{"checks", d.stability_checks}, {"violations", d.stability_violations}};
    return j.dump(2) + "\n";
}

ConstantsTable constants_table(const PotentialSpec& spec, double theta, std::optional<double> eps_h,
                               const std::vector<double>& lambda_fractions, std::optional<double> delta_fraction,
                               const Window& window) {
    ConstantsTable t;
    t.theta = theta;
    t.constants = bound_constants(spec, theta, eps_h.value_or(default_eps_h(spec, theta)), window);
    t.interval_lo = t.constants.lambda_min;
    t.interval_hi = t.constants.lambda0;
    for (double f : lambda_fractions) {
        const double lam = f * t.constants.lambda0;
        t.lambdas.push_back(lam);
        try {
            t.log_C.emplace_back(t.constants.log_C_lambda(lam, delta_fraction));
        } catch (const BoundsError&) {
            t.log_C.emplace_back(std::nullopt);
        }
    }
    return t;
}

std::string constants_text(const ConstantsTable& t) {
    const auto& c = t.constants;
    std::string out;
    char buf[256];
    auto row = [&](const char* name, double v) {
        std::snprintf(buf, sizeof buf, "%-22s %.10g\n", name, v);
        out += buf;
    };
    row("m_phi", c.m_phi);
    row("lambda0", c.lambda0);
    row("lambda0_zero_bc", c.lambda0_zero_bc);
    row("C_Delta", c.C_Delta);
    row("C_phi", c.C_phi);
    row("eps_h", c.eps_h);
    row("Upsilon_eps", c.Upsilon_eps);
    row("B_eps", c.B_eps);
    row("vartheta", c.vartheta);
    std::snprintf(buf, sizeof buf, "%-22s (%.10g, %.10g]\n", "lambda_interval", t.interval_lo, t.interval_hi);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-22s %s\n", "eps_h_admissible", c.eps_admissible ? "yes" : "no");
    out += buf;
    for (std::size_t i = 0; i < t.lambdas.size(); ++i) {
        char label[48];
        std::snprintf(label, sizeof label, "log_C_lambda(%.4g)", t.lambdas[i]);
        if (t.log_C[i])
            std::snprintf(buf, sizeof buf, "%-22s %.10g\n", label, *t.log_C[i]);
        else
            std::snprintf(buf, sizeof buf, "%-22s n/a (outside admissible range)\n", label);
        out += buf;
    }
    return out;
}

std::string constants_json(const ConstantsTable& t) {
    const auto& c = t.constants;
    ordered_json j;
    j["m_phi"] = num(c.m_phi);
    j["lambda0"] = num(c.lambda0);
    j["lambda0_zero_bc"] = num(c.lambda0_zero_bc);
    j["C_Delta"] = num(c.C_Delta);
    j["C_phi"] = num(c.C_phi);
    j["eps_h"] = num(c.eps_h);
    j["Upsilon_eps"] = num(c.Upsilon_eps);
    j["B_eps"] = num(c.B_eps);
    j["vartheta"] = num(c.vartheta);
    j["lambda_interval"] = {num(t.interval_lo), num(t.interval_hi)};
    j["eps_h_admissible"] = c.eps_admissible;
    j["log_C_lambda"] = ordered_json::array();
    for (std::size_t i = 0; i < t.lambdas.size(); ++i)
        j["log_C_lambda"].push_back(
            {{"lambda", num(t.lambdas[i])}, {"log_C", t.log_C[i] ? num(*t.log_C[i]) : ordered_json(nullptr)}});
    return j.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
    out << "statistic,window,volume,mean,se,n_effective,z_vs_previous\n";
    for (const auto& line : report.lines) {
        for (std::size_t i = 0; i < line.per_window.size(); ++i) {
            const auto& e = line.per_window[i];
            out << line.statistic << ",\"" << report.windows[i] << "\"," << g17(report.window_volumes[i]) << ','
                << g17(e.mean) << ',' << g17(e.se()) << ',' << g17(e.n_effective) << ',';
            if (i > 0) out << g17(line.successive_z[i - 1]);
            out << '\n';
        }
    }
}

}  // namespace gammagibbs
