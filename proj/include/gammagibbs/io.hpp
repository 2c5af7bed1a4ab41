#pragma once

// Persistence: CSV atom dumps with a JSON metadata sidecar, versioned JSON
// check reports, chain diagnostics and sweep tables.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gammagibbs/gibbs.hpp"
#include "gammagibbs/interaction.hpp"
#include "gammagibbs/measure.hpp"
#include "gammagibbs/verification.hpp"

namespace gammagibbs {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Header `sample_id,atom_id,x_1,...,x_d,mark`; values printed with %.17g so
/// they re-parse to the same doubles.
void write_samples_csv(std::ostream& out, const std::vector<DiscreteMeasure>& samples, int dimension);

/// Inverse of write_samples_csv. Samples without atoms leave no rows; pass
/// `n_samples` (recorded in the metadata) to restore them.
std::vector<DiscreteMeasure> read_samples_csv(std::istream& in, std::optional<std::size_t> n_samples = {});

struct SampleMetadata {
    std::string kind = "gamma";
    double theta = 1.0;
    double trunc = 0.0;
    int dimension = 1;
    std::string window;
    std::vector<double> window_lo, window_hi;
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    std::string generator;  // "direct" or "gibbs"
    std::string timestamp;  // the only non-deterministic field
};

std::string metadata_json(const SampleMetadata& m);
SampleMetadata parse_metadata_json(const std::string& text);

inline constexpr int kReportSchemaVersion = 1;

/// {"schema": "gammagibbs.report", "version": 1, "suite", "seed", "all_pass", "checks": [...]}
std::string report_json(const SuiteReport& report, std::uint64_t seed);
SuiteReport parse_report_json(const std::string& text);

/// Fixed-width table, one line per check.
std::string report_table(const SuiteReport& report);

std::string diagnostics_json(const ChainDiagnostics& d);

struct ConstantsTable {
    BoundConstants constants;
    double theta = 1.0;
    std::vector<double> lambdas;
    std::vector<std::optional<double>> log_C;  // empty when lambda is outside the admissible interval
    double interval_lo = 0.0, interval_hi = 0.0;
};

ConstantsTable constants_table(const PotentialSpec& spec, double theta, std::optional<double> eps_h,
                               const std::vector<double>& lambda_fractions, std::optional<double> delta_fraction,
                               const Window& window);
std::string constants_text(const ConstantsTable& t);
std::string constants_json(const ConstantsTable& t);

/// Columns: statistic,window,volume,mean,se,n_effective,z_vs_previous.
void write_sweep_csv(std::ostream& out, const SweepReport& report);

}  // namespace gammagibbs
