#include "gammagibbs/kernels.hpp"

namespace gammagibbs::kernels {

void pair_weights_scalar(const double* query, const AtomBlock& block, const RadialProfile& profile, double* out) {
    for (std::size_t i = 0; i < block.n; ++i) {
        double r2 = 0.0;
        for (int a = 0; a < block.dim; ++a) {
            const double d = block.cols[a][i] - query[a];
            r2 = r2 + d * d;
        }
        double phi = 0.0;
        if (r2 <= profile.shell_radius2) phi = profile.shell_value;
        if (r2 <= profile.core_radius2) phi = profile.core_value;
        out[i] = phi * block.marks[i];
    }
}

double ordered_sum(std::span<const double> w) {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
}

}  // namespace gammagibbs::kernels
