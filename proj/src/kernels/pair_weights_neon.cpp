#if defined(__aarch64__)
#include <arm_neon.h>

#include "gammagibbs/kernels.hpp"

namespace gammagibbs::kernels {

// Separate vmulq/vaddq (never vfmaq) keeps r^2 identical to the scalar path.
void pair_weights_neon(const double* query, const AtomBlock& block, const RadialProfile& profile, double* out) {
    const std::size_t n = block.n;
    const std::size_t n2 = n & ~std::size_t{1};
    const float64x2_t core_r2 = vdupq_n_f64(profile.core_radius2);
    const float64x2_t shell_r2 = vdupq_n_f64(profile.shell_radius2);
    const float64x2_t core_v = vdupq_n_f64(profile.core_value);
    const float64x2_t shell_v = vdupq_n_f64(profile.shell_value);
    const float64x2_t zero = vdupq_n_f64(0.0);

    std::size_t i = 0;
    for (; i < n2; i += 2) {
        float64x2_t r2 = zero;
        for (int a = 0; a < block.dim; ++a) {
            const float64x2_t d = vsubq_f64(vld1q_f64(block.cols[a] + i), vdupq_n_f64(query[a]));
            r2 = vaddq_f64(r2, vmulq_f64(d, d));
        }
        float64x2_t phi = vbslq_f64(vcleq_f64(r2, shell_r2), shell_v, zero);
        phi = vbslq_f64(vcleq_f64(r2, core_r2), core_v, phi);
        vst1q_f64(out + i, vmulq_f64(phi, vld1q_f64(block.marks + i)));
    }
    for (; i < n; ++i) {
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

}  // namespace gammagibbs::kernels
#endif
