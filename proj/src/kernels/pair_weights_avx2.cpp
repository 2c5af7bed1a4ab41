// Compiled with -mavx2 only (no -mfma): r^2 must round exactly like the
// scalar reference.
#include <immintrin.h>

#include "gammagibbs/kernels.hpp"

namespace gammagibbs::kernels {

void pair_weights_avx2(const double* query, const AtomBlock& block, const RadialProfile& profile, double* out) {
    const std::size_t n = block.n;
    const std::size_t n4 = n & ~std::size_t{3};

    const __m256d core_r2 = _mm256_set1_pd(profile.core_radius2);
    const __m256d shell_r2 = _mm256_set1_pd(profile.shell_radius2);
    const __m256d core_v = _mm256_set1_pd(profile.core_value);
    const __m256d shell_v = _mm256_set1_pd(profile.shell_value);
    const __m256d zero = _mm256_setzero_pd();

    std::size_t i = 0;
    for (; i < n4; i += 4) {
        __m256d r2 = zero;
        for (int a = 0; a < block.dim; ++a) {
            const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(block.cols[a] + i), _mm256_set1_pd(query[a]));
            r2 = _mm256_add_pd(r2, _mm256_mul_pd(d, d));
        }
        const __m256d in_shell = _mm256_cmp_pd(r2, shell_r2, _CMP_LE_OQ);
        const __m256d in_core = _mm256_cmp_pd(r2, core_r2, _CMP_LE_OQ);
        __m256d phi = _mm256_blendv_pd(zero, shell_v, in_shell);
        phi = _mm256_blendv_pd(phi, core_v, in_core);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(phi, _mm256_loadu_pd(block.marks + i)));
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
