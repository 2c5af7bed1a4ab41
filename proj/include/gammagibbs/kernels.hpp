#pragma once

// Pair-interaction inner loop: for a query point x and a block of atoms y_i
// with marks s_i, w_i = phi(|x - y_i|) s_i for a piecewise-constant radial
// profile. A scalar reference and vector variants (AVX2, NEON) are provided;
// the variant is chosen once at runtime.
//
// All variants evaluate r^2 as ((0 + d_0^2) + d_1^2) + ... without fused
// multiply-add, so their outputs are bit-identical to the scalar reference.

#include <cstddef>
#include <span>
#include <string_view>

namespace gammagibbs::kernels {

/// phi(r) = core_value for r^2 <= core_radius2, shell_value for
/// core_radius2 < r^2 <= shell_radius2, and 0 beyond.
struct RadialProfile {
    double core_radius2 = 0.0;
    double core_value = 0.0;
    double shell_radius2 = 0.0;
    double shell_value = 0.0;
};

/// Column-major block of candidate atoms.
struct AtomBlock {
    int dim = 0;
    const double* const* cols = nullptr;  // dim pointers, each of length n
    const double* marks = nullptr;
    std::size_t n = 0;
};

enum class Isa { Scalar, Avx2, Neon };

using PairWeightsFn = void (*)(const double* query, const AtomBlock& block, const RadialProfile& profile,
                               double* out);

void pair_weights_scalar(const double* query, const AtomBlock& block, const RadialProfile& profile, double* out);
#if defined(__x86_64__) || defined(_M_X64)
void pair_weights_avx2(const double* query, const AtomBlock& block, const RadialProfile& profile, double* out);
#endif
#if defined(__aarch64__)
void pair_weights_neon(const double* query, const AtomBlock& block, const RadialProfile& profile, double* out);
#endif

bool isa_supported(Isa isa);
PairWeightsFn pair_weights_for(Isa isa);

/// Variant selected at startup: the widest supported one unless the
/// GAMMAGIBBS_ISA environment variable names another ("scalar", "avx2", "neon").
Isa active_isa();
std::string_view isa_name(Isa isa);

/// Dispatching entry point.
void pair_weights(const double* query, const AtomBlock& block, const RadialProfile& profile, double* out);

/// sum_i w_i accumulated in index order (same order for every variant).
double ordered_sum(std::span<const double> w);

}  // namespace gammagibbs::kernels
