#include <cstdlib>
#include <string>

#include "gammagibbs/kernels.hpp"

namespace gammagibbs::kernels {

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

PairWeightsFn pair_weights_for(Isa isa) {
    if (!isa_supported(isa)) return nullptr;
    switch (isa) {
        case Isa::Scalar:
            return &pair_weights_scalar;
        case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return &pair_weights_avx2;
#else
            return nullptr;
#endif
        case Isa::Neon:
#if defined(__aarch64__)
            return &pair_weights_neon;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

namespace {

Isa select_isa() {
    if (const char* env = std::getenv("GAMMAGIBBS_ISA")) {
        const std::string want(env);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
            if (want == isa_name(isa) && isa_supported(isa)) return isa;
    }
    if (isa_supported(Isa::Avx2)) return Isa::Avx2;
    if (isa_supported(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

}  // namespace

Isa active_isa() {
    static const Isa isa = select_isa();
    return isa;
}

void pair_weights(const double* query, const AtomBlock& block, const RadialProfile& profile, double* out) {
    static const PairWeightsFn fn = pair_weights_for(active_isa());
    fn(query, block, profile, out);
}

}  // namespace gammagibbs::kernels
