#include <cstdlib>
#include <string_view>

#include "vortex/kernels.hpp"

namespace vortex::kernels {

#ifdef VORTEX_WITH_AVX2
const KernelTable& avx2_table();
#endif

const KernelTable* avx2_kernels() {
#ifdef VORTEX_WITH_AVX2
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    return supported ? &avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& chosen = []() -> const KernelTable& {
        const char* env = std::getenv("VORTEX_KERNELS");
        if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
        if (const KernelTable* t = avx2_kernels()) return *t;
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace vortex::kernels
