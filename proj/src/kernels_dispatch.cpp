#include <cstdlib>
#include <cstring>

#include "parlab/kernels.hpp"

namespace parlab::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Kernels& select() {
    const char* env = std::getenv("PARLAB_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return scalar_kernels();
    const Kernels* avx2 = avx2_kernels();
    if (env && std::strcmp(env, "avx2") == 0) {
        if (avx2 && cpu_has_avx2()) return *avx2;
        return scalar_kernels(); // requested lane unavailable
    }
    if (avx2 && cpu_has_avx2()) return *avx2;
    return scalar_kernels();
}

} // namespace

const Kernels& active() {
    static const Kernels& k = select();
    return k;
}

} // namespace parlab::kernels
