#include <cstdlib>
#include <string>

#include "fingerlab/error.hpp"
#include "kernels_impl.hpp"

namespace fingerlab::simd {

namespace {

const KernelTable kScalar{Isa::scalar, &detail::rigid_transform_scalar, &detail::collect_candidates_scalar};

#if defined(FINGERLAB_HAVE_AVX2)
const KernelTable kAvx2{Isa::avx2, &detail::rigid_transform_avx2, &detail::collect_candidates_avx2};
#endif

const KernelTable& select_best() {
    if (const char* forced = std::getenv("FINGERLAB_SIMD")) {
        const std::string choice(forced);
        if (choice == "scalar") return kScalar;
        if (choice == "avx2" && cpu_supports(Isa::avx2)) return *avx2_kernels();
    }
    if (cpu_supports(Isa::avx2)) return *avx2_kernels();
    return kScalar;
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "scalar";
}

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable* avx2_kernels() {
#if defined(FINGERLAB_HAVE_AVX2)
    return &kAvx2;
#else
    return nullptr;
#endif
}

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(FINGERLAB_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& kernels_for(Isa isa) {
    if (!cpu_supports(isa)) throw InvalidArgument(std::string(to_string(isa)) + " kernels unavailable on this CPU");
    return isa == Isa::avx2 ? *avx2_kernels() : kScalar;
}

const KernelTable& best_kernels() {
    static const KernelTable& best = select_best();
    return best;
}

}  // namespace fingerlab::simd
