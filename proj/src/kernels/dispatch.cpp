#include <cstdlib>
#include <string>

#include "schro/kernels.hpp"

namespace schro::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar,
                              detail::dot_scalar,
                              detail::weighted_dot_scalar,
                              detail::weighted_sum_scalar,
                              detail::axpy_scalar,
                              detail::csr_matvec_scalar};

constexpr KernelTable kAvx2{Isa::Avx2,
                            detail::dot_avx2,
                            detail::weighted_dot_avx2,
                            detail::weighted_sum_avx2,
                            detail::axpy_avx2,
                            detail::csr_matvec_avx2};

const KernelTable& select() {
    if (const char* env = std::getenv("SCHRO_ISA"); env != nullptr && std::string(env) == "scalar") {
        return kScalar;
    }
    return avx2_table();
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& scalar_table() { return kScalar; }

const KernelTable& avx2_table() { return cpu_has_avx2() ? kAvx2 : kScalar; }

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return "scalar";
        case Isa::Avx2:
            return "avx2";
    }
    return "unknown";
}

}  // namespace schro::kernels
