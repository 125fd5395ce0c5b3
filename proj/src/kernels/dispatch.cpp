#include "sglc/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace sglc::kernels {

namespace {

const KernelTable& select() {
    const KernelTable* avx2 = avx2_table();
    const char* forced = std::getenv("SGLC_KERNELS");
    if (forced != nullptr) {
        if (std::strcmp(forced, "scalar") == 0) return scalar_table();
        if (std::strcmp(forced, "avx2") == 0 && avx2 != nullptr) return *avx2;
    }
    return avx2 != nullptr ? *avx2 : scalar_table();
}

} // namespace

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

} // namespace sglc::kernels
