#include <cstdlib>
#include <cstring>

#include "litgraph/kernels.hpp"

namespace litgraph::kernels {

#if defined(LITGRAPH_HAVE_AVX2_KERNELS)
namespace avx2 {
const KernelTable& table() noexcept;
}
#endif

const KernelTable* avx2_table() noexcept {
#if defined(LITGRAPH_HAVE_AVX2_KERNELS)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  static const KernelTable* chosen = [] {
    const char* forced = std::getenv("LITGRAPH_ISA");
    if (forced && std::strcmp(forced, "scalar") == 0) return &scalar_table();
    if (const KernelTable* t = avx2_table()) return t;
    return &scalar_table();
  }();
  return *chosen;
}

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace litgraph::kernels
