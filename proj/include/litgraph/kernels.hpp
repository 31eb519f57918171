#pragma once

#include <cstdint>
#include <span>
#include <string_view>

// Dense and sparse vector kernels behind the graph metrics. Each kernel
// has a scalar reference implementation and, on x86-64, an AVX2 variant
// chosen at runtime when the CPU supports AVX2 and FMA. Set
// LITGRAPH_ISA=scalar in the environment to force the reference path.
namespace litgraph::kernels {

enum class Isa { scalar, avx2 };

/// Row-compressed sparse matrix view. Row i covers the half-open entry
/// range [row_ptr[i], row_ptr[i+1]).
struct CsrView {
  std::span<const std::uint32_t> row_ptr;
  std::span<const std::uint32_t> col;
  std::span<const double> weight;
};

struct KernelTable {
  Isa isa;
  /// y = M x
  void (*spmv)(const CsrView& m, std::span<const double> x, std::span<double> y);
  double (*sum_squares)(std::span<const double> x);
  /// x *= factor
  void (*scale)(std::span<double> x, double factor);
  /// out[i] = x[i] / divisor, correctly rounded per element
  void (*divide)(std::span<const double> x, double divisor, std::span<double> out);
  double (*max_abs_diff)(std::span<const double> a, std::span<const double> b);
  /// Maximum element; 0 for an empty span.
  double (*max_value)(std::span<const double> x);
};

const KernelTable& scalar_table() noexcept;
/// Null when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table() noexcept;

/// Table used by the library: AVX2 when available unless overridden.
const KernelTable& active() noexcept;
std::string_view isa_name(Isa isa) noexcept;

}  // namespace litgraph::kernels
