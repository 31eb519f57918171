#include <algorithm>
#include <cmath>

#include "litgraph/kernels.hpp"

namespace litgraph::kernels {

namespace {

void spmv(const CsrView& m, std::span<const double> x, std::span<double> y) {
  const std::size_t rows = m.row_ptr.size() - 1;
  for (std::size_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::uint32_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) acc += m.weight[k] * x[m.col[k]];
    y[i] = acc;
  }
}

double sum_squares(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

void scale(std::span<double> x, double factor) {
  for (double& v : x) v *= factor;
}

void divide(std::span<const double> x, double divisor, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / divisor;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

double max_value(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return *std::max_element(x.begin(), x.end());
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Isa::scalar, spmv, sum_squares, scale, divide, max_abs_diff, max_value};
  return table;
}

}  // namespace litgraph::kernels
