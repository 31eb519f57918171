// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "litgraph/kernels.hpp"

namespace litgraph::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

void spmv(const CsrView& m, std::span<const double> x, std::span<double> y) {
  const std::size_t rows = m.row_ptr.size() - 1;
  const double* xp = x.data();
  for (std::size_t i = 0; i < rows; ++i) {
    std::uint32_t k = m.row_ptr[i];
    const std::uint32_t end = m.row_ptr[i + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(m.col.data() + k));
      const __m256d gathered = _mm256_i32gather_pd(xp, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(m.weight.data() + k), gathered, acc);
    }
    double tail = hsum(acc);
    for (; k < end; ++k) tail += m.weight[k] * xp[m.col[k]];
    y[i] = tail;
  }
}

double sum_squares(std::span<const double> x) {
  const std::size_t n = x.size();
  std::size_t i = 0;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  for (; i + 8 <= n; i += 8) {
    const __m256d a = _mm256_loadu_pd(x.data() + i);
    const __m256d b = _mm256_loadu_pd(x.data() + i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(x.data() + i);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void scale(std::span<double> x, double factor) {
  const std::size_t n = x.size();
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x.data() + i, _mm256_mul_pd(_mm256_loadu_pd(x.data() + i), f));
  for (; i < n; ++i) x[i] *= factor;
}

void divide(std::span<const double> x, double divisor, std::span<double> out) {
  const std::size_t n = x.size();
  const __m256d d = _mm256_set1_pd(divisor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out.data() + i, _mm256_div_pd(_mm256_loadu_pd(x.data() + i), d));
  }
  for (; i < n; ++i) out[i] = x[i] / divisor;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, diff));
  }
  double r = hmax(m);
  for (; i < n; ++i) r = std::max(r, std::fabs(a[i] - b[i]));
  return r;
}

double max_value(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  if (n < 4) return *std::max_element(x.begin(), x.end());
  __m256d m = _mm256_loadu_pd(x.data());
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(x.data() + i));
  double r = hmax(m);
  for (; i < n; ++i) r = std::max(r, x[i]);
  return r;
}

}  // namespace

const KernelTable& table() noexcept {
  static const KernelTable t{Isa::avx2, spmv, sum_squares, scale, divide, max_abs_diff, max_value};
  return t;
}

}  // namespace litgraph::kernels::avx2
