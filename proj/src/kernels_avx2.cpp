#include <immintrin.h>

#include "fklab/kernels.hpp"

namespace fklab::kernels::avx2 {

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // mul then add (no fma) so each lane rounds like the scalar reference
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i])));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(&y[i]);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(&x[i])));
    _mm256_storeu_pd(&y[i], vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpay(std::span<const double> x, double a, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(&y[i]);
    vy = _mm256_add_pd(_mm256_loadu_pd(&x[i]), _mm256_mul_pd(va, vy));
    _mm256_storeu_pd(&y[i], vy);
  }
  for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const std::size_t rows = a.row_start.size() - 1;
  for (std::size_t r = 0; r < rows; ++r) {
    std::int32_t k = a.row_start[r];
    const std::int32_t end = a.row_start[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(&a.col[k]));
      const __m256d xv = _mm256_i32gather_pd(x.data(), idx, 8);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(&a.val[k]), xv));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
    for (; k < end; ++k) s += a.val[k] * x[a.col[k]];
    y[r] = s;
  }
}

void bond_mask(std::span<const std::int32_t> spin, std::span<const std::int32_t> eu,
               std::span<const std::int32_t> ev, std::span<const double> unif, double p,
               std::span<std::uint8_t> open) {
  const std::size_t n = eu.size();
  const __m256d vp = _mm256_set1_pd(p);
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m256i iu = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&eu[k]));
    const __m256i iv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&ev[k]));
    const __m256i su = _mm256_i32gather_epi32(spin.data(), iu, 4);
    const __m256i sv = _mm256_i32gather_epi32(spin.data(), iv, 4);
    const int same = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(su, sv)));
    const int lo = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(&unif[k]), vp, _CMP_LT_OQ));
    const int hi = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(&unif[k + 4]), vp, _CMP_LT_OQ));
    const int bits = same & (lo | (hi << 4));
    for (int j = 0; j < 8; ++j) open[k + j] = static_cast<std::uint8_t>((bits >> j) & 1);
  }
  for (; k < n; ++k) open[k] = static_cast<std::uint8_t>(spin[eu[k]] == spin[ev[k]] && unif[k] < p);
}

}  // namespace fklab::kernels::avx2
