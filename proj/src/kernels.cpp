#include "fklab/kernels.hpp"

#include <atomic>

namespace fklab::kernels {

namespace scalar {

double dot(std::span<const double> x, std::span<const double> y) {
  // Four partial sums, matching the lane layout of the vector variant.
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += x[i] * y[i];
    acc[1] += x[i + 1] * y[i + 1];
    acc[2] += x[i + 2] * y[i + 2];
    acc[3] += x[i + 3] * y[i + 3];
  }
  double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void xpay(std::span<const double> x, double a, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + a * y[i];
}

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const std::size_t rows = a.row_start.size() - 1;
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::int32_t k = a.row_start[r]; k < a.row_start[r + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[r] = s;
  }
}

void bond_mask(std::span<const std::int32_t> spin, std::span<const std::int32_t> eu,
               std::span<const std::int32_t> ev, std::span<const double> unif, double p,
               std::span<std::uint8_t> open) {
  for (std::size_t k = 0; k < eu.size(); ++k)
    open[k] = static_cast<std::uint8_t>(spin[eu[k]] == spin[ev[k]] && unif[k] < p);
}

}  // namespace scalar

#ifndef FKLAB_HAVE_AVX2_TU
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y) { return scalar::dot(x, y); }
void axpy(double a, std::span<const double> x, std::span<double> y) { scalar::axpy(a, x, y); }
void xpay(std::span<const double> x, double a, std::span<double> y) { scalar::xpay(x, a, y); }
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) { scalar::spmv(a, x, y); }
void bond_mask(std::span<const std::int32_t> spin, std::span<const std::int32_t> eu,
               std::span<const std::int32_t> ev, std::span<const double> unif, double p,
               std::span<std::uint8_t> open) {
  scalar::bond_mask(spin, eu, ev, unif, p, open);
}
}  // namespace avx2
#endif

namespace {

Isa detect() {
#if defined(FKLAB_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool avx2_supported() { return detect() == Isa::avx2; }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_supported()) return;
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double dot(std::span<const double> x, std::span<const double> y) {
  return active_isa() == Isa::avx2 ? avx2::dot(x, y) : scalar::dot(x, y);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  active_isa() == Isa::avx2 ? avx2::axpy(a, x, y) : scalar::axpy(a, x, y);
}

void xpay(std::span<const double> x, double a, std::span<double> y) {
  active_isa() == Isa::avx2 ? avx2::xpay(x, a, y) : scalar::xpay(x, a, y);
}

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  active_isa() == Isa::avx2 ? avx2::spmv(a, x, y) : scalar::spmv(a, x, y);
}

void bond_mask(std::span<const std::int32_t> spin, std::span<const std::int32_t> eu,
               std::span<const std::int32_t> ev, std::span<const double> unif, double p,
               std::span<std::uint8_t> open) {
  if (active_isa() == Isa::avx2)
    avx2::bond_mask(spin, eu, ev, unif, p, open);
  else
    scalar::bond_mask(spin, eu, ev, unif, p, open);
}

}  // namespace fklab::kernels
