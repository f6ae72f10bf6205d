#pragma once

// Data-parallel inner loops shared by the harmonic solver and the cluster
// sampler. Every kernel has a scalar reference implementation; an AVX2
// variant is selected at runtime when the CPU supports it.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace fklab::kernels {

enum class Isa { scalar, avx2 };

/// Instruction set used by the dispatching entry points below.
Isa active_isa();
/// Overrides runtime detection; requesting avx2 on a CPU without it is ignored.
void force_isa(Isa isa);
bool avx2_supported();
std::string_view isa_name(Isa isa);

/// Compressed sparse row matrix view (square, row-major).
struct CsrView {
  std::span<const std::int32_t> row_start;  // size rows + 1
  std::span<const std::int32_t> col;
  std::span<const double> val;
};

double dot(std::span<const double> x, std::span<const double> y);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
/// y = x + a * y
void xpay(std::span<const double> x, double a, std::span<double> y);
/// y = A x
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
/// open[k] = (spin[eu[k]] == spin[ev[k]]) && (unif[k] < p)
void bond_mask(std::span<const std::int32_t> spin, std::span<const std::int32_t> eu,
               std::span<const std::int32_t> ev, std::span<const double> unif, double p,
               std::span<std::uint8_t> open);

namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void xpay(std::span<const double> x, double a, std::span<double> y);
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
void bond_mask(std::span<const std::int32_t> spin, std::span<const std::int32_t> eu,
               std::span<const std::int32_t> ev, std::span<const double> unif, double p,
               std::span<std::uint8_t> open);
}  // namespace scalar

namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void xpay(std::span<const double> x, double a, std::span<double> y);
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
void bond_mask(std::span<const std::int32_t> spin, std::span<const std::int32_t> eu,
               std::span<const std::int32_t> ev, std::span<const double> unif, double p,
               std::span<std::uint8_t> open);
}  // namespace avx2

}  // namespace fklab::kernels
