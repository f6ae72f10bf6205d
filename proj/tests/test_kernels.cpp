#include <random>
#include <vector>

#include "doctest.h"

#include "fklab/kernels.hpp"

using namespace fklab;
namespace k = fklab::kernels;

namespace {

std::vector<double> randoms(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

const std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 17, 64, 1001};

}  // namespace

TEST_CASE("dispatch reports a usable instruction set") {
  k::force_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  k::force_isa(k::Isa::avx2);
  CHECK(k::active_isa() == (k::avx2_supported() ? k::Isa::avx2 : k::Isa::scalar));
  CHECK(k::isa_name(k::Isa::scalar) == "scalar");
}

TEST_CASE("dot, axpy and xpay agree between scalar and avx2") {
  if (!k::avx2_supported()) return;
  std::mt19937_64 rng(11);
  for (std::size_t n : kLengths) {
    CAPTURE(n);
    const auto x = randoms(n, rng), y = randoms(n, rng);
    const double ds = k::scalar::dot(x, y), dv = k::avx2::dot(x, y);
    CHECK(std::abs(ds - dv) <= 1e-13 * (1.0 + std::abs(ds)));

    auto ys = y, yv = y;
    k::scalar::axpy(0.37, x, ys);
    k::avx2::axpy(0.37, x, yv);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ys[i] - yv[i]) <= 1e-15);

    ys = y, yv = y;
    k::scalar::xpay(x, -1.3, ys);
    k::avx2::xpay(x, -1.3, yv);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ys[i] - yv[i]) <= 1e-15);
  }
}

TEST_CASE("spmv agrees between scalar and avx2") {
  if (!k::avx2_supported()) return;
  std::mt19937_64 rng(12);
  for (int rows : {1, 5, 33, 200}) {
    // Random sparse rows with 0 to 9 entries, so row lengths straddle the vector width.
    std::vector<std::int32_t> start{0}, col;
    std::vector<double> val;
    for (int r = 0; r < rows; ++r) {
      const int len = static_cast<int>(rng() % 10);
      for (int j = 0; j < len; ++j) {
        col.push_back(static_cast<std::int32_t>(rng() % rows));
        val.push_back(randoms(1, rng)[0]);
      }
      start.push_back(static_cast<std::int32_t>(col.size()));
    }
    const auto x = randoms(rows, rng);
    std::vector<double> ys(rows), yv(rows);
    const k::CsrView a{start, col, val};
    k::scalar::spmv(a, x, ys);
    k::avx2::spmv(a, x, yv);
    for (int i = 0; i < rows; ++i) CHECK(std::abs(ys[i] - yv[i]) <= 1e-14);
  }
}

TEST_CASE("bond_mask is bit-identical between scalar and avx2") {
  if (!k::avx2_supported()) return;
  std::mt19937_64 rng(13);
  for (std::size_t n : kLengths) {
    std::vector<std::int32_t> spin(50), eu(n), ev(n);
    for (auto& s : spin) s = static_cast<std::int32_t>(rng() & 1);
    for (std::size_t i = 0; i < n; ++i) {
      eu[i] = static_cast<std::int32_t>(rng() % 50);
      ev[i] = static_cast<std::int32_t>(rng() % 50);
    }
    auto unif = randoms(n, rng);
    for (double& u : unif) u = std::abs(u);
    std::vector<std::uint8_t> os(n), ov(n);
    k::scalar::bond_mask(spin, eu, ev, unif, 0.5857864376269049, os);
    k::avx2::bond_mask(spin, eu, ev, unif, 0.5857864376269049, ov);
    CHECK(os == ov);
    // Reference definition.
    for (std::size_t i = 0; i < n; ++i) CHECK(os[i] == ((spin[eu[i]] == spin[ev[i]]) && unif[i] < 0.5857864376269049));
  }
}

TEST_CASE("bond_mask boundary cases: p = 0 closes everything, p = 1 opens equal spins") {
  const std::vector<std::int32_t> spin{0, 1, 0}, eu{0, 0, 1}, ev{2, 1, 2};
  const std::vector<double> unif{0.0, 0.5, 0.999};
  std::vector<std::uint8_t> open(3);
  k::bond_mask(spin, eu, ev, unif, 0.0, open);
  CHECK(open == std::vector<std::uint8_t>{0, 0, 0});
  k::bond_mask(spin, eu, ev, unif, 1.0, open);
  CHECK(open == std::vector<std::uint8_t>{1, 0, 0});
}
