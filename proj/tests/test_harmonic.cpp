#include <random>

#include "helpers.hpp"

#include "fklab/error.hpp"
#include "fklab/harmonic.hpp"
#include "fklab/kernels.hpp"
#include "fklab/observable.hpp"

using namespace fklab;
using namespace fklab::test;

TEST_CASE("boundary Laplacian coefficients") {
  const auto [wo, wl] = boundary_laplacian_coefficients();
  const double den = 6 + 5 * kSqrt2;
  CHECK(wo == doctest::Approx((2 + kSqrt2) / den).epsilon(1e-15));
  CHECK(wl == doctest::Approx(2 * kSqrt2 / den).epsilon(1e-15));
  CHECK(3 * wo + wl == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(wo > 0);
  CHECK(wl > 0);
  // 2√2/(2+√2) = 2(√2-1): the layer/ordinary ratio is the inverse of (√2+1)/2.
  CHECK(wl / wo == doctest::Approx(2 * (kSqrt2 - 1)).epsilon(1e-15));
  CHECK(wl / wo == doctest::Approx(kLayerRateFromWeights).epsilon(1e-15));
  CHECK(kLayerRate == doctest::Approx((kSqrt2 + 1) / 2).epsilon(1e-15));
  CHECK(kLayerRate * kLayerRateFromWeights == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rate graphs: unit rates inside, chosen rate onto the layer, disjoint absorbing sets") {
  const ExtendedMedial x = extend_medial(build_medial(rect_domain(1, 1, {0, 0}, {1, 0})));
  for (double rate : {kLayerRate, kLayerRateFromWeights})
    for (WalkColor c : {WalkColor::black, WalkColor::white}) {
      const RateGraph rg = build_rate_graph(x, c, rate);
      int targets = 0, others = 0;
      for (int f = 0; f < rg.face_count; ++f) {
        CHECK_FALSE((rg.target[f] && rg.other[f]));
        targets += rg.target[f];
        others += rg.other[f];
      }
      CHECK(targets > 0);
      CHECK(others > 0);
      for (std::size_t u = 0; u < rg.arcs.size(); ++u)
        for (const auto& a : rg.arcs[u]) CHECK((a.rate == 1.0 || a.rate == rate));
    }
  // The unit square has no free sites; use a domain with a free arc.
  const ExtendedMedial y = extend_medial(build_medial(rect_domain(3, 2, {0, 0}, {3, 0})));
  const RateGraph rg = build_rate_graph(y, WalkColor::black, kLayerRate);
  bool saw_layer = false;
  for (const auto& arcs : rg.arcs)
    for (const auto& a : arcs)
      if (y.is_layer(a.face)) {
        saw_layer = true;
        CHECK(a.rate == doctest::Approx(1.2071068).epsilon(1e-7));
      }
  CHECK(saw_layer);
}

TEST_CASE("harmonic measure: absorbed values and a random-walk oracle on a 4x4 domain") {
  const DobrushinDomain d = rect_domain(4, 4, {0, 0}, {4, 4});
  const ExtendedMedial x = extend_medial(build_medial(d));
  for (WalkColor c : {WalkColor::black, WalkColor::white}) {
    const RateGraph rg = build_rate_graph(x, c);
    const HarmonicMeasure hm = solve_hm(rg);
    CHECK(hm.residual < 1e-10);
    for (int f = 0; f < rg.face_count; ++f) {
      if (rg.target[f]) CHECK(hm.values[f] == 1.0);
      if (rg.other[f]) CHECK(hm.values[f] == 0.0);
    }
    // Embedded discrete-time chain: jump along an arc with probability proportional to its rate.
    std::mt19937_64 rng(c == WalkColor::black ? 5 : 6);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t k = 0; k < rg.unknowns.size(); k += std::max<std::size_t>(1, rg.unknowns.size() / 6)) {
      const int start = rg.unknowns[k];
      const int walks = 20000;
      int hits = 0;
      for (int w = 0; w < walks; ++w) {
        int f = start;
        while (!rg.target[f] && !rg.other[f]) {
          const auto& arcs = rg.arcs[rg.unknown_of[f]];
          double total = 0;
          for (const auto& a : arcs) total += a.rate;
          double r = u01(rng) * total;
          int next = arcs.back().face;
          for (const auto& a : arcs) {
            if (r < a.rate) {
              next = a.face;
              break;
            }
            r -= a.rate;
          }
          f = next;
        }
        hits += rg.target[f];
      }
      const double p = static_cast<double>(hits) / walks;
      const double se = std::max(std::sqrt(p * (1 - p) / walks), 1e-4);
      CAPTURE(start);
      CHECK(std::abs(p - hm.values[start]) < 4 * se);
    }
  }
}

TEST_CASE("harmonic solve agrees between scalar and avx2 kernels") {
  const ExtendedMedial x = extend_medial(build_medial(rect_domain(60, 60, {0, 0}, {60, 60})));
  const RateGraph rg = build_rate_graph(x, WalkColor::white);
  kernels::force_isa(kernels::Isa::scalar);
  const HarmonicMeasure a = solve_hm(rg);
  kernels::force_isa(kernels::Isa::avx2);
  const HarmonicMeasure b = solve_hm(rg);
  CHECK_FALSE(a.dense);
  for (int f = 0; f < rg.face_count; ++f)
    if (!std::isnan(a.values[f])) CHECK(std::abs(a.values[f] - b.values[f]) < 1e-10);
}

TEST_CASE("conjugate gradient solves a tridiagonal system") {
  // -x_{i-1} + 2 x_i - x_{i+1} = b_i with x_i = i (1-based), zero boundary.
  const int n = 50;
  std::vector<std::int32_t> start{0}, col;
  std::vector<double> val, rhs(n), x(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (i > 0) col.push_back(i - 1), val.push_back(-1.0);
    col.push_back(i), val.push_back(2.0);
    if (i + 1 < n) col.push_back(i + 1), val.push_back(-1.0);
    start.push_back(static_cast<std::int32_t>(col.size()));
    rhs[i] = (i + 1 == n) ? n + 1.0 : 0.0;
  }
  conjugate_gradient(start, col, val, rhs, x);
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(i + 1.0).epsilon(1e-9));
}

TEST_CASE("comparison principle on non-degenerate domains, and the swapped negative control") {
  for (auto d : {rect_domain(1, 1, {0, 0}, {1, 0}), rect_domain(2, 2, {0, 0}, {2, 2}), rect_domain(3, 2, {0, 0}, {3, 0})}) {
    const MedialGraph m = build_medial(d);
    const Observable o = exact_observable(m);
    const ComparisonReport r = check_comparison(m, o);
    CHECK(r.pass);
    CHECK(r.edges > 0);
    CHECK(r.worst_lower <= 1e-10);
    CHECK(r.worst_upper <= 1e-10);
    CHECK_FALSE(check_comparison(m, o, kLayerRateFromWeights, true).pass);
  }
}

TEST_CASE("comparison principle on the 3x2 domain with a = b" * doctest::test_suite("degenerate")) {
  const MedialGraph m = build_medial(rect_domain(3, 2, {0, 0}, {0, 0}));
  const ComparisonReport r = check_comparison(m, exact_observable(m));
  CHECK(r.worst_upper <= 1e-10);
  CHECK(r.worst_lower <= 1e-10);
}

TEST_CASE("boundary modified Laplacian is nonnegative; interior faces pass the ordinary check") {
  for (auto d : {rect_domain(3, 2, {0, 0}, {3, 0}), rect_domain(3, 3, {0, 0}, {3, 3})}) {
    const MedialGraph m = build_medial(d);
    const HFunction h = build_H(exact_observable(m), m);
    const BoundaryLaplacian bl = boundary_subharmonicity_check(h, extend_medial(m));
    CHECK(bl.faces > 0);
    CHECK(bl.min_value >= -1e-10);
    CHECK(bl.min_interior >= -1e-10);
  }
}

TEST_CASE("scaling probes: small sizes solve cleanly; unknown families are rejected") {
  const ScalingProbe p = hm_scaling_probe("distance_d", {4, 8, 16});
  CHECK(p.max_residual < 1e-10);
  CHECK(p.values.size() == 3);
  CHECK(std::is_sorted(p.values.rbegin(), p.values.rend()));
  CHECK_THROWS_AS(hm_scaling_probe("nope", {4, 8, 16}), Error);
}
