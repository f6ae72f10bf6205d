#include "helpers.hpp"

#include "fklab/error.hpp"
#include "fklab/fk.hpp"

using namespace fklab;
using namespace fklab::test;

namespace {

PrimalGraph single_edge() { return PrimalGraph({{0, 0}, {1, 0}}, {{{0, 0}, {1, 0}}}); }

}  // namespace

TEST_CASE("self_dual_point and dual_parameter") {
  CHECK(self_dual_point(2.0) == doctest::Approx(2.0 - kSqrt2).epsilon(1e-15));
  CHECK(self_dual_point(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(self_dual_point(4.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(dual_parameter(self_dual_point(2.0), 2.0) == doctest::Approx(self_dual_point(2.0)).epsilon(1e-14));
  CHECK(dual_parameter(0.3, 1.0) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(dual_parameter(0.9, 2.0) == doctest::Approx(2.0 / 11.0).epsilon(1e-14));
  // Involution over a grid of (p, q).
  for (double q : {1.0, 2.0, 3.0, 4.0})
    for (double p = 0.05; p < 1.0; p += 0.1) CHECK(dual_parameter(dual_parameter(p, q), q) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("FKParams validation") {
  CHECK_THROWS_AS((FKParams{1.5, 2.0}.validate()), Error);
  CHECK_THROWS_AS((FKParams{0.5, 0.5}.validate()), Error);
  CHECK_NOTHROW((FKParams{0.5, 2.0}.validate()));
}

TEST_CASE("cluster_count") {
  const PrimalGraph g = build_rectangle(2, 2);
  CHECK(cluster_count(g, Configuration(g.edge_count()), BoundaryCondition::free(g)) == 9);
  CHECK(cluster_count(g, Configuration(g.edge_count(), true), BoundaryCondition::free(g)) == 1);
  CHECK(cluster_count(g, Configuration(g.edge_count(), true), BoundaryCondition::wired(g)) == 1);
  const PrimalGraph sq = build_rectangle(1, 1);
  CHECK(cluster_count(sq, Configuration(4), BoundaryCondition::wired(sq)) == 1);
  // Wiring leaves the centre of the 2x2 grid alone when everything is closed.
  CHECK(cluster_count(g, Configuration(g.edge_count()), BoundaryCondition::wired(g)) == 2);
}

TEST_CASE("config_weight on a single edge") {
  const PrimalGraph g = single_edge();
  const double p = 0.3, q = 2.5;
  const FKParams fk{p, q};
  CHECK(config_weight(g, Configuration(1, true), BoundaryCondition::free(g), fk) == doctest::Approx(p * q));
  CHECK(config_weight(g, Configuration(1), BoundaryCondition::free(g), fk) == doctest::Approx((1 - p) * q * q));
  const BoundaryCondition both(g, {{0, 1}});
  CHECK(config_weight(g, Configuration(1), both, fk) == doctest::Approx((1 - p) * q));
}

TEST_CASE("enumerate_measure oracles") {
  const PrimalGraph g = single_edge();
  const ExactMeasure free = enumerate_measure(g, BoundaryCondition::free(g), critical_ising());
  CHECK(free.probability(1) == doctest::Approx(kSqrt2 - 1.0).epsilon(1e-14));
  const ExactMeasure wired = enumerate_measure(g, BoundaryCondition(g, {{0, 1}}), critical_ising());
  CHECK(wired.probability(1) == doctest::Approx(critical_ising().p).epsilon(1e-14));

  // q = 1 is a product measure.
  const PrimalGraph r = build_rectangle(2, 1);
  const ExactMeasure bern = enumerate_measure(r, BoundaryCondition::free(r), {0.3, 1.0});
  for (double m : edge_marginals(bern)) CHECK(m == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(bern.probability(0) == doctest::Approx(std::pow(0.7, r.edge_count())).epsilon(1e-13));

  double total = 0;
  for (double v : free.probabilities()) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("enumerate_measure refuses large graphs") {
  const PrimalGraph g = build_rectangle(4, 4);
  CHECK(g.edge_count() == 40);
  try {
    enumerate_measure(g, BoundaryCondition::free(g), critical_ising());
    FAIL("expected cutoff_exceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::cutoff_exceeded);
  }
}

TEST_CASE("event_probability") {
  const PrimalGraph g = single_edge();
  const ExactMeasure mu = enumerate_measure(g, BoundaryCondition::free(g), critical_ising());
  CHECK(event_probability(mu, [](const Configuration&) { return true; }) == doctest::Approx(1.0));
  CHECK(event_probability(mu, [](const Configuration& c) { return c.open(0); }) ==
        doctest::Approx(kSqrt2 - 1.0).epsilon(1e-14));
}

TEST_CASE("unit square vertical crossing under free bc matches a hand count") {
  // Weights p^o (1-p)^c q^k over the 16 configurations; a vertical crossing
  // needs the left or the right side open.
  const PrimalGraph g = build_rectangle(1, 1);
  const FKParams fk = critical_ising();
  double z = 0, cross = 0;
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    const Configuration c = Configuration::from_mask(4, mask);
    const int o = c.open_count();
    // Clusters on a 4-cycle: 4 - o sites merged, except all four open gives 1.
    const int k = o == 4 ? 1 : 4 - o;
    const double w = std::pow(fk.p, o) * std::pow(1 - fk.p, 4 - o) * std::pow(fk.q, k);
    z += w;
    UnionFind uf;
    if (vertical_crossing(g, c, uf)) cross += w;
  }
  const ExactMeasure mu = enumerate_measure(g, BoundaryCondition::free(g), fk);
  CHECK(event_probability(mu, [&g](const Configuration& c) {
          UnionFind uf;
          return vertical_crossing(g, c, uf);
        }) == doctest::Approx(cross / z).epsilon(1e-14));
  // By hand with x = p/(1-p) = √2: Z ∝ 72 + 48√2, crossing ∝ 48 + 32√2.
  CHECK(cross / z == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}
