#include <random>

#include "helpers.hpp"

#include "fklab/error.hpp"
#include "fklab/experiments.hpp"
#include "fklab/loops.hpp"

using namespace fklab;
using namespace fklab::test;

namespace {

McBudget budget(int sweeps, std::uint64_t seed = 1) {
  McBudget b;
  b.sweeps = sweeps;
  b.seed = seed;
  return b;
}

double exact(const PrimalGraph& g, const BoundaryCondition& bc, const FKParams& fk, const Event& ev) {
  return event_probability(enumerate_measure(g, bc, fk), ev);
}

}  // namespace

TEST_CASE("duality identity holds exactly on enumerable rectangles") {
  const FKParams fk = critical_ising();
  const FKParams dual{dual_parameter(fk.p, fk.q), fk.q};
  for (auto [n, m] : {std::pair{1, 1}, {2, 1}, {2, 2}, {3, 2}}) {
    const PrimalGraph g = build_rectangle(n, m);
    const double pv = exact(g, BoundaryCondition::free(g), fk, [&g](const Configuration& c) {
      UnionFind uf;
      return vertical_crossing(g, c, uf);
    });
    const DualComb d = dual_comb(n, m);
    CHECK(d.graph.edge_count() == g.edge_count());
    const double ph = exact(d.graph, d.bc, dual, [&d](const Configuration& c) {
      UnionFind uf;
      return open_connection(d.graph, c, d.left, d.right, uf);
    });
    CAPTURE(n);
    CAPTURE(m);
    CHECK(pv + ph == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("unit-square crossing estimate matches enumeration") {
  const PrimalGraph g = build_rectangle(1, 1);
  const double p = exact(g, BoundaryCondition::free(g), critical_ising(), [&g](const Configuration& c) {
    UnionFind uf;
    return vertical_crossing(g, c, uf);
  });
  const CrossingEstimates e = crossing_probability(1, 1, BcKind::free, budget(40000));
  CHECK(std::abs(e.vertical.mean - p) < 4 * e.vertical.std_error);
}

TEST_CASE("rectangle boundary conditions") {
  const PrimalGraph g = build_rectangle(4, 4);
  CHECK(rectangle_bc(g, BcKind::free).block_count() == 0);
  CHECK(rectangle_bc(g, BcKind::wired).block_count() == 1);
  const BoundaryCondition d = rectangle_bc(g, BcKind::dobrushin);
  REQUIRE(d.block_count() == 1);
  // Wired upper half: the top-left corner is wired, the bottom-left is not.
  CHECK(d.block_of(*g.index_of({0, 4})) >= 0);
  CHECK(d.block_of(*g.index_of({0, 0})) < 0);
  CHECK(parse_bc("wired") == BcKind::wired);
  CHECK(bc_name(BcKind::dobrushin) == "dobrushin");
  CHECK_THROWS_AS(parse_bc("periodic"), Error);
}

TEST_CASE("free <= wired crossing at a small size; rotation symmetry") {
  const CrossingEstimates f = crossing_probability(8, 8, BcKind::free, budget(4000, 2));
  const CrossingEstimates w = crossing_probability(8, 8, BcKind::wired, budget(4000, 3));
  CHECK(f.vertical.mean - w.vertical.mean < 3 * combined_se(f.vertical, w.vertical));
  CHECK(std::abs(f.vertical.mean - f.horizontal.mean) < 4 * combined_se(f.vertical, f.horizontal));
  // FKG: P(both) >= P(v) P(h), up to noise.
  CHECK(f.both.mean - f.vertical.mean * f.horizontal.mean > -3 * f.both.std_error);
}

TEST_CASE("annulus circuits: extreme configurations and the four-crossing implication") {
  const int n = 4, m = 2;
  const PrimalGraph g = build_rectangle(2 * n, 2 * n, {-n, -n});
  UnionFind uf;
  CHECK(annulus_circuit(g, Configuration(g.edge_count(), true), m, n, uf));
  CHECK_FALSE(annulus_circuit(g, Configuration(g.edge_count()), m, n, uf));
  CHECK(four_rectangle_crossings(g, Configuration(g.edge_count(), true), m, n, uf));
  // A ring of open edges along the square of radius 3 is a circuit.
  Configuration ring(g.edge_count());
  for (int t = -3; t < 3; ++t) {
    ring.set(*g.edge_between({t, -3}, {t + 1, -3}), true);
    ring.set(*g.edge_between({t, 3}, {t + 1, 3}), true);
    ring.set(*g.edge_between({-3, t}, {-3, t + 1}), true);
    ring.set(*g.edge_between({3, t}, {3, t + 1}), true);
  }
  CHECK(annulus_circuit(g, ring, m, n, uf));
  ring.set(*g.edge_between({0, 3}, {1, 3}), false);
  CHECK_FALSE(annulus_circuit(g, ring, m, n, uf));
  // Property: four hard crossings imply a circuit, on random product configurations.
  std::mt19937_64 rng(8);
  int fired = 0;
  for (int k = 0; k < 4000; ++k) {
    Configuration c(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) c.set(e, (rng() % 1000) < 700);
    if (four_rectangle_crossings(g, c, m, n, uf)) {
      ++fired;
      CHECK(annulus_circuit(g, c, m, n, uf));
    }
  }
  CHECK(fired > 100);
}

TEST_CASE("circuit_probability rejects m = 0 and m >= n") {
  CHECK_THROWS_AS(circuit_probability(0, 8, BcKind::free, budget(10)), Error);
  CHECK_THROWS_AS(circuit_probability(8, 8, BcKind::free, budget(10)), Error);
}

TEST_CASE("box_crossing on a single open row") {
  const PrimalGraph g = build_rectangle(4, 2);
  Configuration c(g.edge_count());
  for (int x = 0; x < 4; ++x) c.set(*g.edge_between({x, 1}, {x + 1, 1}), true);
  UnionFind uf;
  CHECK(box_crossing(g, c, {0, 0}, {4, 2}, false, uf));
  CHECK_FALSE(box_crossing(g, c, {0, 0}, {4, 2}, true, uf));
  CHECK_FALSE(box_crossing(g, c, {0, 0}, {4, 0}, false, uf));
}

TEST_CASE("boundary one-point estimate matches enumeration on a tiny domain") {
  // n = 1, beta = 1: the 2x2 rectangle [-1, 1] x [0, 2], x = 0 bottom, u = 1 top.
  const PrimalGraph g = build_rectangle(2, 2, {-1, 0});
  const int xi = *g.index_of({0, 0}), ui = *g.index_of({1, 2});
  const double p = exact(g, BoundaryCondition::free(g), critical_ising(), [&](const Configuration& c) {
    UnionFind uf;
    return open_connection(g, c, std::vector<int>{xi}, std::vector<int>{ui}, uf);
  });
  const Estimate e = boundary_onepoint(1, 1.0, 0, 1, budget(40000));
  CHECK(std::abs(e.mean - p) < 4 * e.std_error);
  CHECK_THROWS_AS(boundary_onepoint(4, 1.0, 9, 0, budget(10)), Error);
}

TEST_CASE("boundary pair: x = y reduces to the one-point event; tiny domain matches enumeration") {
  const Estimate same = boundary_pair(4, 1.0, 1, 1, budget(4000, 5));
  // One-point event with the same Dobrushin conditions, estimated on the same chain seed.
  const PrimalGraph g = build_rectangle(8, 8, {-4, 0});
  const DobrushinDomain d = build_dobrushin(g, {-4, 8}, {4, 8});
  ChainSpec s;
  s.graph = &g;
  s.bc = BoundaryCondition::dobrushin(d);
  s.sweeps = 4000;
  s.seed = 5;
  const int xi = *g.index_of({1, 0});
  const auto one = run_chain(s, {[&](const Configuration& c) {
                               UnionFind uf;
                               return open_connection(g, c, std::vector<int>{xi}, d.wired_arc, uf) ? 1.0 : 0.0;
                             }});
  CHECK(same.mean == one[0].mean);

  // n = 1, beta = 1 is the 2x2 rectangle with the top side wired.
  const PrimalGraph t = build_rectangle(2, 2, {-1, 0});
  const DobrushinDomain td = build_dobrushin(t, {-1, 2}, {1, 2});
  const int a = *t.index_of({-1, 0}), b = *t.index_of({1, 0});
  const double p = exact(t, BoundaryCondition::dobrushin(td), critical_ising(), [&](const Configuration& c) {
    UnionFind uf;
    return open_connection(t, c, std::vector<int>{a}, td.wired_arc, uf) &&
           open_connection(t, c, std::vector<int>{b}, td.wired_arc, uf);
  });
  const Estimate e = boundary_pair(1, 1.0, -1, 1, budget(40000, 6));
  CHECK(std::abs(e.mean - p) < 4 * e.std_error);
}

TEST_CASE("one-arm cells reproduce the combined run") {
  const McBudget b = budget(300, 9);
  const ScalingResult r = one_arm(ArmKind::half_plane, {4, 8, 16}, b);
  for (std::size_t i = 0; i < r.sizes.size(); ++i) {
    McBudget bi = b;
    bi.seed = one_arm_seed(b.seed, i);
    CHECK(one_arm_point(ArmKind::half_plane, r.sizes[i], bi).mean == r.estimates[i].mean);
  }
  for (const Estimate& e : r.estimates) CHECK((e.mean > 0 && e.mean <= 1));
}

TEST_CASE("two_point preconditions") {
  CHECK_THROWS_AS(two_point({4, 8}, 16, 4, budget(10)), Error);
  CHECK_THROWS_AS(two_point({2}, 16, 16, budget(10)), Error);
}

TEST_CASE("path crossings of an annulus are counted as alternations") {
  const DobrushinDomain d = rect_domain(16, 16, {8, 0}, {8, 16});
  const MedialGraph m = build_medial(d);
  std::vector<int> path, wind;
  trace_path(Configuration(d.graph.edge_count()), m, path, wind);
  const int k = path_annulus_crossings(m, path, {8, 8}, 2, 4);
  CHECK(k >= 0);
  CHECK(path_annulus_crossings(m, std::vector<int>{}, {8, 8}, 2, 4) == 0);
}

TEST_CASE("crossing counts: P(A_0) = 1 and P(A_k) decreasing") {
  const CrossingCounts c = crossing_counts(32, 4, 3, budget(400, 4));
  REQUIRE(c.p.size() == 4);
  CHECK(c.p[0].mean == 1.0);
  for (std::size_t k = 1; k < c.p.size(); ++k) CHECK(c.p[k].mean <= c.p[k - 1].mean);
}

TEST_CASE("two-point connection at distance 1 on a 3x3 box matches enumeration") {
  // The box is far below the 4d margin two_point() demands, so this runs the
  // same estimator (free bc, open-cluster connection) through run_chain.
  const PrimalGraph g = build_rectangle(2, 2, {-1, -1});
  const int x = *g.index_of({0, 0}), y = *g.index_of({1, 0});
  const auto connected = [&](const Configuration& c) {
    UnionFind uf;
    return open_connection(g, c, std::vector<int>{x}, std::vector<int>{y}, uf);
  };
  const double p = exact(g, BoundaryCondition::free(g), critical_ising(), connected);
  ChainSpec s;
  s.graph = &g;
  s.bc = BoundaryCondition::free(g);
  s.sweeps = 40000;
  s.seed = 12;
  const auto e = run_chain(s, {[&](const Configuration& c) { return connected(c) ? 1.0 : 0.0; }});
  CHECK(p > 0.5);
  CHECK(std::abs(e[0].mean - p) < 4 * e[0].std_error);
}
