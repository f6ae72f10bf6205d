#include <algorithm>
#include <map>
#include <set>

#include "helpers.hpp"

#include "fklab/error.hpp"

using namespace fklab;
using namespace fklab::test;

TEST_CASE("build_rectangle counts") {
  struct Case {
    int n, m, sites, edges, boundary;
  };
  for (const Case& c : {Case{2, 2, 9, 12, 8}, Case{1, 1, 4, 4, 4}, Case{3, 1, 8, 10, 8}}) {
    const PrimalGraph g = build_rectangle(c.n, c.m);
    CHECK(g.site_count() == c.sites);
    CHECK(g.edge_count() == c.edges);
    CHECK(static_cast<int>(g.boundary().size()) == c.boundary);
  }
  // Edge count formula n(m+1) + m(n+1) over a small grid of shapes.
  for (int n = 1; n <= 6; ++n)
    for (int m = 1; m <= 6; ++m) CHECK(build_rectangle(n, m).edge_count() == n * (m + 1) + m * (n + 1));
}

TEST_CASE("build_rectangle rejects empty sides") {
  CHECK_THROWS_AS(build_rectangle(0, 3), Error);
}

TEST_CASE("Dobrushin arcs on the unit square run counterclockwise") {
  const DobrushinDomain d = rect_domain(1, 1, {0, 0}, {1, 0});
  std::vector<Site> free;
  for (int i : d.free_arc) free.push_back(d.graph.site(i));
  // Counterclockwise from (0,0) the next polygon site is (1,0), so the free
  // arc is just the bottom edge and the wired arc wraps through the top.
  CHECK(free == std::vector<Site>{{0, 0}, {1, 0}});
  std::vector<Site> wired;
  for (int i : d.wired_arc) wired.push_back(d.graph.site(i));
  CHECK(wired == std::vector<Site>{{1, 0}, {1, 1}, {0, 1}, {0, 0}});
  CHECK(d.free_edges.size() == 1);
  CHECK(d.wired_edges.size() == 3);
}

TEST_CASE("degenerate a = b domain: wired arc {a}, free arc the whole boundary") {
  const DobrushinDomain d = rect_domain(2, 2, {1, 2}, {1, 2});
  CHECK(d.degenerate());
  REQUIRE(d.wired_arc.size() == 1);
  CHECK(d.graph.site(d.wired_arc[0]) == Site{1, 2});
  CHECK(d.free_edges.size() == 8);
  CHECK(d.wired_edges.empty());
}

TEST_CASE("build_dobrushin rejects non-simply-connected input and off-boundary points") {
  // Dropping the edge (1,1)-(2,1) from a 3x3 grid merges two unit squares into
  // a 2x1 interior face, which the domain check rejects.
  const PrimalGraph full = build_rectangle(3, 3);
  std::vector<std::pair<Site, Site>> edges;
  for (const PrimalEdge& e : full.edges()) {
    const Site u = full.site(e.u), v = full.site(e.v);
    if (u == Site{1, 1} && v == Site{2, 1}) continue;
    edges.push_back({u, v});
  }
  CHECK_THROWS_AS(build_dobrushin(PrimalGraph(full.sites(), edges), {0, 0}, {3, 3}), Error);
  CHECK_THROWS_AS(rect_domain(3, 3, {1, 1}, {0, 0}), Error);
  CHECK_THROWS_AS(rect_domain(3, 3, {0, 0}, {7, 7}), Error);
  const PrimalGraph two({{0, 0}, {1, 0}, {5, 5}, {6, 5}}, {{{0, 0}, {1, 0}}, {{5, 5}, {6, 5}}});
  CHECK_THROWS_AS(build_dobrushin(two, {0, 0}, {1, 0}), Error);
}

TEST_CASE("medial graph: vertex degrees are 2 or 4, one black face per site") {
  for (const auto& j : suite()) {
    CAPTURE(j["name"].get<std::string>());
    const DobrushinDomain d = domain_from_json(j);
    const MedialGraph m = build_medial(d);
    for (const MedialVertex& v : m.vertices()) CHECK((v.degree() == 2 || v.degree() == 4 || v.terminal));
    int black = 0;
    for (const Face& f : m.faces()) black += f.color == Color::black;
    CHECK(black == d.graph.site_count());
  }
  const MedialGraph m = build_medial(rect_domain(2, 1, {0, 0}, {2, 0}));
  int black = 0;
  for (const Face& f : m.faces()) black += f.color == Color::black;
  CHECK(black == 6);
}

TEST_CASE("medial edges: every edge has one black and one white face, e_a starts at a") {
  const DobrushinDomain d = rect_domain(3, 2, {0, 0}, {3, 0});
  const MedialGraph m = build_medial(d);
  for (const MedialEdge& e : m.edges()) {
    CHECK(m.faces()[e.black].color == Color::black);
    CHECK(m.faces()[e.white].color == Color::white);
  }
  CHECK(m.faces()[m.edges()[m.e_a()].black].site == d.a_index());
  CHECK(m.faces()[m.edges()[m.e_b()].black].site == d.b_index());
}

TEST_CASE("dual_graph counts") {
  struct Case {
    int n, m, sites, edges;
  };
  for (const Case& c : {Case{1, 1, 1, 0}, Case{2, 1, 2, 1}, Case{2, 2, 4, 4}, Case{3, 2, 6, 7}}) {
    const PrimalGraph g = dual_graph(build_rectangle(c.n, c.m));
    CHECK(g.site_count() == c.sites);
    CHECK(g.edge_count() == c.edges);
  }
}

TEST_CASE("extend_medial: white layer sits across the wired arc, black layer across the free arc") {
  const DobrushinDomain d = rect_domain(2, 2, {0, 0}, {2, 2});
  const ExtendedMedial x = extend_medial(build_medial(d));
  // Wired arc (2,2) -> (0,2) -> (0,0): a diamond outside each of its 4 polygon
  // edges, plus the three diagonal corners (-1,-1), (-1,5), (5,5).
  std::set<Pt> white;
  for (int f : x.extra_white) white.insert(x.faces[f].pos);
  CHECK(white == std::set<Pt>{{-1, 1}, {-1, 3}, {1, 5}, {3, 5}, {-1, -1}, {-1, 5}, {5, 5}});
  CHECK(white.size() == x.extra_white.size());
  for (int f : x.extra_black) {
    const Pt p = x.faces[f].pos;
    CHECK((p.x < 0 || p.y < 0 || p.x > 4 || p.y > 4));
  }
  for (std::size_t f = 0; f < x.faces.size(); ++f) CHECK(x.is_layer(static_cast<int>(f)) == (f >= x.base.faces().size()));
}

TEST_CASE("extend_medial on a = b: white layer only next to the wired site") {
  const DobrushinDomain d = rect_domain(2, 2, {1, 2}, {1, 2});
  const ExtendedMedial x = extend_medial(build_medial(d));
  REQUIRE_FALSE(x.extra_white.empty());
  for (int f : x.extra_white) {
    const Pt p = x.faces[f].pos;
    CHECK(std::abs(p.x - 2) == 1);
    CHECK(p.y == 5);
  }
}

TEST_CASE("slit fixture: layer diamonds at a shared position stay distinct") {
  const DobrushinDomain d = suite_domain("slit_4x2_free");
  const ExtendedMedial x = extend_medial(build_medial(d));
  std::map<Pt, int> layer_at, base_at;
  for (std::size_t f = 0; f < x.faces.size(); ++f) (x.is_layer(static_cast<int>(f)) ? layer_at : base_at)[x.faces[f].pos]++;
  // The removed site (2,0) is reached from three free sites: three layer faces at one position.
  CHECK(layer_at[Pt{4, 0}] == 3);
  CHECK_FALSE(base_at.contains(Pt{4, 0}));
  CHECK(x.faces.size() == x.base.faces().size() + x.extra_black.size() + x.extra_white.size());
}
