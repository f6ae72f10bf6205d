#include "fklab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>
#include <unordered_set>

#include "fklab/error.hpp"

namespace fklab {

namespace {

int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

std::uint64_t pair_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

// ---------------------------------------------------------------------------
// PrimalGraph

PrimalGraph::PrimalGraph(std::vector<Site> sites, const std::vector<std::pair<Site, Site>>& edges)
    : sites_(std::move(sites)) {
  if (!sites_.empty()) {
    int x1 = sites_[0].x, y1 = sites_[0].y;
    x0_ = x1;
    y0_ = y1;
    for (const Site& s : sites_) {
      x0_ = std::min(x0_, s.x);
      y0_ = std::min(y0_, s.y);
      x1 = std::max(x1, s.x);
      y1 = std::max(y1, s.y);
    }
    w_ = x1 - x0_ + 1;
    h_ = y1 - y0_ + 1;
    if (static_cast<long long>(w_) * h_ > 64LL * 1024 * 1024)
      throw Error(ErrorCode::invalid_argument, "site set spans too large a bounding box");
  }
  grid_.assign(static_cast<std::size_t>(w_) * h_, -1);
  for (int i = 0; i < site_count(); ++i) {
    int& g = grid_[slot(sites_[i])];
    if (g >= 0) throw Error(ErrorCode::invalid_argument, "duplicate site");
    g = i;
  }
  dir_edge_.assign(sites_.size() * 4, -1);
  edges_.reserve(edges.size());
  for (const auto& [s, t] : edges) {
    auto iu = index_of(s);
    auto iv = index_of(t);
    if (!iu || !iv) throw Error(ErrorCode::invalid_argument, "edge endpoint is not a site");
    const int dx = t.x - s.x, dy = t.y - s.y;
    int d = -1;
    for (int k = 0; k < 4; ++k)
      if (kLatticeStep[k].x == dx && kLatticeStep[k].y == dy) d = k;
    if (d < 0) throw Error(ErrorCode::invalid_argument, "edge is not a unit lattice step");
    if (dir_edge_[*iu * 4 + d] >= 0) throw Error(ErrorCode::invalid_argument, "duplicate edge");
    const int id = edge_count();
    dir_edge_[*iu * 4 + d] = id;
    dir_edge_[*iv * 4 + (d + 2) % 4] = id;
    edges_.push_back({std::min(*iu, *iv), std::max(*iu, *iv)});
  }
  for (int i = 0; i < site_count(); ++i)
    if (degree(i) < 4) boundary_.push_back(i);
}

PrimalGraph PrimalGraph::induced(std::vector<Site> sites) {
  std::unordered_set<Site, SiteHash> present(sites.begin(), sites.end());
  std::vector<std::pair<Site, Site>> edges;
  for (const Site& s : sites)
    if (present.count({s.x + 1, s.y})) edges.push_back({s, {s.x + 1, s.y}});
  for (const Site& s : sites)
    if (present.count({s.x, s.y + 1})) edges.push_back({s, {s.x, s.y + 1}});
  return PrimalGraph(std::move(sites), edges);
}

int PrimalGraph::slot(Site s) const { return (s.y - y0_) * w_ + (s.x - x0_); }

std::optional<int> PrimalGraph::index_of(Site s) const {
  if (s.x < x0_ || s.y < y0_ || s.x >= x0_ + w_ || s.y >= y0_ + h_) return std::nullopt;
  const int i = grid_[slot(s)];
  if (i < 0) return std::nullopt;
  return i;
}

std::optional<int> PrimalGraph::edge_between(Site s, Site t) const {
  auto i = index_of(s);
  if (!i) return std::nullopt;
  for (int k = 0; k < 4; ++k)
    if (s.x + kLatticeStep[k].x == t.x && s.y + kLatticeStep[k].y == t.y) {
      const int e = edge_toward(*i, k);
      if (e < 0) return std::nullopt;
      return e;
    }
  return std::nullopt;
}

std::optional<int> PrimalGraph::edge_between_indices(int u, int v) const {
  return edge_between(sites_[u], sites_[v]);
}

int PrimalGraph::degree(int i) const {
  int d = 0;
  for (int k = 0; k < 4; ++k) d += edge_toward(i, k) >= 0;
  return d;
}

std::vector<int> PrimalGraph::incident_edges(int i) const {
  std::vector<int> out;
  for (int k = 0; k < 4; ++k)
    if (edge_toward(i, k) >= 0) out.push_back(edge_toward(i, k));
  return out;
}

bool PrimalGraph::connected() const {
  if (sites_.empty()) return true;
  std::vector<char> seen(sites_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int k = 0; k < 4; ++k) {
      const int e = edge_toward(u, k);
      if (e < 0) continue;
      const int v = edges_[e].u == u ? edges_[e].v : edges_[e].u;
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == site_count();
}

PrimalGraph build_rectangle(int n, int m, Site origin) {
  if (n < 1 || m < 1) throw Error(ErrorCode::invalid_argument, "rectangle sides must be at least 1");
  std::vector<Site> sites;
  sites.reserve(static_cast<std::size_t>(n + 1) * (m + 1));
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= n; ++i) sites.push_back({origin.x + i, origin.y + j});
  return PrimalGraph::induced(std::move(sites));
}

namespace {

bool has_cell(const PrimalGraph& g, Site ll) {
  auto e1 = g.edge_between(ll, {ll.x + 1, ll.y});
  auto e2 = g.edge_between(ll, {ll.x, ll.y + 1});
  auto e3 = g.edge_between({ll.x + 1, ll.y}, {ll.x + 1, ll.y + 1});
  auto e4 = g.edge_between({ll.x, ll.y + 1}, {ll.x + 1, ll.y + 1});
  return e1 && e2 && e3 && e4;
}

}  // namespace

PrimalGraph dual_graph(const PrimalGraph& g) {
  std::vector<Site> cells;
  for (const Site& s : g.sites())
    if (has_cell(g, s)) cells.push_back(s);
  std::sort(cells.begin(), cells.end(), [](Site p, Site q) { return std::tie(p.y, p.x) < std::tie(q.y, q.x); });
  return PrimalGraph::induced(std::move(cells));
}

std::vector<int> outer_polygon(const PrimalGraph& g) {
  if (g.site_count() < 4) throw Error(ErrorCode::invalid_domain, "domain needs at least one unit face");
  if (!g.connected()) throw Error(ErrorCode::invalid_domain, "domain is not connected");
  int start = 0;
  for (int i = 1; i < g.site_count(); ++i)
    if (std::tie(g.site(i).y, g.site(i).x) < std::tie(g.site(start).y, g.site(start).x)) start = i;

  // Right-hand walk: the unbounded face stays on the right.
  auto choose = [&](int at, int heading) {
    for (int turn : {3, 0, 1, 2}) {
      const int d = (heading + turn) % 4;
      if (g.edge_toward(at, d) >= 0) return d;
    }
    return -1;
  };
  const int first = choose(start, 3);
  if (first < 0) throw Error(ErrorCode::invalid_domain, "isolated site");
  std::vector<int> poly;
  std::vector<char> seen(g.site_count(), 0);
  int at = start, d = first;
  const int limit = 2 * g.edge_count() + 2;
  for (int steps = 0;; ++steps) {
    if (steps > limit) throw Error(ErrorCode::invalid_domain, "outer boundary walk did not close");
    if (seen[at]) throw Error(ErrorCode::invalid_domain, "outer boundary is not a simple polygon");
    seen[at] = 1;
    poly.push_back(at);
    const int e = g.edge_toward(at, d);
    at = g.edges()[e].u == at ? g.edges()[e].v : g.edges()[e].u;
    d = choose(at, d);
    if (at == start && d == first) break;
    if (at == start) throw Error(ErrorCode::invalid_domain, "outer boundary is not a simple polygon");
  }
  if (poly.size() < 4) throw Error(ErrorCode::invalid_domain, "domain needs at least one unit face");

  const auto inside = interior_cells(g, poly);
  for (const Site& c : inside)
    if (!has_cell(g, c)) throw Error(ErrorCode::invalid_domain, "domain has a hole or a missing edge");
  // Euler: a simply connected union of unit squares has E - V + 1 faces.
  if (static_cast<long long>(inside.size()) != static_cast<long long>(g.edge_count()) - g.site_count() + 1)
    throw Error(ErrorCode::invalid_domain, "domain is not simply connected");
  return poly;
}

std::vector<Site> interior_cells(const PrimalGraph& g, std::span<const int> polygon) {
  // Scanline over cell rows: vertical polygon edges crossing y + 1/2.
  std::unordered_map<int, std::vector<int>> rows;
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Site p = g.site(polygon[k]);
    const Site q = g.site(polygon[(k + 1) % n]);
    if (p.x == q.x) rows[std::min(p.y, q.y)].push_back(p.x);
  }
  std::vector<Site> cells;
  for (auto& [y, xs] : rows) {
    std::sort(xs.begin(), xs.end());
    if (xs.size() % 2 != 0) throw Error(ErrorCode::invalid_domain, "boundary polygon is not closed");
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2)
      for (int x = xs[k]; x < xs[k + 1]; ++x) cells.push_back({x, y});
  }
  std::sort(cells.begin(), cells.end(), [](Site p, Site q) { return std::tie(p.y, p.x) < std::tie(q.y, q.x); });
  return cells;
}

DobrushinDomain build_dobrushin(PrimalGraph g, Site a, Site b) {
  DobrushinDomain d;
  auto poly = outer_polygon(g);
  auto ia = g.index_of(a);
  auto ib = g.index_of(b);
  if (!ia || !ib) throw Error(ErrorCode::invalid_domain, "a and b must be sites of the domain");
  auto pa = std::find(poly.begin(), poly.end(), *ia);
  if (pa == poly.end()) throw Error(ErrorCode::invalid_domain, "a is not on the outer boundary");
  std::rotate(poly.begin(), pa, poly.end());
  auto pb = std::find(poly.begin(), poly.end(), *ib);
  if (pb == poly.end()) throw Error(ErrorCode::invalid_domain, "b is not on the outer boundary");
  const std::size_t kb = static_cast<std::size_t>(pb - poly.begin());
  const std::size_t n = poly.size();

  d.a = a;
  d.b = b;
  if (kb == 0) {
    d.free_arc.assign(poly.begin(), poly.end());
    d.free_arc.push_back(poly[0]);
    d.wired_arc = {poly[0]};
  } else {
    d.free_arc.assign(poly.begin(), poly.begin() + static_cast<std::ptrdiff_t>(kb) + 1);
    d.wired_arc.assign(poly.begin() + static_cast<std::ptrdiff_t>(kb), poly.end());
    d.wired_arc.push_back(poly[0]);
  }
  auto arc_edges = [&](const std::vector<int>& arc) {
    std::vector<int> es;
    for (std::size_t k = 0; k + 1 < arc.size(); ++k) es.push_back(*g.edge_between_indices(arc[k], arc[k + 1]));
    return es;
  };
  d.free_edges = arc_edges(d.free_arc);
  d.wired_edges = arc_edges(d.wired_arc);
  d.wired.assign(g.site_count(), 0);
  for (int s : d.wired_arc) d.wired[s] = 1;
  d.polygon = std::move(poly);
  (void)n;
  d.graph = std::move(g);
  return d;
}

// ---------------------------------------------------------------------------
// Medial graph

double dir_angle(Dir d) { return std::numbers::pi * (0.25 + 0.5 * static_cast<int>(d)); }

Dir dir_of(Pt from, Pt to) {
  const int dx = to.x - from.x, dy = to.y - from.y;
  if (dx > 0) return dy > 0 ? Dir::NE : Dir::SE;
  return dy > 0 ? Dir::NW : Dir::SW;
}

const std::array<std::array<std::array<int, 2>, 2>, 4> kTurnTable = {{
    // [in][horizontal][open]
    {{{-1, -1}, {1, 3}}},  // in NE: horizontal closed->NW, open->SE
    {{{2, 0}, {-1, -1}}},  // in NW: vertical closed->SW, open->NE
    {{{-1, -1}, {3, 1}}},  // in SW: horizontal closed->SE, open->NW
    {{{0, 2}, {-1, -1}}},  // in SE: vertical closed->NE, open->SW
}};

std::optional<int> MedialGraph::face_at(Pt doubled) const {
  auto it = face_index_.find(doubled);
  if (it == face_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> MedialGraph::white_face(Site ll) const { return face_at({2 * ll.x + 1, 2 * ll.y + 1}); }

std::optional<int> MedialGraph::edge_between_faces(int black, int white) const {
  auto it = edge_index_.find(pair_key(black, white));
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

namespace {

// Lower-left corner of the unit face to the right of the step p -> q.
Site right_cell(Site p, Site q) {
  const int dx = q.x - p.x, dy = q.y - p.y;
  const int cx = p.x + q.x + dy, cy = p.y + q.y - dx;  // doubled centre
  return {floor_div2(cx - 1), floor_div2(cy - 1)};
}

}  // namespace

std::pair<Site, Site> medial_point_sites(Pt p) {
  if (p.x & 1) {
    const Site s{floor_div2(p.x - 1), p.y / 2};
    return {s, {s.x + 1, s.y}};
  }
  const Site s{p.x / 2, floor_div2(p.y - 1)};
  return {s, {s.x, s.y + 1}};
}

MedialGraph build_medial(const DobrushinDomain& d) {
  MedialGraph m;
  m.domain_ = d;
  const PrimalGraph& g = d.graph;
  const int a = d.a_index(), b = d.b_index();

  std::vector<char> on_free(g.site_count(), 0);
  for (int s : d.free_arc) on_free[s] = 1;
  for (int s = 0; s < g.site_count(); ++s) {
    Face f;
    f.color = Color::black;
    f.pos = {2 * g.site(s).x, 2 * g.site(s).y};
    f.site = s;
    f.role = d.wired[s] ? FaceRole::wired_site : (on_free[s] ? FaceRole::free_site : FaceRole::interior_site);
    m.face_index_[f.pos] = static_cast<int>(m.faces_.size());
    m.faces_.push_back(f);
    if (d.wired[s]) m.wired_arc_faces_.push_back(s);
  }

  auto add_white = [&](Site c, FaceRole role) {
    const Pt pos{2 * c.x + 1, 2 * c.y + 1};
    if (m.face_index_.count(pos)) return;
    m.face_index_[pos] = static_cast<int>(m.faces_.size());
    m.faces_.push_back({Color::white, pos, role, -1});
    if (role == FaceRole::free_dual) m.free_arc_faces_.push_back(static_cast<int>(m.faces_.size()) - 1);
  };
  for (const Site& c : interior_cells(g, d.polygon)) add_white(c, FaceRole::interior_dual);
  for (std::size_t k = 0; k + 1 < d.free_arc.size(); ++k)
    add_white(right_cell(g.site(d.free_arc[k]), g.site(d.free_arc[k + 1])), FaceRole::free_dual);
  for (std::size_t k = 1; k + 1 < d.free_arc.size(); ++k) {
    const Site s = g.site(d.free_arc[k]);
    if (d.wired[d.free_arc[k]]) continue;
    for (int dx : {-1, 0})
      for (int dy : {-1, 0}) add_white({s.x + dx, s.y + dy}, FaceRole::free_dual);
  }

  const Site cell_a = right_cell(g.site(d.free_arc[0]), g.site(d.free_arc[1]));
  const std::size_t nf = d.free_arc.size();
  const Site cell_b = right_cell(g.site(d.free_arc[nf - 2]), g.site(d.free_arc[nf - 1]));
  const int face_a = *m.white_face(cell_a);
  const int face_b = *m.white_face(cell_b);

  // A medial point on a lattice edge that is missing from the domain (outside
  // the polygon, or along a slit) is split into one vertex per black face.
  std::unordered_map<Pt, int, PtHash> vindex;
  std::unordered_map<std::uint64_t, int> split_index;
  auto vertex = [&](Pt p, int black) {
    auto ends = medial_point_sites(p);
    auto e = g.edge_between(ends.first, ends.second);
    int* slot;
    if (e) {
      slot = &vindex.try_emplace(p, -1).first->second;
    } else {
      slot = &split_index.try_emplace(pair_key(p.x, p.y) * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(black), -1)
                  .first->second;
    }
    if (*slot < 0) {
      *slot = static_cast<int>(m.vertices_.size());
      MedialVertex v;
      v.pos = p;
      if (e) v.primal_edge = *e;
      m.vertices_.push_back(std::move(v));
    }
    return *slot;
  };

  for (int s = 0; s < g.site_count(); ++s) {
    const Site p = g.site(s);
    for (int dy : {1, -1})
      for (int dx : {1, -1}) {
        auto w = m.white_face({p.x + (dx - 1) / 2, p.y + (dy - 1) / 2});
        if (!w) continue;
        if (d.wired[s] && m.faces_[*w].role == FaceRole::free_dual &&
            !((s == a && *w == face_a) || (s == b && *w == face_b)))
          continue;
        const Pt v1{2 * p.x + dx, 2 * p.y};
        const Pt v2{2 * p.x, 2 * p.y + dy};
        // Black face on the left.
        const Pt tail = dx * dy > 0 ? v1 : v2;
        const Pt head = dx * dy > 0 ? v2 : v1;
        MedialEdge e;
        e.tail = vertex(tail, s);
        e.head = vertex(head, s);
        e.black = s;
        e.white = *w;
        e.dir = dir_of(tail, head);
        const int id = static_cast<int>(m.edges_.size());
        m.edge_index_[pair_key(s, *w)] = id;
        m.edges_.push_back(e);
        m.vertices_[e.tail].out.push_back(id);
        m.vertices_[e.head].in.push_back(id);
      }
  }

  auto ea = m.edge_between_faces(a, face_a);
  auto eb = m.edge_between_faces(b, face_b);
  if (!ea || !eb) throw Error(ErrorCode::malformed_domain, "boundary edges at a or b are missing");
  m.e_a_ = *ea;
  m.e_b_ = *eb;
  const int ta = m.edges_[m.e_a_].tail, hb = m.edges_[m.e_b_].head;
  m.vertices_[ta].terminal = true;
  m.vertices_[hb].terminal = true;

  for (std::size_t vi = 0; vi < m.vertices_.size(); ++vi) {
    MedialVertex& v = m.vertices_[vi];
    int in = static_cast<int>(v.in.size()), out = static_cast<int>(v.out.size());
    if (static_cast<int>(vi) == hb) --in;
    if (static_cast<int>(vi) == ta) --out;
    if (in != out || in > 2)
      throw Error(ErrorCode::malformed_domain, "medial vertex with unbalanced degree");
    for (int e : v.in) {
      const Pt o = m.vertices_[m.edges_[e].tail].pos;
      const int slot = o.x > v.pos.x ? (o.y > v.pos.y ? 0 : 1) : (o.y > v.pos.y ? 3 : 2);
      v.around[slot] = e;
    }
    for (int e : v.out) {
      const Pt o = m.vertices_[m.edges_[e].head].pos;
      const int slot = o.x > v.pos.x ? (o.y > v.pos.y ? 0 : 1) : (o.y > v.pos.y ? 3 : 2);
      v.around[slot] = e;
    }
  }

  const int ne = m.edge_count();
  m.next_open_.assign(ne, -1);
  m.next_closed_.assign(ne, -1);
  m.switch_edge_.assign(ne, -1);
  m.turn_open_.assign(ne, 0);
  m.turn_closed_.assign(ne, 0);
  auto quarter_turn = [&](int e, int f) {
    const int diff = ((static_cast<int>(m.edges_[f].dir) - static_cast<int>(m.edges_[e].dir)) % 4 + 4) % 4;
    if (diff == 1) return 1;
    if (diff == 3) return -1;
    throw Error(ErrorCode::inconsistent, "interface would go straight or reverse");
  };
  for (int e = 0; e < ne; ++e) {
    if (e == m.e_b_) continue;
    const MedialVertex& h = m.vertices_[m.edges_[e].head];
    std::vector<int> outs;
    for (int f : h.out)
      if (f != m.e_a_) outs.push_back(f);
    if (outs.empty()) throw Error(ErrorCode::malformed_domain, "interface reaches a dead end");
    if (outs.size() == 1) {
      m.next_open_[e] = m.next_closed_[e] = outs[0];
    } else {
      int by_state[2] = {-1, -1};
      for (int open = 0; open < 2; ++open) {
        const int want = kTurnTable[static_cast<int>(m.edges_[e].dir)][h.horizontal()][open];
        for (int f : outs)
          if (static_cast<int>(m.edges_[f].dir) == want) by_state[open] = f;
        if (by_state[open] < 0) throw Error(ErrorCode::inconsistent, "turn table has no matching edge");
        // Cross-check against the face rule.
        const int shared = open ? m.edges_[e].white : m.edges_[e].black;
        const MedialEdge& fe = m.edges_[by_state[open]];
        if (fe.white != shared && fe.black != shared)
          throw Error(ErrorCode::inconsistent, "turn table disagrees with face rule");
      }
      if (h.primal_edge >= 0) {
        m.next_open_[e] = by_state[1];
        m.next_closed_[e] = by_state[0];
        m.switch_edge_[e] = h.primal_edge;
      } else {
        m.next_open_[e] = m.next_closed_[e] = by_state[0];
      }
    }
    m.turn_open_[e] = static_cast<std::int8_t>(quarter_turn(e, m.next_open_[e]));
    m.turn_closed_[e] = static_cast<std::int8_t>(quarter_turn(e, m.next_closed_[e]));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Extended medial graph

ExtendedMedial extend_medial(const MedialGraph& m) {
  ExtendedMedial x;
  x.base = m;
  x.faces = m.faces();
  const DobrushinDomain& d = m.domain();
  const PrimalGraph& g = d.graph;

  // Layer positions first; faces are created per (position, approach
  // direction) so that the two sides of a slit get distinct layer faces.
  std::unordered_set<Pt, PtHash> black_pos, white_pos;
  std::vector<Pt> black_order, white_order;
  auto mark = [](std::unordered_set<Pt, PtHash>& set, std::vector<Pt>& order, Pt p) {
    if (set.insert(p).second) order.push_back(p);
  };
  auto in_medial = [&](Pt black, int white) {
    auto bf = m.face_at(black);
    return bf && m.edge_between_faces(*bf, white).has_value();
  };

  for (int w : m.free_arc_faces()) {
    const Pt c = m.faces()[w].pos;
    for (int dx : {-1, 1})
      for (int dy : {-1, 1}) {
        const Pt s{c.x + dx, c.y + dy};
        if (!in_medial(s, w)) mark(black_pos, black_order, s);
      }
  }
  for (int s : m.wired_arc_faces()) {
    const Pt p = m.faces()[s].pos;
    for (int dx : {-1, 1})
      for (int dy : {-1, 1}) {
        const Pt c{p.x + dx, p.y + dy};
        auto wf = m.face_at(c);
        if (!wf || !m.edge_between_faces(s, *wf)) mark(white_pos, white_order, c);
      }
  }
  if (d.degenerate()) {
    // The two boundary edges at a: their outer faces also get a layer copy.
    const std::size_t n = d.free_arc.size();
    for (auto [p, q] : {std::pair{d.free_arc[0], d.free_arc[1]}, std::pair{d.free_arc[n - 2], d.free_arc[n - 1]}}) {
      const Site c = right_cell(g.site(p), g.site(q));
      mark(white_pos, white_order, {2 * c.x + 1, 2 * c.y + 1});
    }
  }

  std::map<std::pair<Pt, int>, int> layer_id;  // (position, direction or -1)
  std::unordered_set<Pt, PtHash> placed;
  auto layer_face = [&](Pt pos, int dir, Color c) {
    auto [it, fresh] = layer_id.try_emplace({pos, dir}, static_cast<int>(x.faces.size()));
    if (fresh) {
      const bool black = c == Color::black;
      x.faces.push_back({c, pos, black ? FaceRole::extra_black : FaceRole::extra_white, -1});
      (black ? x.extra_black : x.extra_white).push_back(it->second);
      placed.insert(pos);
    }
    return it->second;
  };

  const auto& verts = m.vertices();
  std::unordered_map<Pt, int, PtHash> vpos;
  for (std::size_t i = 0; i < verts.size(); ++i)
    if (verts[i].primal_edge >= 0) vpos[verts[i].pos] = static_cast<int>(i);

  std::vector<std::vector<WalkStep>> adj(m.faces().size());
  for (int s = 0; s < g.site_count(); ++s) {
    const FaceRole role = m.faces()[s].role;
    if (role != FaceRole::interior_site && role != FaceRole::free_site) continue;
    const Pt p = m.faces()[s].pos;
    for (int dir = 0; dir < 4; ++dir) {
      const Site st = kLatticeStep[dir];
      const Pt mid{p.x + st.x, p.y + st.y};
      const Pt t{p.x + 2 * st.x, p.y + 2 * st.y};
      auto vit = vpos.find(mid);
      const bool deg4 = vit != vpos.end() && verts[vit->second].degree() == 4 && !verts[vit->second].terminal;
      if (deg4)
        adj[s].push_back({*m.face_at(t), false});
      else if (black_pos.contains(t))
        adj[s].push_back({layer_face(t, dir, Color::black), true});
    }
  }

  std::vector<char> free_edge(g.edge_count(), 0), wired_edge(g.edge_count(), 0);
  for (int e : d.free_edges) free_edge[e] = 1;
  for (int e : d.wired_edges) wired_edge[e] = 1;
  const int a = d.a_index();
  for (std::size_t f = 0; f < m.faces().size(); ++f) {
    if (m.faces()[f].role != FaceRole::interior_dual) continue;
    const Pt c = m.faces()[f].pos;
    for (int dir = 0; dir < 4; ++dir) {
      const Site st = kLatticeStep[dir];
      const Pt t{c.x + 2 * st.x, c.y + 2 * st.y};
      // Side of the cell crossed by this step.
      const auto [s0, s1] = medial_point_sites({c.x + st.x, c.y + st.y});
      const int e = *g.edge_between(s0, s1);
      const bool touches_a = g.edges()[e].u == a || g.edges()[e].v == a;
      if (wired_edge[e] || (free_edge[e] && d.degenerate() && touches_a)) {
        if (white_pos.contains(t)) adj[f].push_back({layer_face(t, dir, Color::white), true});
      } else {
        adj[f].push_back({*m.face_at(t), false});
      }
    }
  }
  // Layer positions no walk reaches still get one face each.
  for (Pt p : black_order)
    if (!placed.contains(p)) layer_face(p, -1, Color::black);
  for (Pt p : white_order)
    if (!placed.contains(p)) layer_face(p, -1, Color::white);
  adj.resize(x.faces.size());
  x.adj = std::move(adj);
  return x;
}

}  // namespace fklab
