#include "fklab/observable.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <limits>
#include <queue>
#include <unordered_map>

#include "fklab/error.hpp"
#include "fklab/neumaier.hpp"

namespace fklab {

cplx winding_phase(int quarter_turns) {
  // exp(-i k π/4), exact on the eighth roots of unity
  static const double h = std::numbers::sqrt2 / 2;
  static const cplx roots[8] = {{1, 0}, {h, -h}, {0, -1}, {-h, -h}, {-1, 0}, {-h, h}, {0, 1}, {h, h}};
  return roots[((quarter_turns % 8) + 8) % 8];
}

Observable exact_observable(const MedialGraph& m, const ExactMeasure& mu) {
  const int ne = mu.edge_count();
  if (ne != m.domain().graph.edge_count())
    throw Error(ErrorCode::invalid_argument, "measure and medial graph disagree on the edge set");
  std::vector<NeumaierSum> re(m.edge_count()), im(m.edge_count()), hit(m.edge_count());
  Configuration c(ne);
  std::uint64_t mask = 0;
  std::vector<int> path, wind;
  const std::uint64_t total = std::uint64_t{1} << ne;
  for (std::uint64_t i = 0; i < total; ++i) {
    if (i > 0) {
      const int e = std::countr_zero(i);
      c.flip(e);
      mask ^= std::uint64_t{1} << e;
    }
    const double p = mu.probability(mask);
    trace_path(c, m, path, wind);
    for (std::size_t k = 0; k < path.size(); ++k) {
      const cplx z = winding_phase(wind[k]);
      re[path[k]].add(p * z.real());
      im[path[k]].add(p * z.imag());
      hit[path[k]].add(p);
    }
  }
  Observable o;
  o.F.resize(m.edge_count());
  o.on_path.resize(m.edge_count());
  for (int e = 0; e < m.edge_count(); ++e) {
    o.F[e] = {re[e].value(), im[e].value()};
    o.on_path[e] = hit[e].value();
  }
  return o;
}

Observable exact_observable(const MedialGraph& m, int cutoff) {
  const auto mu = enumerate_measure(m.domain().graph, BoundaryCondition::dobrushin(m.domain()), critical_ising(), cutoff);
  return exact_observable(m, mu);
}

ObservableAccumulator::ObservableAccumulator(const MedialGraph& m)
    : m_(&m),
      re_(m.edge_count(), 0.0),
      im_(m.edge_count(), 0.0),
      re2_(m.edge_count(), 0.0),
      im2_(m.edge_count(), 0.0),
      hits_(m.edge_count(), 0.0) {}

void ObservableAccumulator::add(const Configuration& c) {
  trace_path(c, *m_, path_, wind_);
  for (std::size_t k = 0; k < path_.size(); ++k) {
    const cplx z = winding_phase(wind_[k]);
    const int e = path_[k];
    re_[e] += z.real();
    im_[e] += z.imag();
    re2_[e] += z.real() * z.real();
    im2_[e] += z.imag() * z.imag();
    hits_[e] += 1.0;
  }
  ++n_;
}

Observable ObservableAccumulator::result() const {
  Observable o;
  const int ne = m_->edge_count();
  o.F.resize(ne);
  o.se.resize(ne);
  o.on_path.resize(ne);
  const double n = static_cast<double>(std::max<long long>(n_, 1));
  for (int e = 0; e < ne; ++e) {
    const double mr = re_[e] / n, mi = im_[e] / n;
    o.F[e] = {mr, mi};
    o.on_path[e] = hits_[e] / n;
    const double var = std::max(0.0, re2_[e] / n - mr * mr) + std::max(0.0, im2_[e] / n - mi * mi);
    o.se[e] = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  }
  return o;
}

namespace {

bool four_valent(const MedialVertex& v) {
  return !v.terminal && std::all_of(v.around.begin(), v.around.end(), [](int e) { return e >= 0; });
}

}  // namespace

double check_local_relation(const Observable& o, const MedialGraph& m) {
  double worst = 0.0;
  for (const auto& v : m.vertices()) {
    if (!four_valent(v)) continue;
    const auto& a = v.around;
    worst = std::max(worst, std::abs(o.F[a[0]] + o.F[a[2]] - o.F[a[1]] - o.F[a[3]]));
  }
  return worst;
}

double check_argument_lines(const Observable& o, const MedialGraph& m, double zero) {
  const double ta = dir_angle(m.edges()[m.e_a()].dir);
  double worst = 0.0;
  for (int e = 0; e < m.edge_count(); ++e) {
    if (std::abs(o.F[e]) < zero) continue;
    const double line = -(dir_angle(m.edges()[e].dir) - ta) / 2;
    // Angle of F relative to the line, folded into (-π/2, π/2].
    double d = std::arg(o.F[e] * std::polar(1.0, -line));
    if (d > std::numbers::pi / 2) d -= std::numbers::pi;
    if (d <= -std::numbers::pi / 2) d += std::numbers::pi;
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

double check_orthogonal_squares(const Observable& o, const MedialGraph& m) {
  double worst = 0.0;
  for (const auto& v : m.vertices()) {
    if (!four_valent(v)) continue;
    const auto& a = v.around;
    worst = std::max(worst, std::abs(std::norm(o.F[a[0]]) + std::norm(o.F[a[2]]) - std::norm(o.F[a[1]]) -
                                     std::norm(o.F[a[3]])));
  }
  return worst;
}

double check_degree_two(const Observable& o, const MedialGraph& m) {
  double worst = 0.0;
  for (const auto& v : m.vertices()) {
    if (v.terminal || v.degree() != 2) continue;
    const int ein = v.in[0], eout = v.out[0];
    worst = std::max(worst, std::abs(std::abs(o.F[ein]) - std::abs(o.F[eout])));
    worst = std::max(worst, std::abs(std::abs(o.F[ein]) - o.on_path[ein]));
  }
  return worst;
}

double check_boundary_connection(const Observable& o, const MedialGraph& m, const ExactMeasure& mu) {
  const auto& g = m.domain().graph;
  const auto& wired = m.domain().wired_arc;
  std::vector<int> edges, sites;
  for (int e = 0; e < m.edge_count(); ++e) {
    const MedialEdge& me = m.edges()[e];
    if (m.faces()[me.white].role != FaceRole::free_dual) continue;
    if (m.faces()[me.black].role != FaceRole::free_site) continue;
    edges.push_back(e);
    sites.push_back(m.faces()[me.black].site);
  }
  // One pass over all configurations; clusters are built once per configuration.
  std::vector<NeumaierSum> prob(edges.size());
  std::vector<char> wired_root(g.site_count());
  UnionFind uf;
  const int ne = mu.edge_count();
  Configuration c(ne);
  std::uint64_t mask = 0;
  const std::uint64_t total = std::uint64_t{1} << ne;
  for (std::uint64_t i = 0; i < total; ++i) {
    if (i > 0) {
      const int e = std::countr_zero(i);
      c.flip(e);
      mask ^= std::uint64_t{1} << e;
    }
    uf.reset(g.site_count());
    for (int e = 0; e < ne; ++e)
      if (c.open(e)) uf.unite(g.edges()[e].u, g.edges()[e].v);
    std::fill(wired_root.begin(), wired_root.end(), 0);
    for (int s : wired) wired_root[uf.find(s)] = 1;
    const double p = mu.probability(mask);
    for (std::size_t k = 0; k < sites.size(); ++k)
      if (wired_root[uf.find(sites[k])]) prob[k].add(p);
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < edges.size(); ++k)
    worst = std::max(worst, std::abs(std::abs(o.F[edges[k]]) - prob[k].value()));
  return worst;
}

HFunction build_H(const Observable& o, const MedialGraph& m, double tolerance) {
  const int nf = static_cast<int>(m.faces().size());
  std::vector<std::vector<int>> incident(nf);
  for (int e = 0; e < m.edge_count(); ++e) {
    incident[m.edges()[e].black].push_back(e);
    incident[m.edges()[e].white].push_back(e);
  }
  HFunction h;
  h.H.assign(nf, 0.0);
  std::vector<char> seen(nf, 0);
  const int start = m.black_face(m.domain().a_index());
  h.H[start] = 1.0;
  seen[start] = 1;
  std::queue<int> q;
  q.push(start);
  while (!q.empty()) {
    const int f = q.front();
    q.pop();
    for (int e : incident[f]) {
      const MedialEdge& me = m.edges()[e];
      const double inc = std::norm(o.F[e]);
      const int other = me.black == f ? me.white : me.black;
      if (seen[other]) continue;
      seen[other] = 1;
      h.H[other] = me.black == f ? h.H[f] - inc : h.H[f] + inc;
      q.push(other);
    }
  }
  for (int e = 0; e < m.edge_count(); ++e) {
    const MedialEdge& me = m.edges()[e];
    h.path_residual = std::max(h.path_residual, std::abs(h.H[me.black] - h.H[me.white] - std::norm(o.F[e])));
  }
  for (int f : m.wired_arc_faces()) h.boundary_residual = std::max(h.boundary_residual, std::abs(h.H[f] - 1.0));
  for (int f : m.free_arc_faces()) h.boundary_residual = std::max(h.boundary_residual, std::abs(h.H[f]));
  h.min_value = *std::min_element(h.H.begin(), h.H.end());
  h.max_value = *std::max_element(h.H.begin(), h.H.end());
  if (h.path_residual > tolerance)
    throw Error(ErrorCode::inconsistent, "H increments are path dependent");
  return h;
}

Harmonicity check_harmonicity(const HFunction& h, const MedialGraph& m) {
  Harmonicity r;
  r.min_black = std::numeric_limits<double>::infinity();
  r.max_white = -std::numeric_limits<double>::infinity();
  std::unordered_map<Pt, int, PtHash> vpos;
  for (std::size_t i = 0; i < m.vertices().size(); ++i)
    if (m.vertices()[i].primal_edge >= 0) vpos[m.vertices()[i].pos] = static_cast<int>(i);
  for (int f = 0; f < static_cast<int>(m.faces().size()); ++f) {
    const Face& face = m.faces()[f];
    bool interior = true;
    double lap = 0.0;
    for (const Site& st : kLatticeStep) {
      auto it = vpos.find({face.pos.x + st.x, face.pos.y + st.y});
      if (it == vpos.end() || !four_valent(m.vertices()[it->second])) {
        interior = false;
        break;
      }
      lap += h.H[*m.face_at({face.pos.x + 2 * st.x, face.pos.y + 2 * st.y})] - h.H[f];
    }
    if (!interior) continue;
    lap /= 4.0;
    if (face.color == Color::black) {
      r.min_black = std::min(r.min_black, lap);
      ++r.black_faces;
    } else {
      r.max_white = std::max(r.max_white, lap);
      ++r.white_faces;
    }
  }
  if (r.black_faces == 0) r.min_black = 0.0;
  if (r.white_faces == 0) r.max_white = 0.0;
  return r;
}

}  // namespace fklab
