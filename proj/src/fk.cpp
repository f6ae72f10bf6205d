#include "fklab/fk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "fklab/error.hpp"
#include "fklab/neumaier.hpp"

namespace fklab {

void FKParams::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::invalid_argument, "p must lie in [0, 1]");
  if (!(q >= 1.0)) throw Error(ErrorCode::invalid_argument, "q must be at least 1");
}

double self_dual_point(double q) {
  if (!(q >= 1.0)) throw Error(ErrorCode::invalid_argument, "q must be at least 1");
  return std::sqrt(q) / (1.0 + std::sqrt(q));
}

double dual_parameter(double p, double q) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::invalid_argument, "p must lie in (0, 1)");
  return q * (1.0 - p) / (q * (1.0 - p) + p);
}

FKParams critical_ising() { return {self_dual_point(2.0), 2.0}; }

// ---------------------------------------------------------------------------

BoundaryCondition::BoundaryCondition(const PrimalGraph& g, std::vector<std::vector<int>> blocks)
    : site_count_(g.site_count()) {
  block_of_.assign(site_count_, -1);
  for (auto& blk : blocks) {
    if (blk.empty()) continue;
    const int id = static_cast<int>(blocks_.size());
    for (int s : blk) {
      if (s < 0 || s >= site_count_) throw Error(ErrorCode::invalid_argument, "block site out of range");
      if (block_of_[s] >= 0) throw Error(ErrorCode::invalid_argument, "wired blocks overlap");
      block_of_[s] = id;
    }
    blocks_.push_back(std::move(blk));
  }
}

BoundaryCondition BoundaryCondition::free(const PrimalGraph& g) { return BoundaryCondition(g, {}); }

BoundaryCondition BoundaryCondition::wired(const PrimalGraph& g) { return BoundaryCondition(g, {g.boundary()}); }

BoundaryCondition BoundaryCondition::dobrushin(const DobrushinDomain& d) {
  return BoundaryCondition(d.graph, {d.wired_arc});
}

// ---------------------------------------------------------------------------

Configuration Configuration::from_mask(int edges, std::uint64_t mask) {
  Configuration c(edges);
  for (int e = 0; e < edges; ++e) c.open_[e] = static_cast<std::uint8_t>((mask >> e) & 1U);
  return c;
}

int Configuration::open_count() const {
  int n = 0;
  for (auto b : open_) n += b;
  return n;
}

int ClusterScratch::build_without(const PrimalGraph& g, const Configuration& c, const BoundaryCondition& bc,
                                  int skip) {
  const int v = g.site_count();
  const int nb = bc.block_count();
  uf_.reset(v + nb);
  int merges = 0;
  for (int b = 0; b < nb; ++b)
    for (int s : bc.blocks()[b]) merges += uf_.unite(v + b, s);
  const auto& edges = g.edges();
  for (int e = 0; e < g.edge_count(); ++e)
    if (e != skip && c.open(e)) merges += uf_.unite(edges[e].u, edges[e].v);
  // Every ghost is merged with at least one site, so ghosts add no clusters.
  return v + nb - merges;
}

int ClusterScratch::build(const PrimalGraph& g, const Configuration& c, const BoundaryCondition& bc) {
  return build_without(g, c, bc, -1);
}

int cluster_count(const PrimalGraph& g, const Configuration& c, const BoundaryCondition& bc) {
  ClusterScratch s;
  return s.build(g, c, bc);
}

namespace {

double xlogy(double n, double y) { return n == 0.0 ? 0.0 : n * std::log(y); }

}  // namespace

double config_log_weight(const PrimalGraph& g, const Configuration& c, const BoundaryCondition& bc,
                         const FKParams& params) {
  const int o = c.open_count();
  const int cl = g.edge_count() - o;
  const int k = cluster_count(g, c, bc);
  return xlogy(o, params.p) + xlogy(cl, 1.0 - params.p) + xlogy(k, params.q);
}

double config_weight(const PrimalGraph& g, const Configuration& c, const BoundaryCondition& bc,
                     const FKParams& params) {
  return std::exp(config_log_weight(g, c, bc, params));
}

ExactMeasure enumerate_measure(const PrimalGraph& g, const BoundaryCondition& bc, const FKParams& params,
                               int cutoff) {
  params.validate();
  const int ne = g.edge_count();
  if (ne > cutoff || ne > 40) throw Error(ErrorCode::cutoff_exceeded, "too many edges to enumerate");
  ExactMeasure m;
  m.edges_ = ne;
  m.params_ = params;
  m.bc_ = bc;
  const std::uint64_t total = std::uint64_t{1} << ne;
  m.prob_.assign(total, 0.0);

  // Gray-code walk: one edge toggles per step, clusters recounted from scratch.
  Configuration c(ne);
  ClusterScratch scratch;
  int open = 0;
  const double lp = params.p > 0 ? std::log(params.p) : -std::numeric_limits<double>::infinity();
  const double lq1 = params.p < 1 ? std::log1p(-params.p) : -std::numeric_limits<double>::infinity();
  const double lqq = std::log(params.q);
  double max_lw = -std::numeric_limits<double>::infinity();
  std::uint64_t mask = 0;
  for (std::uint64_t i = 0; i < total; ++i) {
    if (i > 0) {
      const int e = std::countr_zero(i);
      c.flip(e);
      mask ^= std::uint64_t{1} << e;
      open += c.open(e) ? 1 : -1;
    }
    const int k = scratch.build(g, c, bc);
    double lw = k * lqq;
    if (open > 0) lw += open * lp;
    if (ne - open > 0) lw += (ne - open) * lq1;
    m.prob_[mask] = lw;
    max_lw = std::max(max_lw, lw);
  }
  // Neumaier-compensated normalization.
  NeumaierSum total_w;
  for (double& w : m.prob_) {
    w = std::exp(w - max_lw);
    total_w.add(w);
  }
  const double sum = total_w.value();
  for (double& w : m.prob_) w /= sum;
  m.log_z_ = max_lw + std::log(sum);
  return m;
}

double event_probability(const ExactMeasure& m, const Event& event) {
  const int ne = m.edge_count();
  Configuration c(ne);
  NeumaierSum acc;
  std::uint64_t mask = 0;
  const std::uint64_t total = std::uint64_t{1} << ne;
  for (std::uint64_t i = 0; i < total; ++i) {
    if (i > 0) {
      const int e = std::countr_zero(i);
      c.flip(e);
      mask ^= std::uint64_t{1} << e;
    }
    if (!event(c)) continue;
    acc.add(m.probability(mask));
  }
  return acc.value();
}

std::vector<double> edge_marginals(const ExactMeasure& m) {
  std::vector<NeumaierSum> acc(m.edge_count());
  const auto pr = m.probabilities();
  for (std::uint64_t mask = 0; mask < pr.size(); ++mask)
    for (int e = 0; e < m.edge_count(); ++e)
      if ((mask >> e) & 1U) acc[e].add(pr[mask]);
  std::vector<double> out(m.edge_count());
  for (int e = 0; e < m.edge_count(); ++e) out[e] = acc[e].value();
  return out;
}

bool open_connection(const PrimalGraph& g, const Configuration& c, std::span<const int> from,
                     std::span<const int> to, UnionFind& uf) {
  const int v = g.site_count();
  uf.reset(v + 2);
  for (int s : from) uf.unite(v, s);
  for (int s : to) uf.unite(v + 1, s);
  if (uf.connected(v, v + 1)) return true;
  const auto& edges = g.edges();
  for (int e = 0; e < g.edge_count(); ++e)
    if (c.open(e)) uf.unite(edges[e].u, edges[e].v);
  return uf.connected(v, v + 1);
}

namespace {

bool side_crossing(const PrimalGraph& g, const Configuration& c, UnionFind& uf, bool vertical) {
  const Site lo = g.min_corner(), hi = g.max_corner();
  std::vector<int> a, b;
  for (int i = 0; i < g.site_count(); ++i) {
    const Site s = g.site(i);
    const int coord = vertical ? s.y : s.x;
    if (coord == (vertical ? lo.y : lo.x)) a.push_back(i);
    if (coord == (vertical ? hi.y : hi.x)) b.push_back(i);
  }
  return open_connection(g, c, a, b, uf);
}

}  // namespace

bool vertical_crossing(const PrimalGraph& g, const Configuration& c, UnionFind& scratch) {
  return side_crossing(g, c, scratch, true);
}

bool horizontal_crossing(const PrimalGraph& g, const Configuration& c, UnionFind& scratch) {
  return side_crossing(g, c, scratch, false);
}

}  // namespace fklab
