#include "fklab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fklab/error.hpp"
#include "fklab/loops.hpp"

namespace fklab {

std::string bc_name(BcKind k) {
  switch (k) {
    case BcKind::free: return "free";
    case BcKind::wired: return "wired";
    case BcKind::dobrushin: return "dobrushin";
  }
  return "?";
}

BcKind parse_bc(const std::string& s) {
  if (s == "free") return BcKind::free;
  if (s == "wired") return BcKind::wired;
  if (s == "dobrushin") return BcKind::dobrushin;
  throw Error(ErrorCode::invalid_argument, "unknown boundary condition '" + s + "'");
}

BoundaryCondition rectangle_bc(const PrimalGraph& g, BcKind kind) {
  switch (kind) {
    case BcKind::free: return BoundaryCondition::free(g);
    case BcKind::wired: return BoundaryCondition::wired(g);
    case BcKind::dobrushin: {
      const Site lo = g.min_corner(), hi = g.max_corner();
      const int ym = lo.y + (hi.y - lo.y) / 2;
      return BoundaryCondition::dobrushin(build_dobrushin(g, {lo.x, ym}, {hi.x, ym}));
    }
  }
  throw Error(ErrorCode::invalid_argument, "bad boundary condition");
}

namespace {

ChainSpec make_spec(const PrimalGraph& g, BoundaryCondition bc, const FKParams& params, const McBudget& b) {
  ChainSpec s;
  s.graph = &g;
  s.bc = std::move(bc);
  s.params = params;
  s.dynamics = b.dynamics;
  s.burn_in_sweeps = b.burn_in;
  s.sweeps = b.sweeps;
  s.chains = b.chains;
  s.seed = b.seed;
  return s;
}

void open_clusters(const PrimalGraph& g, const Configuration& c, UnionFind& uf) {
  uf.reset(g.site_count());
  const auto& edges = g.edges();
  for (int e = 0; e < g.edge_count(); ++e)
    if (c.open(e)) uf.unite(edges[e].u, edges[e].v);
}

// Whether `x` shares an open cluster with some site of `to`, after open_clusters.
bool reaches(UnionFind& uf, int x, std::span<const int> to) {
  const int r = uf.find(x);
  return std::any_of(to.begin(), to.end(), [&](int t) { return uf.find(t) == r; });
}

int site_index(const PrimalGraph& g, Site s) {
  auto i = g.index_of(s);
  if (!i) throw Error(ErrorCode::invalid_argument, "site outside the domain");
  return *i;
}

double ols_slope(std::span<const double> x, std::span<const double> y, double& r2) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return sxy / sxx;
}

}  // namespace

ScalingResult scaling_result(std::vector<int> sizes, std::vector<Estimate> est) {
  ScalingResult r;
  r.sizes = std::move(sizes);
  r.estimates = std::move(est);
  std::vector<PowerLawPoint> pts;
  for (std::size_t i = 0; i < r.sizes.size(); ++i)
    pts.push_back({static_cast<double>(r.sizes[i]), r.estimates[i].mean, r.estimates[i].std_error});
  r.fit = fit_power_law_windowed(pts);
  r.exponent = -r.fit.exponent;
  return r;
}

CrossingEstimates crossing_probability(const PrimalGraph& g, const BoundaryCondition& bc, const FKParams& params,
                                       const McBudget& budget) {
  const auto est = run_chain(make_spec(g, bc, params, budget), 3, [&g](const Configuration& c, std::span<double> out) {
    thread_local UnionFind uf;
    const bool v = vertical_crossing(g, c, uf);
    const bool h = horizontal_crossing(g, c, uf);
    out[0] = v;
    out[1] = h;
    out[2] = v && h;
  });
  return {est[0], est[1], est[2]};
}

CrossingEstimates crossing_probability(int n, int m, BcKind bc, const McBudget& budget) {
  const PrimalGraph g = build_rectangle(n, m);
  return crossing_probability(g, rectangle_bc(g, bc), critical_ising(), budget);
}

DualComb dual_comb(int n, int m) {
  if (n < 1 || m < 1) throw Error(ErrorCode::invalid_argument, "rectangle must have positive sides");
  std::vector<Site> sites;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y) sites.push_back({x, y});
  std::vector<Site> exterior;
  for (int y = 0; y < m; ++y) exterior.push_back({-1, y});
  for (int y = 0; y < m; ++y) exterior.push_back({n, y});
  for (int x = 0; x < n; ++x) exterior.push_back({x, -1});
  for (int x = 0; x < n; ++x) exterior.push_back({x, m});
  sites.insert(sites.end(), exterior.begin(), exterior.end());
  // One dual edge per primal edge of the rectangle.
  std::vector<std::pair<Site, Site>> edges;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y <= m; ++y) edges.push_back({{x, y - 1}, {x, y}});
  for (int x = 0; x <= n; ++x)
    for (int y = 0; y < m; ++y) edges.push_back({{x - 1, y}, {x, y}});
  DualComb d;
  d.graph = PrimalGraph(sites, edges);
  std::vector<int> block;
  for (const Site& s : exterior) block.push_back(*d.graph.index_of(s));
  d.bc = BoundaryCondition(d.graph, {block});
  for (int y = 0; y < m; ++y) {
    d.left.push_back(*d.graph.index_of({-1, y}));
    d.right.push_back(*d.graph.index_of({n, y}));
  }
  return d;
}

Estimate dual_crossing_probability(int n, int m, const McBudget& budget) {
  const DualComb d = dual_comb(n, m);
  const FKParams ising = critical_ising();
  const FKParams dual{dual_parameter(ising.p, ising.q), ising.q};
  return run_chain(make_spec(d.graph, d.bc, dual, budget), 1, [&d](const Configuration& c, std::span<double> out) {
    thread_local UnionFind uf;
    out[0] = open_connection(d.graph, c, d.left, d.right, uf);
  })[0];
}

Estimate boundary_onepoint(int n, double beta, int x, int u, const McBudget& budget) {
  const int w = static_cast<int>(std::lround(beta * n));
  if (n < 1 || w < 1 || std::abs(x) > w || std::abs(u) > w)
    throw Error(ErrorCode::invalid_argument, "points must lie on the sides of the rectangle");
  const PrimalGraph g = build_rectangle(2 * w, 2 * n, {-w, 0});
  const int xi = site_index(g, {x, 0}), ui = site_index(g, {u, 2 * n});
  return run_chain(make_spec(g, BoundaryCondition::free(g), critical_ising(), budget), 1,
                   [&g, xi, ui](const Configuration& c, std::span<double> out) {
                     thread_local UnionFind uf;
                     open_clusters(g, c, uf);
                     out[0] = uf.connected(xi, ui);
                   })[0];
}

Estimate boundary_pair(int n, double beta, int x, int y, const McBudget& budget) {
  const int w = static_cast<int>(std::lround(beta * n));
  if (n < 1 || w < 1 || std::abs(x) > w || std::abs(y) > w)
    throw Error(ErrorCode::invalid_argument, "points must lie on the bottom side");
  PrimalGraph g = build_rectangle(2 * w, 2 * n, {-w, 0});
  const DobrushinDomain d = build_dobrushin(g, {-w, 2 * n}, {w, 2 * n});
  const int xi = site_index(g, {x, 0}), yi = site_index(g, {y, 0});
  const std::vector<int> top = d.wired_arc;
  return run_chain(make_spec(g, BoundaryCondition::dobrushin(d), critical_ising(), budget), 1,
                   [&g, &top, xi, yi](const Configuration& c, std::span<double> out) {
                     thread_local UnionFind uf;
                     open_clusters(g, c, uf);
                     out[0] = reaches(uf, xi, top) && reaches(uf, yi, top);
                   })[0];
}

bool box_crossing(const PrimalGraph& g, const Configuration& c, Site lo, Site hi, bool vertical,
                  UnionFind& uf) {
  const int v = g.site_count();
  uf.reset(v + 2);
  const int src = v, dst = v + 1;
  for (int x = lo.x; x <= hi.x; ++x)
    for (int y = lo.y; y <= hi.y; ++y) {
      auto i = g.index_of({x, y});
      if (!i) continue;
      if (vertical ? y == lo.y : x == lo.x) uf.unite(*i, src);
      if (vertical ? y == hi.y : x == hi.x) uf.unite(*i, dst);
      // East and north edges staying inside the box.
      if (x < hi.x) {
        const int e = g.edge_toward(*i, 0);
        if (e >= 0 && c.open(e)) uf.unite(g.edges()[e].u, g.edges()[e].v);
      }
      if (y < hi.y) {
        const int e = g.edge_toward(*i, 1);
        if (e >= 0 && c.open(e)) uf.unite(g.edges()[e].u, g.edges()[e].v);
      }
    }
  return uf.connected(src, dst);
}

bool annulus_circuit(const PrimalGraph& g, const Configuration& c, int m, int n, UnionFind& uf) {
  // Dual sites: unit cells of [-n, n]^2 by lower-left corner, the hole
  // (cells inside S_m) and the exterior. A circuit exists iff no closed-edge
  // dual path joins the hole to the exterior.
  const int side = 2 * n;
  const int inner = side * side, outer = inner + 1;
  uf.reset(inner + 2);
  auto cell = [&](int x, int y) {
    if (x < -n || x >= n || y < -n || y >= n) return outer;
    if (x >= -m && x < m && y >= -m && y < m) return inner;
    return (x + n) * side + (y + n);
  };
  const auto& edges = g.edges();
  for (int e = 0; e < g.edge_count(); ++e) {
    if (c.open(e)) continue;
    const Site a = g.site(edges[e].u), b = g.site(edges[e].v);
    const Site s = std::min(a, b);
    if (a.y == b.y)
      uf.unite(cell(s.x, s.y), cell(s.x, s.y - 1));
    else
      uf.unite(cell(s.x, s.y), cell(s.x - 1, s.y));
  }
  return !uf.connected(inner, outer);
}

bool four_rectangle_crossings(const PrimalGraph& g, const Configuration& c, int m, int n, UnionFind& uf) {
  return box_crossing(g, c, {-n, -n}, {n, -m}, false, uf) && box_crossing(g, c, {-n, -n}, {-m, n}, true, uf) &&
         box_crossing(g, c, {-n, m}, {n, n}, false, uf) && box_crossing(g, c, {m, -n}, {n, n}, true, uf);
}

CircuitEstimates circuit_probability(int m, int n, BcKind bc, const McBudget& budget) {
  if (m <= 0 || m >= n) throw Error(ErrorCode::invalid_argument, "annulus needs 0 < m < n");
  const PrimalGraph g = build_rectangle(2 * n, 2 * n, {-n, -n});
  const auto est = run_chain(make_spec(g, rectangle_bc(g, bc), critical_ising(), budget), 3,
                             [&g, m, n](const Configuration& c, std::span<double> out) {
                               thread_local UnionFind uf;
                               const bool circ = annulus_circuit(g, c, m, n, uf);
                               const bool four = four_rectangle_crossings(g, c, m, n, uf);
                               out[0] = circ;
                               out[1] = four;
                               out[2] = four && !circ;
                             });
  CircuitEstimates r;
  r.circuit = est[0];
  r.four_crossings = est[1];
  r.samples = est[0].n_samples;
  r.implication_violations = std::llround(est[2].mean * static_cast<double>(est[2].n_samples));
  return r;
}

Estimate one_arm_point(ArmKind kind, int n, const McBudget& b) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "one-arm size must be positive");
  if (kind == ArmKind::half_plane) {
    const DobrushinDomain d = build_dobrushin(build_rectangle(2 * n, n, {-n, 0}), {-n, 0}, {n, 0});
    const int o = site_index(d.graph, {0, 0});
    return run_chain(make_spec(d.graph, BoundaryCondition::dobrushin(d), critical_ising(), b), 1,
                     [&d, o](const Configuration& c, std::span<double> out) {
                       thread_local UnionFind uf;
                       open_clusters(d.graph, c, uf);
                       out[0] = reaches(uf, o, d.wired_arc);
                     })[0];
  }
  const PrimalGraph g = build_rectangle(2 * n, 2 * n, {-n, -n});
  const int o = site_index(g, {0, 0});
  return run_chain(make_spec(g, BoundaryCondition::wired(g), critical_ising(), b), 1,
                   [&g, o](const Configuration& c, std::span<double> out) {
                     thread_local UnionFind uf;
                     open_clusters(g, c, uf);
                     out[0] = reaches(uf, o, g.boundary());
                   })[0];
}

std::uint64_t one_arm_seed(std::uint64_t master, std::size_t index) { return chain_seed(master, 1000 + index); }

ScalingResult one_arm(ArmKind kind, const std::vector<int>& sizes, const McBudget& budget) {
  std::vector<Estimate> est;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    McBudget b = budget;
    b.seed = one_arm_seed(budget.seed, i);
    est.push_back(one_arm_point(kind, sizes[i], b));
  }
  return scaling_result(sizes, std::move(est));
}

ScalingResult two_point(const std::vector<int>& dists, int box, int window, const McBudget& budget) {
  const int maxd = dists.empty() ? 0 : *std::max_element(dists.begin(), dists.end());
  if (box < 4 * maxd) throw Error(ErrorCode::invalid_argument, "box side must be at least 4x the largest distance");
  if (window < 1 || window + maxd > box) throw Error(ErrorCode::invalid_argument, "window does not fit in the box");
  const int half = box / 2;
  const PrimalGraph g = build_rectangle(box, box, {-half, -half});
  const int w0 = -window / 2;
  // Pair lists per distance: x in the window, y = x + d e_1 or x + d e_2.
  std::vector<std::vector<std::pair<int, int>>> pairs(dists.size());
  for (std::size_t k = 0; k < dists.size(); ++k)
    for (int x = w0; x < w0 + window; ++x)
      for (int y = w0; y < w0 + window; ++y) {
        const int i = site_index(g, {x, y});
        pairs[k].push_back({i, site_index(g, {x + dists[k], y})});
        pairs[k].push_back({i, site_index(g, {x, y + dists[k]})});
      }
  const auto est = run_chain(make_spec(g, BoundaryCondition::free(g), critical_ising(), budget),
                             static_cast<int>(dists.size()), [&g, &pairs](const Configuration& c, std::span<double> out) {
                               thread_local UnionFind uf;
                               open_clusters(g, c, uf);
                               for (std::size_t k = 0; k < pairs.size(); ++k) {
                                 int hit = 0;
                                 for (auto [a, b] : pairs[k]) hit += uf.connected(a, b);
                                 out[k] = static_cast<double>(hit) / static_cast<double>(pairs[k].size());
                               }
                             });
  return scaling_result(dists, est);
}

int path_annulus_crossings(const MedialGraph& m, std::span<const int> path, Site x, int r, int R) {
  int state = 0;  // -1 inside B(x, r), +1 outside B(x, R), 0 not yet decided
  int crossings = 0;
  for (int e : path) {
    const Pt p = m.vertices()[m.edges()[e].head].pos;
    const int d = std::max(std::abs(p.x - 2 * x.x), std::abs(p.y - 2 * x.y));
    int now = 0;
    if (d <= 2 * r) now = -1;
    else if (d >= 2 * R) now = 1;
    if (now == 0) continue;
    if (state != 0 && now != state) ++crossings;
    state = now;
  }
  return crossings;
}

CrossingCounts crossing_counts(int n, int r, int k_max, const McBudget& budget) {
  const Site x{n / 2, n / 2};
  if (r < 1 || 2 * r >= n / 2) throw Error(ErrorCode::invalid_argument, "annulus must fit inside the square");
  if (k_max < 2) throw Error(ErrorCode::invalid_argument, "k_max must be at least 2");
  const MedialGraph med = build_medial(build_dobrushin(build_rectangle(n, n), {n / 2, 0}, {n / 2, n}));
  const PrimalGraph& g = med.domain().graph;
  const auto est = run_chain(make_spec(g, BoundaryCondition::dobrushin(med.domain()), critical_ising(), budget),
                             k_max + 1, [&med, x, r, k_max](const Configuration& c, std::span<double> out) {
                               thread_local std::vector<int> path, wind;
                               trace_path(c, med, path, wind);
                               const int cr = path_annulus_crossings(med, path, x, r, 2 * r);
                               for (int k = 0; k <= k_max; ++k) out[k] = cr >= 2 * k;
                             });
  CrossingCounts cc;
  cc.p = est;
  cc.decreasing = true;
  for (int k = 1; k <= k_max; ++k)
    if (!(est[k].mean < est[k - 1].mean)) cc.decreasing = false;
  std::vector<double> ks, logs;
  for (int k = 1; k <= k_max; ++k) {
    if (est[k].mean <= 0.0) {
      cc.slope = std::numeric_limits<double>::quiet_NaN();
      cc.decreasing = false;
      return cc;
    }
    ks.push_back(k);
    logs.push_back(std::log(est[k].mean));
  }
  cc.slope = ols_slope(ks, logs, cc.r_squared);
  return cc;
}

}  // namespace fklab
